#include "txrisk/riskassess.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "test_support.hpp"

using namespace txrisk;
using txrisk::testing::random_cluster_profile;
using txrisk::testing::spec_25kva;

namespace {

ClusterProfile flat_profile(double load_kva, double ambient_c) {
  ClusterProfile p;
  p.load_kva.fill(load_kva);
  p.ambient_c.fill(ambient_c);
  return p;
}

// Per-unit load whose ultimate top-oil rise reaches the limit at ambient `a`.
double analytic_top_oil_k(const TransformerSpec& s, double a) {
  const double ratio = std::pow((s.top_oil_limit - a) / s.top_oil_rise_rated, 1.0 / s.exponent_n);
  return std::sqrt((ratio * (s.loss_ratio + 1.0) - 1.0) / s.loss_ratio);
}

ClusterModel model_with_profiles(const std::vector<ClusterProfile>& profiles, std::size_t service_count = 1) {
  ClusterModel m;
  m.k = static_cast<int>(profiles.size());
  m.service_count = service_count;
  for (std::size_t c = 0; c < profiles.size(); ++c) {
    Cluster cl;
    cl.id = static_cast<int>(c) + 1;
    cl.member_count = 10;
    m.clusters.push_back(cl);
  }
  m.profiles = profiles;
  return m;
}

}  // namespace

TEST(LoadingThreshold, ConstantProfileMatchesAnalyticInversion) {
  const auto spec = spec_25kva();
  for (double ambient : {-20.0, 0.0, 20.0, 35.0}) {
    const auto r = loading_threshold(spec, flat_profile(1.0, ambient));
    const double k = analytic_top_oil_k(spec, ambient);
    EXPECT_NEAR(r.scale, k, 0.01) << ambient;
    EXPECT_EQ(r.binding_limit, BindingLimit::TopOil);
    const auto t = simulate_day(spec, scaled_day(flat_profile(1.0, ambient), r.scale));
    EXPECT_NEAR(t.max_top_oil(), spec.top_oil_limit, 0.5);
  }
  // (100/55)^1.25 * 5 - 1 = 9.551..., / 4, sqrt, evaluated by hand.
  EXPECT_NEAR(analytic_top_oil_k(spec, 20.0), 1.5452, 1e-3);
}

TEST(LoadingThreshold, CertifiedAtToleranceBoundary) {
  Rng rng(31);
  const auto spec = spec_25kva();
  ThresholdOptions opts;
  for (int i = 0; i < 20; ++i) {
    const auto p = random_cluster_profile(rng);
    const auto r = loading_threshold(spec, p, opts);
    EXPECT_TRUE(check_limits(spec, simulate_day(spec, scaled_day(p, r.scale))).within_limits);
    EXPECT_FALSE(check_limits(spec, simulate_day(spec, scaled_day(p, r.scale + opts.tolerance))).within_limits);
    EXPECT_GE(r.max_peak_load_pu, r.max_avg_load_pu);
    EXPECT_DOUBLE_EQ(r.max_peak_load_pu, r.scale);
  }
}

TEST(LoadingThreshold, CoolerAmbientRaisesThreshold) {
  Rng rng(32);
  const auto spec = spec_25kva();
  for (int i = 0; i < 10; ++i) {
    const auto p = random_cluster_profile(rng);
    auto cool = p;
    for (auto& a : cool.ambient_c) a -= 10.0;
    EXPECT_GT(loading_threshold(spec, cool).scale, loading_threshold(spec, p).scale);
  }
}

TEST(LoadingThreshold, HotspotCanBind) {
  auto spec = spec_25kva();
  spec.hotspot_limit = 130.0;
  const auto r = loading_threshold(spec, flat_profile(1.0, 20.0));
  EXPECT_EQ(r.binding_limit, BindingLimit::Hotspot);
}

TEST(LoadingThreshold, NoFeasibleScale) {
  try {
    (void)loading_threshold(spec_25kva(), flat_profile(1.0, 119.0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoFeasibleScale);
  }
}

TEST(LoadingThreshold, ZeroProfileRejected) {
  EXPECT_THROW((void)loading_threshold(spec_25kva(), flat_profile(0.0, 20.0)), Error);
}

TEST(RankImpact, PrintedPeaks) {
  std::vector<ThresholdResult> rs(3);
  rs[0].cluster_id = 6;
  rs[0].max_peak_load_pu = 2.19;
  rs[1].cluster_id = 2;
  rs[1].max_peak_load_pu = 2.20;
  rs[2].cluster_id = 3;
  rs[2].max_peak_load_pu = 2.29;
  const auto ranked = rank_impact(rs);
  ASSERT_EQ(ranked.size(), 3u);
  EXPECT_EQ(ranked[0].cluster_id, 2);
  EXPECT_EQ(ranked[0].impact_rank, 2);
  EXPECT_EQ(ranked[1].cluster_id, 3);
  EXPECT_EQ(ranked[1].impact_rank, 3);
  EXPECT_EQ(ranked[2].cluster_id, 6);
  EXPECT_EQ(ranked[2].impact_rank, 1);
}

TEST(RankImpact, TiesByIdAndOrderInvariance) {
  Rng rng(33);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<ThresholdResult> rs(8);
    for (int i = 0; i < 8; ++i) {
      rs[i].cluster_id = i + 1;
      rs[i].max_peak_load_pu = 1.0 + 0.1 * static_cast<double>(rng.below(4));
    }
    const auto a = rank_impact(rs);
    std::reverse(rs.begin(), rs.end());
    const auto b = rank_impact(rs);
    for (int i = 0; i < 8; ++i) EXPECT_EQ(a[i].impact_rank, b[i].impact_rank);
    std::vector<int> ranks;
    for (const auto& r : a) ranks.push_back(r.impact_rank);
    std::sort(ranks.begin(), ranks.end());
    for (int i = 0; i < 8; ++i) EXPECT_EQ(ranks[i], i + 1);
    for (const auto& x : a) {
      for (const auto& y : a) {
        if (x.max_peak_load_pu < y.max_peak_load_pu ||
            (x.max_peak_load_pu == y.max_peak_load_pu && x.cluster_id < y.cluster_id)) {
          EXPECT_LT(x.impact_rank, y.impact_rank);
        }
      }
    }
  }
}

TEST(ServiceRange, EmptyRangeRejected) {
  EXPECT_THROW((void)(ServiceRange{5, 3}.values()), Error);
  EXPECT_EQ((ServiceRange{2, 4}.values()), (std::vector<int>{2, 3, 4}));
}

TEST(MaxServicesByTemperature, SingleClusterMatchesClosedForm) {
  const auto spec = spec_25kva();
  const double per_service = 1.3;
  const auto model = model_with_profiles({flat_profile(per_service, 20.0)});
  const auto study = max_services_by_temperature(spec, model, {1, 40});
  const int expected = static_cast<int>(std::floor(analytic_top_oil_k(spec, 20.0) * spec.rated_kva / per_service));
  ASSERT_TRUE(study.max_services.has_value());
  EXPECT_EQ(*study.max_services, expected);
}

TEST(MaxServicesByTemperature, GridIsMonotoneAndMaxRowIsColumnMax) {
  Rng rng(34);
  std::vector<ClusterProfile> profiles;
  for (int i = 0; i < 4; ++i) profiles.push_back(random_cluster_profile(rng));
  const auto model = model_with_profiles(profiles);
  const auto study = max_services_by_temperature(spec_25kva(), model, {1, 30}, 2);
  for (std::size_t j = 0; j < study.services.size(); ++j) {
    double mx = -1e9;
    for (std::size_t c = 0; c < study.cells.size(); ++c) {
      mx = std::max(mx, study.cells[c][j].max_top_oil);
      if (j > 0) {
        EXPECT_GE(study.cells[c][j].max_top_oil, study.cells[c][j - 1].max_top_oil);
      }
    }
    EXPECT_EQ(study.max_row[j].max_top_oil, mx);
  }
}

TEST(MaxServicesByTemperature, SmallRangeAllPass) {
  const auto model = model_with_profiles({flat_profile(1.0, 10.0)});
  const auto study = max_services_by_temperature(spec_25kva(), model, {1, 5});
  EXPECT_EQ(study.max_services, 5);
}

TEST(SelectMaxServices, PrintedBudgetRule) {
  const std::vector<int> n{21, 22, 23};
  const std::vector<double> el{456.0, 1086.9, 2608.0};
  EXPECT_EQ(select_max_services(n, el, 500.0), 21);
  EXPECT_EQ(select_max_services(n, el, 0.0), std::nullopt);
  EXPECT_EQ(select_max_services(n, el, 1e9), 23);
}

TEST(MaxServicesByLife, ReferenceHotspotGivesUnitLoss) {
  // Negligible rated rises pin the hotspot to the 110 °C ambient for every N.
  auto spec = spec_25kva();
  spec.top_oil_limit = 150.0;
  spec.hotspot_limit = 200.0;
  spec.top_oil_rise_rated = 1e-9;
  spec.hotspot_differential = 1e-9;
  const auto model = model_with_profiles({flat_profile(1.0, 110.0), flat_profile(2.0, 110.0)}, 1);
  const auto study = max_services_by_life(spec, model, {1, 6}, 500.0, 1.0);
  for (const auto& row : study.daily_loss)
    for (double v : row) EXPECT_NEAR(v, 1.0, 1e-6);
  for (std::size_t j = 1; j < study.services.size(); ++j) {
    EXPECT_NEAR(study.economic_loss[j], study.economic_loss[0], 1e-6);
  }
}

TEST(MaxServicesByLife, ZeroBudgetSelectsNothing) {
  const auto model = model_with_profiles({flat_profile(1.0, 20.0)});
  const auto study = max_services_by_life(spec_25kva(), model, {1, 10}, 0.0, 1.0);
  EXPECT_FALSE(study.max_services.has_value());
}

TEST(MaxServicesByLife, LossNonDecreasingInN) {
  Rng rng(35);
  std::vector<ClusterProfile> profiles;
  for (int i = 0; i < 3; ++i) profiles.push_back(random_cluster_profile(rng));
  const auto study = max_services_by_life(spec_25kva(), model_with_profiles(profiles, 2), {1, 30}, 500.0, 3.0);
  for (const auto& row : study.daily_loss)
    for (std::size_t j = 1; j < row.size(); ++j) EXPECT_GE(row[j], row[j - 1]);
  for (std::size_t j = 1; j < study.economic_loss.size(); ++j) EXPECT_GE(study.economic_loss[j], study.economic_loss[j - 1]);
  EXPECT_DOUBLE_EQ(study.cluster_days[0], 5.0);
}

TEST(MaxServicesByLife, RerunIsBitIdentical) {
  Rng rng(36);
  std::vector<ClusterProfile> profiles;
  for (int i = 0; i < 3; ++i) profiles.push_back(random_cluster_profile(rng));
  const auto model = model_with_profiles(profiles);
  const auto a = max_services_by_life(spec_25kva(), model, {1, 20}, 500.0, 2.0, 1);
  const auto b = max_services_by_life(spec_25kva(), model, {1, 20}, 500.0, 2.0, 3);
  EXPECT_EQ(a.daily_loss, b.daily_loss);
  EXPECT_EQ(a.economic_loss, b.economic_loss);
}
