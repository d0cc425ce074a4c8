#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "txrisk/aging.hpp"
#include "txrisk/clustering.hpp"
#include "txrisk/error.hpp"
#include "txrisk/thermal.hpp"
#include "txrisk/util.hpp"

namespace txrisk {

enum class BindingLimit { TopOil, Hotspot, None };

inline std::string to_string(BindingLimit b) {
  switch (b) {
    case BindingLimit::TopOil: return "top-oil";
    case BindingLimit::Hotspot: return "hotspot";
    case BindingLimit::None: return "none";
  }
  return "none";
}

struct ThresholdResult {
  int cluster_id = 0;
  double scale = 0.0;             ///< certified peak per-unit scale
  double max_avg_load_pu = 0.0;   ///< 24-hour mean load at `scale`
  double max_peak_load_pu = 0.0;  ///< 24-hour peak load at `scale`
  BindingLimit binding_limit = BindingLimit::None;
  int impact_rank = 0;            ///< 1 = most restrictive; 0 until ranked
};

struct ThresholdOptions {
  double lower = 0.0;       ///< p.u.
  double upper = 16.0;      ///< p.u.
  double tolerance = 0.005; ///< p.u.
  SimulationOptions simulation{};
};

/// Day profile whose peak hour sits at `peak_pu`, keeping the profile's shape.
[[nodiscard]] inline DayProfile scaled_day(const ClusterProfile& profile, double peak_pu) {
  const double peak = *std::max_element(profile.load_kva.begin(), profile.load_kva.end());
  DayProfile day;
  day.ambient = profile.ambient_c;
  for (std::size_t h = 0; h < kHoursPerDay; ++h) day.load_pu[h] = peak > 0 ? peak_pu * profile.load_kva[h] / peak : 0.0;
  return day;
}

/// Transformer day for `services` services sharing a cluster's per-service profile.
[[nodiscard]] inline DayProfile service_day(const TransformerSpec& spec, const ClusterProfile& profile, int services) {
  DayProfile day;
  day.ambient = profile.ambient_c;
  for (std::size_t h = 0; h < kHoursPerDay; ++h) day.load_pu[h] = services * profile.load_kva[h] / spec.rated_kva;
  return day;
}

/// Largest peak scale (bisection on [lower, upper]) whose simulated day stays
/// within both temperature limits. Temperatures are monotone in the scale,
/// so lower is always feasible and upper infeasible while the interval shrinks.
[[nodiscard]] inline ThresholdResult loading_threshold(const TransformerSpec& spec, const ClusterProfile& profile,
                                                       const ThresholdOptions& options = {}) {
  spec.validate();
  const double peak = *std::max_element(profile.load_kva.begin(), profile.load_kva.end());
  require(peak > 0, ErrorCode::InvalidArgument, "cluster profile carries no load");
  require(options.lower >= 0 && options.upper > options.lower && options.tolerance > 0, ErrorCode::InvalidArgument,
          "bad threshold search bounds");

  auto verdict_at = [&](double s) { return check_limits(spec, simulate_day(spec, scaled_day(profile, s), options.simulation)); };

  if (!verdict_at(options.lower).within_limits) {
    fail(ErrorCode::NoFeasibleScale, "limits are violated even at scale " + std::to_string(options.lower));
  }
  ThresholdResult r;
  double lo = options.lower, hi = options.upper;
  if (verdict_at(hi).within_limits) {
    lo = hi;  // search cap reached
  } else {
    while (hi - lo > options.tolerance) {
      const double mid = 0.5 * (lo + hi);
      (verdict_at(mid).within_limits ? lo : hi) = mid;
    }
    const auto v = verdict_at(lo + options.tolerance);
    if (!v.top_oil_ok && !v.hotspot_ok) {
      r.binding_limit = (v.worst_top_oil - spec.top_oil_limit) >= (v.worst_hotspot - spec.hotspot_limit)
                            ? BindingLimit::TopOil
                            : BindingLimit::Hotspot;
    } else {
      r.binding_limit = !v.top_oil_ok ? BindingLimit::TopOil : BindingLimit::Hotspot;
    }
  }
  const auto day = scaled_day(profile, lo);
  r.scale = lo;
  r.max_peak_load_pu = *std::max_element(day.load_pu.begin(), day.load_pu.end());
  r.max_avg_load_pu = std::accumulate(day.load_pu.begin(), day.load_pu.end(), 0.0) / kHoursPerDay;
  return r;
}

/// Ranks ascending by peak threshold (ties by cluster id); returns results
/// ordered by cluster id.
[[nodiscard]] inline std::vector<ThresholdResult> rank_impact(std::vector<ThresholdResult> results) {
  std::sort(results.begin(), results.end(), [](const ThresholdResult& a, const ThresholdResult& b) {
    if (a.max_peak_load_pu != b.max_peak_load_pu) return a.max_peak_load_pu < b.max_peak_load_pu;
    return a.cluster_id < b.cluster_id;
  });
  for (std::size_t i = 0; i < results.size(); ++i) results[i].impact_rank = static_cast<int>(i) + 1;
  std::sort(results.begin(), results.end(),
            [](const ThresholdResult& a, const ThresholdResult& b) { return a.cluster_id < b.cluster_id; });
  return results;
}

[[nodiscard]] inline std::vector<ThresholdResult> cluster_thresholds(const TransformerSpec& spec,
                                                                     const ClusterModel& model,
                                                                     const ThresholdOptions& options = {}) {
  require(model.profiles.size() == model.clusters.size(), ErrorCode::MissingProfile, "model has no cluster profiles");
  std::vector<ThresholdResult> out;
  for (std::size_t c = 0; c < model.clusters.size(); ++c) {
    auto r = loading_threshold(spec, model.profiles[c], options);
    r.cluster_id = model.clusters[c].id;
    out.push_back(r);
  }
  return rank_impact(std::move(out));
}

/// Inclusive service-count range.
struct ServiceRange {
  int first = 1;
  int last = 40;

  [[nodiscard]] std::vector<int> values() const {
    require(first >= 1 && last >= first, ErrorCode::InvalidArgument, "service range is empty");
    std::vector<int> v(static_cast<std::size_t>(last - first + 1));
    std::iota(v.begin(), v.end(), first);
    return v;
  }
};

struct TemperatureCell {
  double max_top_oil = 0.0;
  double max_hotspot = 0.0;
};

struct TemperatureStudy {
  std::vector<int> cluster_ids;
  std::vector<int> services;                        ///< N values (columns)
  std::vector<std::vector<TemperatureCell>> cells;  ///< [cluster][N]
  std::vector<TemperatureCell> max_row;             ///< per-N worst over clusters
  std::optional<int> max_services;                  ///< largest passing N; empty if none
};

struct LifeStudy {
  std::vector<int> cluster_ids;
  std::vector<int> services;
  std::vector<std::vector<double>> daily_loss;  ///< [cluster][N], days per day
  std::vector<double> cluster_days;             ///< day weight per cluster
  std::vector<double> total_days;               ///< per N
  std::vector<double> annual_days;              ///< per N
  std::vector<double> economic_loss;            ///< per N
  std::optional<int> max_services;
};

namespace detail {

inline void require_monotone(const std::vector<double>& values, const std::string& what) {
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] < values[i - 1] - 1e-9) throw std::logic_error(what + " decreases with service count");
  }
}

inline std::vector<std::vector<ThermalTrace>> simulate_grid(const TransformerSpec& spec, const ClusterModel& model,
                                                            const std::vector<int>& services, unsigned threads,
                                                            const SimulationOptions& sim) {
  spec.validate();
  require(model.profiles.size() == model.clusters.size(), ErrorCode::MissingProfile, "model has no cluster profiles");
  const std::size_t k = model.clusters.size(), m = services.size();
  std::vector<std::vector<ThermalTrace>> traces(k, std::vector<ThermalTrace>(m));
  parallel_for(k * m, threads, [&](std::size_t idx) {
    const std::size_t c = idx / m, j = idx % m;
    traces[c][j] = simulate_day(spec, service_day(spec, model.profiles[c], services[j]), sim);
  });
  return traces;
}

}  // namespace detail

[[nodiscard]] inline TemperatureStudy max_services_by_temperature(const TransformerSpec& spec, const ClusterModel& model,
                                                                  const ServiceRange& range, unsigned threads = 1,
                                                                  const SimulationOptions& sim = {}) {
  TemperatureStudy study;
  study.services = range.values();
  const auto traces = detail::simulate_grid(spec, model, study.services, threads, sim);
  const std::size_t m = study.services.size();
  study.max_row.assign(m, {-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()});
  for (std::size_t c = 0; c < model.clusters.size(); ++c) {
    study.cluster_ids.push_back(model.clusters[c].id);
    std::vector<TemperatureCell> row;
    std::vector<double> to, hs;
    for (std::size_t j = 0; j < m; ++j) {
      const TemperatureCell cell{traces[c][j].max_top_oil(), traces[c][j].max_hotspot()};
      row.push_back(cell);
      to.push_back(cell.max_top_oil);
      hs.push_back(cell.max_hotspot);
      study.max_row[j].max_top_oil = std::max(study.max_row[j].max_top_oil, cell.max_top_oil);
      study.max_row[j].max_hotspot = std::max(study.max_row[j].max_hotspot, cell.max_hotspot);
    }
    detail::require_monotone(to, "top-oil temperature");
    detail::require_monotone(hs, "hotspot temperature");
    study.cells.push_back(std::move(row));
  }
  for (std::size_t j = 0; j < m; ++j) {
    if (study.max_row[j].max_top_oil > spec.top_oil_limit || study.max_row[j].max_hotspot > spec.hotspot_limit) break;
    study.max_services = study.services[j];
  }
  return study;
}

/// Largest N (scanning upward, stopping at the first failure) with EL <= budget.
[[nodiscard]] inline std::optional<int> select_max_services(std::span<const int> services,
                                                            std::span<const double> economic_losses, double budget) {
  std::optional<int> best;
  for (std::size_t j = 0; j < services.size(); ++j) {
    if (economic_losses[j] > budget) break;
    best = services[j];
  }
  return best;
}

/// Fills totals, annual loss, economic loss and the selected N from a loss grid.
inline void complete_life_study(LifeStudy& study, double years, double replacement_cost, double budget) {
  const std::size_t m = study.services.size();
  study.total_days.assign(m, 0.0);
  study.annual_days.assign(m, 0.0);
  study.economic_loss.assign(m, 0.0);
  for (std::size_t j = 0; j < m; ++j) {
    std::map<int, double> loss, days;
    for (std::size_t c = 0; c < study.cluster_ids.size(); ++c) {
      loss[study.cluster_ids[c]] = study.daily_loss[c][j];
      days[study.cluster_ids[c]] = study.cluster_days[c];
    }
    const auto ll = accumulate_life_loss(loss, days, years);
    study.total_days[j] = ll.total_days;
    study.annual_days[j] = ll.annual_days;
    study.economic_loss[j] = economic_loss(ll.annual_days, replacement_cost);
  }
  study.max_services = select_max_services(study.services, study.economic_loss, budget);
}

[[nodiscard]] inline LifeStudy max_services_by_life(const TransformerSpec& spec, const ClusterModel& model,
                                                    const ServiceRange& range, double annual_budget, double years,
                                                    unsigned threads = 1, const SimulationOptions& sim = {}) {
  LifeStudy study;
  study.services = range.values();
  const auto traces = detail::simulate_grid(spec, model, study.services, threads, sim);
  for (std::size_t c = 0; c < model.clusters.size(); ++c) {
    study.cluster_ids.push_back(model.clusters[c].id);
    study.cluster_days.push_back(model.member_days(c));
    std::vector<double> row;
    for (const auto& t : traces[c]) row.push_back(daily_aging(t).equivalent);
    detail::require_monotone(row, "daily life loss");
    study.daily_loss.push_back(std::move(row));
  }
  complete_life_study(study, years, spec.replacement_cost, annual_budget);
  return study;
}

}  // namespace txrisk
