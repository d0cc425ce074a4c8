#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "txrisk/aging.hpp"
#include "txrisk/clustering.hpp"
#include "txrisk/error.hpp"
#include "txrisk/features.hpp"
#include "txrisk/riskassess.hpp"
#include "txrisk/thermal.hpp"

namespace txrisk {

struct EstimationResult {
  double estimate = 0.0;
  std::vector<double> per_cluster_distances;
  std::vector<double> weights;         ///< normalized 1/d, sums to 1
  bool far_flag = false;
  bool partial_features = false;       ///< query lacked some schema features
  std::optional<int> exact_cluster;    ///< set when the zero-distance shortcut fired
};

struct EstimateOptions {
  double epsilon = 1e-9;
  bool strict = false;
  std::optional<double> far_threshold;  ///< defaults to the model's threshold
};

/// Inverse-distance weighted combination of per-cluster values, using the
/// model's own weighted mixed dissimilarity as the distance.
[[nodiscard]] inline EstimationResult estimate(const EncodedVector& x, const ClusterModel& model,
                                               std::span<const double> per_cluster_values,
                                               const EstimateOptions& options = {}) {
  const std::size_t k = model.clusters.size();
  require(k > 0, ErrorCode::InvalidArgument, "model has no clusters");
  require(per_cluster_values.size() == k, ErrorCode::KeyMismatch,
          "expected " + std::to_string(k) + " per-cluster values, got " + std::to_string(per_cluster_values.size()));
  const auto w = model.schema.encoded_weights();
  EstimationResult r;
  r.partial_features = has_missing(x);
  r.per_cluster_distances.reserve(k);
  for (const auto& cl : model.clusters) r.per_cluster_distances.push_back(distance(x, cl.centroid, w));

  const auto& d = r.per_cluster_distances;
  const double nearest = *std::min_element(d.begin(), d.end());
  r.far_flag = nearest > options.far_threshold.value_or(model.far_threshold);
  if (r.far_flag && options.strict) {
    fail(ErrorCode::FarFromAllClusters, "query is " + std::to_string(nearest) +
                                            " from the nearest centroid, beyond the far-guard threshold");
  }

  r.weights.assign(k, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    if (d[i] < options.epsilon) {
      r.weights[i] = 1.0;
      r.exact_cluster = static_cast<int>(i);
      r.estimate = per_cluster_values[i];
      return r;
    }
  }
  double inv_sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) inv_sum += 1.0 / d[i];
  for (std::size_t i = 0; i < k; ++i) {
    r.weights[i] = (1.0 / d[i]) / inv_sum;
    r.estimate += r.weights[i] * per_cluster_values[i];
  }
  return r;
}

/// Mean service load from daily energy readings: sum(E) / (24 n), kVA.
[[nodiscard]] inline double avg_load_from_energy(std::span<const double> daily_energy_kwh, int service_count) {
  require(service_count >= 1, ErrorCode::ZeroServices, "service count must be >= 1");
  require(daily_energy_kwh.size() == static_cast<std::size_t>(service_count), ErrorCode::InvalidArgument,
          "one energy reading per service is required");
  double total = 0.0;
  for (double e : daily_energy_kwh) {
    require(e >= 0, ErrorCode::InvalidArgument, "energy readings must be >= 0");
    total += e;
  }
  return total / (24.0 * service_count);
}

/// Daily summary for a transformer outside the training data.
struct QueryDay {
  Date date;
  double t_max = 0.0;
  double t_min = 0.0;
  double t_avg = 0.0;
  double l_avg = 0.0;
  bool weekday = true;
};

/// Maps a query day onto the schema; schema features the query does not
/// carry become missing values.
[[nodiscard]] inline FeatureVector query_features(const QueryDay& q, const FeatureSchema& schema) {
  FeatureVector fv;
  fv.date = q.date;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const auto* def : schema.of_kind(FeatureKind::Numeric)) {
    const auto& n = def->name;
    fv.numeric.push_back(n == "T_max"   ? q.t_max
                         : n == "T_min" ? q.t_min
                         : n == "T_avg" ? q.t_avg
                         : n == "L_avg" ? q.l_avg
                                        : nan);
  }
  for (std::size_t j = 0; j < schema.count(FeatureKind::Ordinal); ++j) fv.ordinal.push_back(nan);
  for (const auto* def : schema.of_kind(FeatureKind::Nominal)) {
    fv.nominal.push_back(def->name == "C_weekday" ? (q.weekday ? "Y" : "N") : "");
  }
  return fv;
}

/// Max top-oil temperature per cluster for a transformer with `services` services.
[[nodiscard]] inline std::vector<double> per_cluster_max_top_oil(const TransformerSpec& spec,
                                                                 const ClusterModel& model, int services) {
  require(services >= 1, ErrorCode::ZeroServices, "service count must be >= 1");
  require(model.profiles.size() == model.clusters.size(), ErrorCode::MissingProfile, "model has no cluster profiles");
  std::vector<double> out;
  for (const auto& p : model.profiles) out.push_back(simulate_day(spec, service_day(spec, p, services)).max_top_oil());
  return out;
}

/// Daily insulation life loss (days per day) per cluster for `services` services.
[[nodiscard]] inline std::vector<double> per_cluster_daily_loss(const TransformerSpec& spec,
                                                                const ClusterModel& model, int services) {
  require(services >= 1, ErrorCode::ZeroServices, "service count must be >= 1");
  require(model.profiles.size() == model.clusters.size(), ErrorCode::MissingProfile, "model has no cluster profiles");
  std::vector<double> out;
  for (const auto& p : model.profiles) {
    out.push_back(daily_aging(simulate_day(spec, service_day(spec, p, services))).equivalent);
  }
  return out;
}

struct DayEstimate {
  QueryDay day;
  EstimationResult result;
};

/// Estimated max top-oil temperature for one query day, given the
/// precomputed per-cluster temperatures for the transformer's service count.
[[nodiscard]] inline DayEstimate estimate_day_temperature(const QueryDay& day, const ClusterModel& model,
                                                          std::span<const double> per_cluster_temps,
                                                          const EstimateOptions& options = {}) {
  const auto x = encode(query_features(day, model.schema), model.schema, model.norm);
  return {day, estimate(x, model, per_cluster_temps, options)};
}

}  // namespace txrisk
