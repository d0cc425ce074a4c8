#pragma once

// Mixed-type weighted k-means over per-service per-day feature vectors.
//
// Assignment uses the weighted mixed dissimilarity from features.hpp; the
// centroid update takes the arithmetic mean of numeric/ordinal components
// and the modal status of nominal components, which minimize the squared
// and mismatch terms respectively. Both steps therefore never increase the
// objective.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "txrisk/date.hpp"
#include "txrisk/error.hpp"
#include "txrisk/features.hpp"
#include "txrisk/thermal.hpp"
#include "txrisk/util.hpp"

namespace txrisk {

struct MemberRef {
  std::string service_id;
  Date date;

  friend bool operator==(const MemberRef&, const MemberRef&) = default;
};

struct Cluster {
  int id = 0;  ///< 1-based
  EncodedVector centroid;
  std::size_t member_count = 0;
  std::vector<MemberRef> members;
};

/// Per-cluster mean 24-hour load (kVA per service) and ambient (°C).
struct ClusterProfile {
  HourlySeries load_kva{};
  HourlySeries ambient_c{};
};

struct ClusterModel {
  int k = 0;
  std::vector<Cluster> clusters;
  FeatureSchema schema;
  NormalizationParams norm;
  std::uint64_t seed = 0;
  double objective = 0.0;
  int iterations = 0;
  std::size_t service_count = 0;  ///< distinct services in the training data
  std::size_t day_count = 0;      ///< distinct dates in the training data
  double far_threshold = 0.0;     ///< 95th percentile member-to-centroid distance
  std::vector<ClusterProfile> profiles;
  std::vector<std::string> warnings;

  [[nodiscard]] std::size_t record_count() const {
    std::size_t n = 0;
    for (const auto& c : clusters) n += c.member_count;
    return n;
  }

  /// Member records expressed in transformer-days: member_count / service_count.
  [[nodiscard]] double member_days(std::size_t cluster_index) const {
    return static_cast<double>(clusters.at(cluster_index).member_count) /
           static_cast<double>(std::max<std::size_t>(service_count, 1));
  }
};

enum class KMeansStep { Assign, Update };

struct KMeansOptions {
  int max_iterations = 300;
  int restarts = 1;
  unsigned threads = 1;
  /// Called with the objective after every assignment and update step.
  std::function<void(KMeansStep, double)> observer;
};

/// Raw k-means result on already-encoded points.
struct KMeansFit {
  std::vector<EncodedVector> centroids;
  std::vector<int> assignment;  ///< 0-based cluster index per point
  double objective = 0.0;
  int iterations = 0;
  std::vector<std::string> warnings;
};

/// Mean of continuous components, mode of nominal components (ties go to
/// the earlier status in the schema).
[[nodiscard]] inline EncodedVector update_centroid(std::span<const EncodedVector* const> members,
                                                   const FeatureSchema& schema) {
  require(!members.empty(), ErrorCode::EmptyMembers, "cannot compute a centroid without members");
  const std::size_t c = schema.continuous_count(), q = schema.nominal_count();
  EncodedVector out;
  out.continuous.assign(c, 0.0);
  out.nominal.assign(q, 0);
  for (const auto* m : members) {
    require(m->continuous.size() == c && m->nominal.size() == q, ErrorCode::SchemaMismatch,
            "member does not match schema");
    for (std::size_t j = 0; j < c; ++j) out.continuous[j] += m->continuous[j];
  }
  for (auto& v : out.continuous) v /= static_cast<double>(members.size());
  for (std::size_t j = 0; j < q; ++j) {
    const auto& def = schema.encoded_def(c + j);
    std::vector<std::size_t> tally(def.statuses.size(), 0);
    for (const auto* m : members) {
      const int s = m->nominal[j];
      if (s >= 0 && static_cast<std::size_t>(s) < tally.size()) ++tally[s];
    }
    out.nominal[j] = static_cast<int>(std::max_element(tally.begin(), tally.end()) - tally.begin());
  }
  return out;
}

[[nodiscard]] inline EncodedVector update_centroid(std::span<const EncodedVector> members,
                                                   const FeatureSchema& schema) {
  std::vector<const EncodedVector*> ptrs;
  ptrs.reserve(members.size());
  for (const auto& m : members) ptrs.push_back(&m);
  return update_centroid(std::span<const EncodedVector* const>(ptrs), schema);
}

namespace detail {

inline double total_objective(std::span<const EncodedVector> points, const std::vector<EncodedVector>& centroids,
                              const std::vector<int>& assignment, std::span<const double> weights) {
  double sum = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) sum += distance(points[i], centroids[assignment[i]], weights);
  return sum;
}

inline KMeansFit kmeans_single(std::span<const EncodedVector> points, int k, const FeatureSchema& schema,
                               std::uint64_t seed, const KMeansOptions& options) {
  const std::size_t n = points.size();
  const auto weights = schema.encoded_weights();
  KMeansFit fit;

  // Seeded choice of k distinct points (partial Fisher-Yates).
  Rng rng(seed);
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  for (int c = 0; c < k; ++c) {
    const auto j = c + rng.below(n - c);
    std::swap(idx[c], idx[j]);
    fit.centroids.push_back(points[idx[c]]);
  }

  fit.assignment.assign(n, -1);
  std::vector<int> next(n);
  std::vector<double> best_d(n);
  for (int iter = 1; iter <= options.max_iterations; ++iter) {
    // Assignment: nearest centroid; ties keep the current cluster, else the lowest index.
    parallel_for(n, options.threads, [&](std::size_t i) {
      int best = fit.assignment[i];
      double bd = best >= 0 ? distance(points[i], fit.centroids[best], weights)
                            : std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        const double d = distance(points[i], fit.centroids[c], weights);
        if (d < bd) {
          bd = d;
          best = c;
        }
      }
      next[i] = best;
      best_d[i] = bd;
    });
    const bool changed = next != fit.assignment;
    fit.assignment = next;
    fit.iterations = iter;
    double objective = 0.0;
    for (double d : best_d) objective += d;
    if (options.observer) options.observer(KMeansStep::Assign, objective);
    if (!changed) break;

    // Update.
    std::vector<std::vector<const EncodedVector*>> members(k);
    for (std::size_t i = 0; i < n; ++i) members[fit.assignment[i]].push_back(&points[i]);
    for (int c = 0; c < k; ++c) {
      if (!members[c].empty()) fit.centroids[c] = update_centroid(std::span<const EncodedVector* const>(members[c]), schema);
    }
    std::vector<std::size_t> sizes(k);
    for (int c = 0; c < k; ++c) sizes[c] = members[c].size();
    for (int c = 0; c < k; ++c) {
      if (sizes[c] != 0) continue;
      // Move the empty centroid onto the point farthest from its own centroid.
      std::size_t far = n;
      double far_d = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (sizes[fit.assignment[i]] < 2) continue;
        const double d = distance(points[i], fit.centroids[fit.assignment[i]], weights);
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      --sizes[fit.assignment[far]];
      fit.assignment[far] = c;
      sizes[c] = 1;
      fit.centroids[c] = points[far];
      fit.warnings.push_back("cluster " + std::to_string(c + 1) + " emptied at iteration " + std::to_string(iter) +
                             "; reseeded on the farthest point");
    }
    if (options.observer) {
      options.observer(KMeansStep::Update, total_objective(points, fit.centroids, fit.assignment, weights));
    }
  }
  fit.objective = total_objective(points, fit.centroids, fit.assignment, weights);
  return fit;
}

}  // namespace detail

/// k-means on encoded points. Restart r > 0 uses a seed derived from `seed`;
/// the lowest objective wins, earlier restarts winning ties.
[[nodiscard]] inline KMeansFit kmeans_encoded(std::span<const EncodedVector> points, int k,
                                              const FeatureSchema& schema, std::uint64_t seed,
                                              const KMeansOptions& options = {}) {
  require(k >= 1, ErrorCode::InvalidArgument, "k must be >= 1");
  require(points.size() >= static_cast<std::size_t>(k), ErrorCode::TooFewPoints,
          std::to_string(points.size()) + " points cannot form " + std::to_string(k) + " clusters");
  require(options.max_iterations >= 1 && options.restarts >= 1, ErrorCode::InvalidArgument,
          "max_iterations and restarts must be >= 1");
  KMeansFit best;
  for (int r = 0; r < options.restarts; ++r) {
    const std::uint64_t s = r == 0 ? seed : mix_seed(seed + static_cast<std::uint64_t>(r));
    auto fit = detail::kmeans_single(points, k, schema, s, options);
    if (r == 0 || fit.objective < best.objective) best = std::move(fit);
  }
  return best;
}

/// Trains a model on raw records: fits normalization, encodes, clusters.
[[nodiscard]] inline ClusterModel kmeans(std::span<const FeatureVector> dataset, int k, const FeatureSchema& schema,
                                         std::uint64_t seed, const KMeansOptions& options = {}) {
  require(!dataset.empty(), ErrorCode::EmptyDataset, "dataset is empty");
  ClusterModel model;
  model.k = k;
  model.schema = schema;
  model.seed = seed;
  model.norm = fit_normalization(dataset);
  for (auto j : model.norm.degenerate_features()) {
    model.warnings.push_back("feature '" + schema.encoded_def(j).name +
                             "' is constant over the dataset; it is normalized to 0 and ignored");
  }
  std::vector<EncodedVector> points;
  points.reserve(dataset.size());
  std::set<std::string> services;
  std::set<long> dates;
  for (const auto& fv : dataset) {
    points.push_back(encode(fv, schema, model.norm));
    services.insert(fv.service_id);
    dates.insert(fv.date.serial());
  }
  model.service_count = services.size();
  model.day_count = dates.size();

  auto fit = kmeans_encoded(points, k, schema, seed, options);
  model.objective = fit.objective;
  model.iterations = fit.iterations;
  model.warnings.insert(model.warnings.end(), fit.warnings.begin(), fit.warnings.end());
  model.clusters.resize(k);
  for (int c = 0; c < k; ++c) {
    model.clusters[c].id = c + 1;
    model.clusters[c].centroid = fit.centroids[c];
  }
  const auto weights = schema.encoded_weights();
  std::vector<double> own;
  own.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    auto& cl = model.clusters[fit.assignment[i]];
    cl.members.push_back({dataset[i].service_id, dataset[i].date});
    ++cl.member_count;
    own.push_back(distance(points[i], cl.centroid, weights));
  }
  std::sort(own.begin(), own.end());
  const auto rank = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(own.size())));
  model.far_threshold = own[std::max<std::size_t>(rank, 1) - 1];
  return model;
}

/// Recomputes the objective of a trained model from its member records.
[[nodiscard]] inline double recompute_objective(const ClusterModel& model, std::span<const FeatureVector> dataset) {
  std::map<std::pair<std::string, long>, int> owner;
  for (std::size_t c = 0; c < model.clusters.size(); ++c) {
    for (const auto& m : model.clusters[c].members) owner[{m.service_id, m.date.serial()}] = static_cast<int>(c);
  }
  const auto weights = model.schema.encoded_weights();
  double sum = 0.0;
  for (const auto& fv : dataset) {
    const auto it = owner.find({fv.service_id, fv.date.serial()});
    require(it != owner.end(), ErrorCode::KeyMismatch, "record not present in model");
    sum += distance(encode(fv, model.schema, model.norm), model.clusters[it->second].centroid, weights);
  }
  return sum;
}

/// One row of the cluster composition table, in raw units.
struct CompositionRow {
  int cluster_id = 0;
  std::size_t member_count = 0;
  std::vector<double> numeric;       ///< de-normalized centroid per numeric feature
  std::vector<double> ordinal;       ///< encoded centroid per ordinal feature
  std::vector<std::string> nominal;  ///< modal status per nominal feature
};

[[nodiscard]] inline std::vector<CompositionRow> composition(const ClusterModel& model) {
  const std::size_t p = model.schema.numeric_count(), c = model.schema.continuous_count();
  std::vector<CompositionRow> rows;
  for (const auto& cl : model.clusters) {
    CompositionRow row;
    row.cluster_id = cl.id;
    row.member_count = cl.member_count;
    for (std::size_t j = 0; j < p; ++j) row.numeric.push_back(denormalize(cl.centroid.continuous[j], model.norm, j));
    for (std::size_t j = p; j < c; ++j) row.ordinal.push_back(cl.centroid.continuous[j]);
    for (std::size_t j = 0; j < cl.centroid.nominal.size(); ++j) {
      row.nominal.push_back(model.schema.encoded_def(c + j).statuses.at(cl.centroid.nominal[j]));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

/// counts[month 0..11][cluster index] = member records dated in that month.
struct MonthClusterMatrix {
  std::array<std::vector<std::size_t>, 12> counts;

  [[nodiscard]] std::vector<std::size_t> column_sums() const {
    std::vector<std::size_t> sums(counts[0].size(), 0);
    for (const auto& row : counts) {
      for (std::size_t c = 0; c < row.size(); ++c) sums[c] += row[c];
    }
    return sums;
  }
};

[[nodiscard]] inline MonthClusterMatrix month_cluster_matrix(const ClusterModel& model) {
  MonthClusterMatrix m;
  for (auto& row : m.counts) row.assign(model.clusters.size(), 0);
  for (std::size_t c = 0; c < model.clusters.size(); ++c) {
    for (const auto& ref : model.clusters[c].members) ++m.counts[ref.date.month() - 1][c];
  }
  return m;
}

/// Stored raw 24-hour profile of one service-day.
struct RawDayProfile {
  HourlySeries load_kva{};
  HourlySeries ambient_c{};
};

using ProfileKey = std::pair<std::string, long>;  ///< (service_id, date serial)
using ProfileStore = std::map<ProfileKey, RawDayProfile>;

/// Hour-by-hour mean of member profiles, one per cluster.
[[nodiscard]] inline std::vector<ClusterProfile> extract_profiles(const ClusterModel& model,
                                                                  const ProfileStore& raw) {
  std::vector<ClusterProfile> out;
  for (const auto& cl : model.clusters) {
    require(cl.member_count > 0, ErrorCode::EmptyMembers, "cluster " + std::to_string(cl.id) + " has no members");
    ClusterProfile p;
    for (const auto& ref : cl.members) {
      const auto it = raw.find({ref.service_id, ref.date.serial()});
      require(it != raw.end(), ErrorCode::MissingProfile,
              "no 24-hour profile for service " + ref.service_id + " on " + ref.date.str());
      for (std::size_t h = 0; h < kHoursPerDay; ++h) {
        p.load_kva[h] += it->second.load_kva[h];
        p.ambient_c[h] += it->second.ambient_c[h];
      }
    }
    const double n = static_cast<double>(cl.members.size());
    for (std::size_t h = 0; h < kHoursPerDay; ++h) {
      p.load_kva[h] /= n;
      p.ambient_c[h] /= n;
    }
    out.push_back(p);
  }
  return out;
}

}  // namespace txrisk
