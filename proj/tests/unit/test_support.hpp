#pragma once

// Fixtures and random generators shared by the unit and acceptance suites.

#include <atomic>
#include <filesystem>
#include <string>
#include <vector>

#include "txrisk/clustering.hpp"
#include "txrisk/features.hpp"
#include "txrisk/thermal.hpp"
#include "txrisk/util.hpp"

namespace txrisk::testing {

inline TransformerSpec spec_25kva() { return TransformerSpec{}; }

/// Plausible ONAN distribution transformer with randomized constants.
inline TransformerSpec random_spec(Rng& rng) {
  TransformerSpec s;
  s.rated_kva = rng.uniform(10.0, 100.0);
  s.top_oil_rise_rated = rng.uniform(35.0, 65.0);
  s.hotspot_differential = rng.uniform(10.0, 35.0);
  s.loss_ratio = rng.uniform(1.5, 8.0);
  s.oil_time_constant = rng.uniform(1.0, 6.0);
  s.winding_time_constant = rng.uniform(0.05, 0.5);
  s.exponent_n = rng.uniform(0.6, 1.0);
  s.exponent_m = rng.uniform(0.6, 1.0);
  return s;
}

inline DayProfile random_profile(Rng& rng, double max_load = 2.0) {
  DayProfile p;
  const double base_t = rng.uniform(-30.0, 35.0);
  for (std::size_t h = 0; h < kHoursPerDay; ++h) {
    p.ambient[h] = base_t + rng.uniform(-6.0, 6.0);
    p.load_pu[h] = rng.uniform(0.0, max_load);
  }
  return p;
}

/// Per-service cluster profile with a random shape (kVA) and ambient (°C).
inline ClusterProfile random_cluster_profile(Rng& rng) {
  ClusterProfile p;
  const double base_t = rng.uniform(-25.0, 30.0);
  const double base_l = rng.uniform(0.8, 2.5);
  for (std::size_t h = 0; h < kHoursPerDay; ++h) {
    p.ambient_c[h] = base_t + rng.uniform(-5.0, 5.0);
    p.load_kva[h] = base_l * rng.uniform(0.3, 1.7);
  }
  return p;
}

inline FeatureSchema numeric_schema(std::size_t dims) {
  std::vector<FeatureDef> defs;
  for (std::size_t j = 0; j < dims; ++j) defs.push_back({"x" + std::to_string(j), FeatureKind::Numeric, {}, 1.0});
  return FeatureSchema(std::move(defs));
}

inline EncodedVector numeric_point(std::vector<double> values) { return EncodedVector{std::move(values), {}}; }

/// Three well-separated 2-D blobs (spread 0.01, centres ≥ 0.4 apart) with labels.
struct Blobs {
  std::vector<EncodedVector> points;
  std::vector<int> labels;
};

inline Blobs three_blobs(Rng& rng, int per_blob = 30) {
  const double centres[3][2] = {{0.1, 0.1}, {0.9, 0.2}, {0.5, 0.9}};
  Blobs b;
  for (int c = 0; c < 3; ++c) {
    for (int i = 0; i < per_blob; ++i) {
      b.points.push_back(numeric_point({centres[c][0] + rng.uniform(-0.01, 0.01), centres[c][1] + rng.uniform(-0.01, 0.01)}));
      b.labels.push_back(c);
    }
  }
  return b;
}

/// True when two labelings induce the same partition.
inline bool same_partition(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      if ((a[i] == a[j]) != (b[i] == b[j])) return false;
    }
  }
  return true;
}

/// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& tag) {
  static std::atomic<int> counter{0};
  auto dir = std::filesystem::temp_directory_path() /
             ("txrisk_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace txrisk::testing
