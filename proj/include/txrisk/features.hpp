#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "txrisk/date.hpp"
#include "txrisk/error.hpp"

namespace txrisk {

enum class FeatureKind { Numeric, Ordinal, Nominal };

inline std::string to_string(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::Numeric: return "numeric";
    case FeatureKind::Ordinal: return "ordinal";
    case FeatureKind::Nominal: return "nominal";
  }
  return "numeric";
}

inline FeatureKind parse_feature_kind(const std::string& s) {
  if (s == "numeric") return FeatureKind::Numeric;
  if (s == "ordinal") return FeatureKind::Ordinal;
  if (s == "nominal") return FeatureKind::Nominal;
  fail(ErrorCode::SchemaMismatch, "unknown feature kind '" + s + "'");
}

struct FeatureDef {
  std::string name;
  FeatureKind kind = FeatureKind::Numeric;
  std::vector<std::string> statuses;  ///< ordered statuses (ordinal) or labels (nominal)
  double weight = 1.0;
};

/// Ordered feature set with per-feature weights.
///
/// Encoded vectors lay features out as [numeric..., ordinal...] in the
/// continuous part and [nominal...] in the categorical part, each group in
/// declaration order.
class FeatureSchema {
 public:
  FeatureSchema() = default;

  explicit FeatureSchema(std::vector<FeatureDef> defs) : defs_(std::move(defs)) {
    std::set<std::string> seen;
    for (const auto& d : defs_) {
      require(!d.name.empty(), ErrorCode::SchemaMismatch, "feature name is empty");
      require(seen.insert(d.name).second, ErrorCode::SchemaMismatch, "duplicate feature name '" + d.name + "'");
      require(std::isfinite(d.weight) && d.weight >= 0, ErrorCode::SchemaMismatch,
              "weight of '" + d.name + "' must be >= 0");
      if (d.kind != FeatureKind::Numeric) {
        require(!d.statuses.empty(), ErrorCode::SchemaMismatch, "feature '" + d.name + "' needs a status list");
      }
    }
    for (const auto kind : {FeatureKind::Numeric, FeatureKind::Ordinal, FeatureKind::Nominal}) {
      for (std::size_t i = 0; i < defs_.size(); ++i) {
        if (defs_[i].kind == kind) order_.push_back(i);
      }
    }
  }

  /// T_max, T_min, T_avg, L_avg numeric plus the weekday flag, all weights 1.
  static FeatureSchema default_schema() {
    return FeatureSchema({{"T_max", FeatureKind::Numeric, {}, 1.0},
                          {"T_min", FeatureKind::Numeric, {}, 1.0},
                          {"T_avg", FeatureKind::Numeric, {}, 1.0},
                          {"L_avg", FeatureKind::Numeric, {}, 1.0},
                          {"C_weekday", FeatureKind::Nominal, {"Y", "N"}, 1.0}});
  }

  [[nodiscard]] const std::vector<FeatureDef>& defs() const { return defs_; }

  [[nodiscard]] std::vector<const FeatureDef*> of_kind(FeatureKind kind) const {
    std::vector<const FeatureDef*> out;
    for (const auto& d : defs_) {
      if (d.kind == kind) out.push_back(&d);
    }
    return out;
  }

  [[nodiscard]] std::size_t count(FeatureKind kind) const {
    return static_cast<std::size_t>(
        std::count_if(defs_.begin(), defs_.end(), [kind](const FeatureDef& d) { return d.kind == kind; }));
  }
  [[nodiscard]] std::size_t numeric_count() const { return count(FeatureKind::Numeric); }
  [[nodiscard]] std::size_t continuous_count() const { return numeric_count() + count(FeatureKind::Ordinal); }
  [[nodiscard]] std::size_t nominal_count() const { return count(FeatureKind::Nominal); }

  /// Definitions in encoded layout order: numeric, ordinal, nominal.
  [[nodiscard]] const FeatureDef& encoded_def(std::size_t slot) const { return defs_.at(order_.at(slot)); }

  /// Weights in encoded layout order.
  [[nodiscard]] std::vector<double> encoded_weights() const {
    std::vector<double> w;
    w.reserve(order_.size());
    for (auto i : order_) w.push_back(defs_[i].weight);
    return w;
  }

  [[nodiscard]] FeatureSchema with_scaled_weights(double factor) const {
    auto defs = defs_;
    for (auto& d : defs) d.weight *= factor;
    return FeatureSchema(std::move(defs));
  }

  friend bool operator==(const FeatureSchema& a, const FeatureSchema& b) {
    if (a.defs_.size() != b.defs_.size()) return false;
    for (std::size_t i = 0; i < a.defs_.size(); ++i) {
      const auto &x = a.defs_[i], &y = b.defs_[i];
      if (x.name != y.name || x.kind != y.kind || x.statuses != y.statuses || x.weight != y.weight) return false;
    }
    return true;
  }

 private:
  std::vector<FeatureDef> defs_;
  std::vector<std::size_t> order_;
};

/// Encodes the i-th (1-based) of N ordered statuses as (i - 1/2) / N.
[[nodiscard]] inline double encode_ordinal(int status_order, int status_count) {
  require(status_count >= 1 && status_order >= 1 && status_order <= status_count, ErrorCode::OutOfRange,
          "ordinal status " + std::to_string(status_order) + " outside [1, " + std::to_string(status_count) + "]");
  return (status_order - 0.5) / status_count;
}

/// One service on one day, in raw units.
struct FeatureVector {
  std::string service_id;
  Date date;
  std::vector<double> numeric;       ///< raw values per numeric feature (°C, kVA)
  std::vector<double> ordinal;       ///< encode_ordinal values per ordinal feature
  std::vector<std::string> nominal;  ///< status label per nominal feature
};

/// Normalized continuous part plus nominal status indices. NaN / -1 mark a
/// feature as missing (query vectors only).
struct EncodedVector {
  std::vector<double> continuous;
  std::vector<int> nominal;

  friend bool operator==(const EncodedVector&, const EncodedVector&) = default;
};

inline constexpr int kMissingNominal = -1;

struct NormalizationParams {
  std::vector<double> min;
  std::vector<double> max;

  [[nodiscard]] std::size_t size() const { return min.size(); }
  [[nodiscard]] bool degenerate(std::size_t feature) const { return min.at(feature) == max.at(feature); }

  [[nodiscard]] std::vector<std::size_t> degenerate_features() const {
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < size(); ++j) {
      if (degenerate(j)) out.push_back(j);
    }
    return out;
  }
};

[[nodiscard]] inline NormalizationParams fit_normalization(std::span<const FeatureVector> dataset) {
  require(!dataset.empty(), ErrorCode::EmptyDataset, "cannot fit normalization on an empty dataset");
  const std::size_t p = dataset.front().numeric.size();
  NormalizationParams params;
  params.min.assign(p, std::numeric_limits<double>::infinity());
  params.max.assign(p, -std::numeric_limits<double>::infinity());
  for (const auto& fv : dataset) {
    require(fv.numeric.size() == p, ErrorCode::SchemaMismatch, "records disagree on numeric feature count");
    for (std::size_t j = 0; j < p; ++j) {
      params.min[j] = std::min(params.min[j], fv.numeric[j]);
      params.max[j] = std::max(params.max[j], fv.numeric[j]);
    }
  }
  return params;
}

/// Min-max scaling clamped to [0, 1]; a constant feature maps to 0.
[[nodiscard]] inline double normalize(double raw, const NormalizationParams& params, std::size_t feature) {
  const double lo = params.min.at(feature), hi = params.max.at(feature);
  if (hi == lo) return 0.0;
  return std::clamp((raw - lo) / (hi - lo), 0.0, 1.0);
}

[[nodiscard]] inline double denormalize(double value, const NormalizationParams& params, std::size_t feature) {
  const double lo = params.min.at(feature), hi = params.max.at(feature);
  return lo + value * (hi - lo);
}

[[nodiscard]] inline int status_index(const FeatureDef& def, const std::string& label) {
  const auto it = std::find(def.statuses.begin(), def.statuses.end(), label);
  require(it != def.statuses.end(), ErrorCode::SchemaMismatch,
          "status '" + label + "' not declared for feature '" + def.name + "'");
  return static_cast<int>(it - def.statuses.begin());
}

/// Normalizes and encodes a raw record. NaN numeric values and empty nominal
/// labels are carried through as missing.
[[nodiscard]] inline EncodedVector encode(const FeatureVector& fv, const FeatureSchema& schema,
                                          const NormalizationParams& params) {
  const auto numeric = schema.numeric_count();
  const auto ordinal = schema.count(FeatureKind::Ordinal);
  const auto nominal = schema.nominal_count();
  require(fv.numeric.size() == numeric && fv.ordinal.size() == ordinal && fv.nominal.size() == nominal,
          ErrorCode::SchemaMismatch, "feature vector does not match schema");
  require(params.size() == numeric, ErrorCode::SchemaMismatch, "normalization params do not match schema");
  EncodedVector out;
  out.continuous.reserve(numeric + ordinal);
  for (std::size_t j = 0; j < numeric; ++j) {
    const double raw = fv.numeric[j];
    out.continuous.push_back(std::isnan(raw) ? raw : normalize(raw, params, j));
  }
  for (double v : fv.ordinal) out.continuous.push_back(v);
  for (std::size_t j = 0; j < nominal; ++j) {
    const auto& label = fv.nominal[j];
    out.nominal.push_back(label.empty() ? kMissingNominal : status_index(schema.encoded_def(numeric + ordinal + j), label));
  }
  return out;
}

/// Weighted mixed dissimilarity: squared differences over numeric/ordinal
/// features plus a 0/1 mismatch over nominal features. Features missing on
/// either side are skipped.
[[nodiscard]] inline double distance(const EncodedVector& x, const EncodedVector& y, std::span<const double> weights) {
  const std::size_t c = x.continuous.size();
  require(y.continuous.size() == c && x.nominal.size() == y.nominal.size() &&
              weights.size() == c + x.nominal.size(),
          ErrorCode::SchemaMismatch, "vectors encoded under different schemas");
  double d = 0.0;
  for (std::size_t j = 0; j < c; ++j) {
    const double diff = x.continuous[j] - y.continuous[j];
    if (std::isnan(diff)) continue;
    d += weights[j] * diff * diff;
  }
  for (std::size_t j = 0; j < x.nominal.size(); ++j) {
    const int a = x.nominal[j], b = y.nominal[j];
    if (a == kMissingNominal || b == kMissingNominal) continue;
    if (a != b) d += weights[c + j];
  }
  return d;
}

[[nodiscard]] inline double distance(const EncodedVector& x, const EncodedVector& y, const FeatureSchema& schema) {
  const auto w = schema.encoded_weights();
  return distance(x, y, w);
}

[[nodiscard]] inline bool has_missing(const EncodedVector& v) {
  return std::any_of(v.continuous.begin(), v.continuous.end(), [](double x) { return std::isnan(x); }) ||
         std::any_of(v.nominal.begin(), v.nominal.end(), [](int s) { return s == kMissingNominal; });
}

}  // namespace txrisk
