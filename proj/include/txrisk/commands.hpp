#pragma once

// Pipeline commands behind the CLI: synth, cluster, assess, estimate.

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "txrisk/clustering.hpp"
#include "txrisk/error.hpp"
#include "txrisk/estimation.hpp"
#include "txrisk/features.hpp"
#include "txrisk/ingest.hpp"
#include "txrisk/io.hpp"
#include "txrisk/riskassess.hpp"
#include "txrisk/util.hpp"

namespace txrisk {

struct SynthSettings {
  int services = 20;
  int days = 730;
  Date start{2014, 1, 1};
  SynthConfig config;
};

struct RunConfig {
  std::filesystem::path weather, meter, calendar, spec, model, query;
  std::filesystem::path out_dir = "out";
  int k = 10;
  std::uint64_t seed = 42;
  int restarts = 1;
  unsigned threads = default_threads();
  FeatureSchema schema = FeatureSchema::default_schema();
  std::optional<std::pair<int, int>> k_sweep;
  ServiceRange n_range{1, 40};
  double budget = 500.0;
  std::optional<double> years;  ///< defaults to the model's day span / 365.25
  bool strict = false;
  ThresholdOptions threshold;
  int services = 20;  ///< estimate: services on the queried transformer
  bool svg = true;
  LoadOptions load;
  SynthSettings synth;
};

/// Parses "A..B" (or a single "A").
inline std::pair<int, int> parse_int_range(const std::string& text) {
  const auto dots = text.find("..");
  try {
    std::size_t used = 0;
    if (dots == std::string::npos) {
      const int v = std::stoi(text, &used);
      if (used != text.size()) throw std::invalid_argument(text);
      return {v, v};
    }
    const std::string a = text.substr(0, dots), b = text.substr(dots + 2);
    const int lo = std::stoi(a, &used);
    if (used != a.size()) throw std::invalid_argument(text);
    const int hi = std::stoi(b, &used);
    if (used != b.size()) throw std::invalid_argument(text);
    return {lo, hi};
  } catch (const std::logic_error&) {
    fail(ErrorCode::InvalidArgument, "bad range '" + text + "' (expected A..B)");
  }
}

/// Reads a JSON run configuration. Relative paths resolve against the
/// configuration file's directory.
inline RunConfig config_from_json(const Json& j, const std::filesystem::path& base_dir, RunConfig cfg = {}) {
  auto path = [&](const Json& p, const char* key, std::filesystem::path& dst) {
    if (!p.contains(key)) return;
    std::filesystem::path v = p.at(key).get<std::string>();
    dst = v.is_absolute() ? v : base_dir / v;
  };
  try {
    if (j.contains("paths")) {
      const auto& p = j.at("paths");
      path(p, "weather", cfg.weather);
      path(p, "meter", cfg.meter);
      path(p, "calendar", cfg.calendar);
      path(p, "spec", cfg.spec);
      path(p, "model", cfg.model);
      path(p, "query", cfg.query);
      path(p, "out", cfg.out_dir);
    }
    cfg.k = j.value("k", cfg.k);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.restarts = j.value("restarts", cfg.restarts);
    cfg.threads = j.value("threads", cfg.threads);
    if (j.contains("features")) cfg.schema = schema_from_json(j.at("features"));
    if (j.contains("k_sweep")) cfg.k_sweep = parse_int_range(j.at("k_sweep").get<std::string>());
    if (j.contains("n_range")) {
      const auto r = parse_int_range(j.at("n_range").get<std::string>());
      cfg.n_range = {r.first, r.second};
    }
    cfg.budget = j.value("budget", cfg.budget);
    if (j.contains("years")) cfg.years = j.at("years").get<double>();
    cfg.strict = j.value("strict", cfg.strict);
    cfg.services = j.value("services", cfg.services);
    cfg.svg = j.value("svg", cfg.svg);
    if (j.contains("threshold")) {
      const auto& t = j.at("threshold");
      cfg.threshold.lower = t.value("lower", cfg.threshold.lower);
      cfg.threshold.upper = t.value("upper", cfg.threshold.upper);
      cfg.threshold.tolerance = t.value("tolerance", cfg.threshold.tolerance);
    }
    if (j.contains("gaps")) {
      cfg.load.interpolate_gaps = j.at("gaps").value("interpolate", cfg.load.interpolate_gaps);
      cfg.load.max_interpolated_hours = j.at("gaps").value("max_hours", cfg.load.max_interpolated_hours);
    }
    if (j.contains("synth")) {
      const auto& s = j.at("synth");
      auto& c = cfg.synth.config;
      cfg.synth.services = s.value("services", cfg.synth.services);
      cfg.synth.days = s.value("days", cfg.synth.days);
      if (s.contains("start")) cfg.synth.start = Date::parse(s.at("start").get<std::string>());
      c.mean_temp_c = s.value("mean_temp_c", c.mean_temp_c);
      c.seasonal_amplitude_c = s.value("seasonal_amplitude_c", c.seasonal_amplitude_c);
      c.diurnal_amplitude_c = s.value("diurnal_amplitude_c", c.diurnal_amplitude_c);
      c.temp_noise_c = s.value("temp_noise_c", c.temp_noise_c);
      c.base_load_kw = s.value("base_load_kw", c.base_load_kw);
      c.service_spread = s.value("service_spread", c.service_spread);
      c.shape_amplitude = s.value("shape_amplitude", c.shape_amplitude);
      c.weekend_factor = s.value("weekend_factor", c.weekend_factor);
      c.heating_coef = s.value("heating_coef", c.heating_coef);
      c.heating_base_c = s.value("heating_base_c", c.heating_base_c);
      c.cooling_coef = s.value("cooling_coef", c.cooling_coef);
      c.cooling_base_c = s.value("cooling_base_c", c.cooling_base_c);
      c.load_noise = s.value("load_noise", c.load_noise);
      c.energy_only = s.value("energy_only", c.energy_only);
    }
  } catch (const Json::exception& e) {
    fail(ErrorCode::ParseError, std::string("config: ") + e.what());
  }
  return cfg;
}

inline RunConfig load_config(const std::filesystem::path& path, RunConfig defaults = {}) {
  return config_from_json(parse_json(read_text(path), path.string()), path.parent_path(), std::move(defaults));
}

struct CommandResult {
  std::vector<std::filesystem::path> files;
  std::vector<std::string> warnings;
};

namespace detail {

inline void require_path(const std::filesystem::path& p, const char* what) {
  require(!p.empty(), ErrorCode::InvalidArgument, std::string("missing ") + what + " path");
  require(std::filesystem::exists(p), ErrorCode::Io, std::string(what) + " file not found: " + p.string());
}

inline void emit(CommandResult& r, const std::filesystem::path& path, const std::string& body) {
  write_text(path, body);
  r.files.push_back(path);
}

}  // namespace detail

inline CommandResult run_synth(const RunConfig& cfg) {
  CommandResult r;
  const auto files = synth_dataset(cfg.seed, cfg.synth.services, cfg.synth.start, cfg.synth.days, cfg.synth.config);
  files.write(cfg.out_dir);
  for (const char* f : {"weather.csv", "meter.csv", "calendar.csv"}) r.files.push_back(cfg.out_dir / f);
  return r;
}

inline CommandResult run_cluster(const RunConfig& cfg) {
  detail::require_path(cfg.weather, "weather");
  detail::require_path(cfg.meter, "meter");
  detail::require_path(cfg.calendar, "calendar");
  CommandResult r;
  const auto ds = load_dataset(cfg.weather, cfg.meter, cfg.calendar, cfg.load);
  r.warnings = ds.warnings;
  const auto features = feature_vectors(ds, cfg.schema);
  KMeansOptions opts;
  opts.restarts = cfg.restarts;
  opts.threads = cfg.threads;

  if (cfg.k_sweep) {
    std::string sweep = "k,objective\n";
    for (int k = cfg.k_sweep->first; k <= cfg.k_sweep->second; ++k) {
      const auto m = kmeans(features, k, cfg.schema, cfg.seed, opts);
      char buf[64];
      std::snprintf(buf, sizeof buf, "%d,%.6f\n", k, m.objective);
      sweep += buf;
    }
    detail::emit(r, cfg.out_dir / "k_sweep.csv", sweep);
  }

  auto model = kmeans(features, cfg.k, cfg.schema, cfg.seed, opts);
  model.profiles = extract_profiles(model, ds.profiles);
  r.warnings.insert(r.warnings.end(), model.warnings.begin(), model.warnings.end());
  detail::emit(r, cfg.out_dir / "model.json", model_to_string(model));
  detail::emit(r, cfg.out_dir / "composition.csv", composition_csv(model));
  return r;
}

inline CommandResult run_assess(const RunConfig& cfg) {
  detail::require_path(cfg.spec, "spec");
  detail::require_path(cfg.model, "model");
  CommandResult r;
  const auto spec = load_spec(cfg.spec);
  const auto model = load_model(cfg.model);
  const double years = cfg.years.value_or(static_cast<double>(model.day_count) / 365.25);
  require(years > 0, ErrorCode::InvalidArgument, "years must be > 0");

  const auto thresholds = cluster_thresholds(spec, model, cfg.threshold);
  const auto months = month_cluster_matrix(model);
  const auto temps = max_services_by_temperature(spec, model, cfg.n_range, cfg.threads, cfg.threshold.simulation);
  const auto life = max_services_by_life(spec, model, cfg.n_range, cfg.budget, years, cfg.threads,
                                         cfg.threshold.simulation);

  detail::emit(r, cfg.out_dir / "thresholds.csv", thresholds_csv(thresholds));
  detail::emit(r, cfg.out_dir / "month_cluster.csv", month_matrix_csv(months, thresholds));
  detail::emit(r, cfg.out_dir / "temperature_grid.csv", temperature_grid_csv(temps));
  detail::emit(r, cfg.out_dir / "hotspot_grid.csv", temperature_grid_csv(temps, true));
  detail::emit(r, cfg.out_dir / "life_loss.csv", life_loss_csv(life));
  if (cfg.svg) detail::emit(r, cfg.out_dir / "month_distribution.svg", month_distribution_svg(months, thresholds));

  double min_peak = thresholds.front().max_peak_load_pu;
  for (const auto& t : thresholds) min_peak = std::min(min_peak, t.max_peak_load_pu);
  Json summary;
  summary["min_peak_threshold_pu"] = min_peak;
  summary["max_services_by_temperature"] = temps.max_services ? Json(*temps.max_services) : Json(nullptr);
  summary["max_services_by_life"] = life.max_services ? Json(*life.max_services) : Json(nullptr);
  summary["budget"] = cfg.budget;
  summary["years"] = years;
  summary["n_range"] = {cfg.n_range.first, cfg.n_range.last};
  detail::emit(r, cfg.out_dir / "summary.json", summary.dump(1) + "\n");
  return r;
}

inline CommandResult run_estimate(const RunConfig& cfg) {
  detail::require_path(cfg.spec, "spec");
  detail::require_path(cfg.model, "model");
  detail::require_path(cfg.query, "query");
  CommandResult r;
  const auto spec = load_spec(cfg.spec);
  const auto model = load_model(cfg.model);
  const auto days = parse_query(read_csv_file(cfg.query));
  const auto temps = per_cluster_max_top_oil(spec, model, cfg.services);
  EstimateOptions opts;
  opts.strict = cfg.strict;
  std::vector<DayEstimate> rows;
  for (const auto& d : days) {
    rows.push_back(estimate_day_temperature(d, model, temps, opts));
    if (rows.back().result.far_flag) r.warnings.push_back("query day " + d.date.str() + " is far from all clusters");
    if (rows.back().result.partial_features) {
      r.warnings.push_back("query day " + d.date.str() + " lacks some model features; distance uses the rest");
    }
  }
  detail::emit(r, cfg.out_dir / "estimates.csv", estimates_csv(rows));
  return r;
}

}  // namespace txrisk
