#pragma once

// File formats: transformer spec JSON, cluster model JSON, query CSV and
// the report tables (CSV + SVG).

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "txrisk/clustering.hpp"
#include "txrisk/error.hpp"
#include "txrisk/estimation.hpp"
#include "txrisk/features.hpp"
#include "txrisk/ingest.hpp"
#include "txrisk/riskassess.hpp"
#include "txrisk/thermal.hpp"

namespace txrisk {

using Json = nlohmann::ordered_json;

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorCode::Io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text(const std::filesystem::path& path, const std::string& body) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  require(out.good(), ErrorCode::Io, "cannot write " + path.string());
  out << body;
}

inline Json parse_json(const std::string& text, const std::string& source) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    fail(ErrorCode::ParseError, source + ": " + e.what());
  }
}

/// Formats with printf-style precision, mapping -0.00 to 0.00.
inline std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  std::string s = buf;
  if (s[0] == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

// ----------------------------------------------------------------------------
// Transformer spec

inline TransformerSpec spec_from_json(const Json& j, const std::string& source = "spec") {
  try {
    TransformerSpec s;
    s.rated_kva = j.at("rated_kva").get<double>();
    s.top_oil_rise_rated = j.at("top_oil_rise_rated_c").get<double>();
    s.hotspot_differential = j.at("hotspot_differential_c").get<double>();
    s.loss_ratio = j.at("loss_ratio").get<double>();
    s.oil_time_constant = j.at("oil_time_constant_h").get<double>();
    s.winding_time_constant = j.at("winding_time_constant_h").get<double>();
    s.exponent_n = j.value("exponent_n", 0.8);
    s.exponent_m = j.value("exponent_m", 0.8);
    s.top_oil_limit = j.value("top_oil_limit_c", 120.0);
    s.hotspot_limit = j.value("hotspot_limit_c", 200.0);
    s.replacement_cost = j.at("replacement_cost").get<double>();
    s.validate();
    return s;
  } catch (const Json::exception& e) {
    fail(ErrorCode::ParseError, source + ": " + e.what());
  }
}

inline Json spec_to_json(const TransformerSpec& s) {
  return Json{{"rated_kva", s.rated_kva},
              {"top_oil_rise_rated_c", s.top_oil_rise_rated},
              {"hotspot_differential_c", s.hotspot_differential},
              {"loss_ratio", s.loss_ratio},
              {"oil_time_constant_h", s.oil_time_constant},
              {"winding_time_constant_h", s.winding_time_constant},
              {"exponent_n", s.exponent_n},
              {"exponent_m", s.exponent_m},
              {"top_oil_limit_c", s.top_oil_limit},
              {"hotspot_limit_c", s.hotspot_limit},
              {"replacement_cost", s.replacement_cost}};
}

inline TransformerSpec load_spec(const std::filesystem::path& path) {
  return spec_from_json(parse_json(read_text(path), path.string()), path.string());
}

// ----------------------------------------------------------------------------
// Feature schema

inline Json schema_to_json(const FeatureSchema& schema) {
  Json arr = Json::array();
  for (const auto& d : schema.defs()) {
    Json f{{"name", d.name}, {"kind", to_string(d.kind)}};
    if (d.kind != FeatureKind::Numeric) f["statuses"] = d.statuses;
    f["weight"] = d.weight;
    arr.push_back(f);
  }
  return arr;
}

inline FeatureSchema schema_from_json(const Json& arr) {
  try {
    std::vector<FeatureDef> defs;
    for (const auto& f : arr) {
      FeatureDef d;
      d.name = f.at("name").get<std::string>();
      d.kind = parse_feature_kind(f.at("kind").get<std::string>());
      if (f.contains("statuses")) d.statuses = f.at("statuses").get<std::vector<std::string>>();
      d.weight = f.value("weight", 1.0);
      defs.push_back(std::move(d));
    }
    return FeatureSchema(std::move(defs));
  } catch (const Json::exception& e) {
    fail(ErrorCode::ParseError, std::string("feature schema: ") + e.what());
  }
}

// ----------------------------------------------------------------------------
// Cluster model

inline Json series_json(const HourlySeries& s) { return Json(std::vector<double>(s.begin(), s.end())); }

inline HourlySeries series_from_json(const Json& j) {
  const auto v = j.get<std::vector<double>>();
  require(v.size() == kHoursPerDay, ErrorCode::ParseError, "profile must have 24 entries");
  HourlySeries s{};
  std::copy(v.begin(), v.end(), s.begin());
  return s;
}

inline Json model_to_json(const ClusterModel& m) {
  Json j;
  j["format"] = "txrisk-cluster-model";
  j["version"] = 1;
  j["k"] = m.k;
  j["seed"] = m.seed;
  j["objective"] = m.objective;
  j["iterations"] = m.iterations;
  j["service_count"] = m.service_count;
  j["day_count"] = m.day_count;
  j["far_threshold"] = m.far_threshold;
  j["schema"] = schema_to_json(m.schema);
  j["normalization"] = {{"min", m.norm.min}, {"max", m.norm.max}};
  const auto comp = composition(m);
  const auto numeric = m.schema.of_kind(FeatureKind::Numeric);
  const auto ordinal = m.schema.of_kind(FeatureKind::Ordinal);
  const auto nominal = m.schema.of_kind(FeatureKind::Nominal);
  Json clusters = Json::array();
  for (std::size_t c = 0; c < m.clusters.size(); ++c) {
    const auto& cl = m.clusters[c];
    Json jc;
    jc["id"] = cl.id;
    jc["member_count"] = cl.member_count;
    jc["centroid"] = {{"continuous", cl.centroid.continuous}, {"nominal", cl.centroid.nominal}};
    Json raw;
    for (std::size_t f = 0; f < numeric.size(); ++f) raw[numeric[f]->name] = comp[c].numeric[f];
    for (std::size_t f = 0; f < ordinal.size(); ++f) raw[ordinal[f]->name] = comp[c].ordinal[f];
    for (std::size_t f = 0; f < nominal.size(); ++f) raw[nominal[f]->name] = comp[c].nominal[f];
    jc["centroid_raw"] = raw;
    if (c < m.profiles.size()) {
      jc["profile"] = {{"load_kva", series_json(m.profiles[c].load_kva)},
                       {"ambient_c", series_json(m.profiles[c].ambient_c)}};
    }
    Json members = Json::array();
    for (const auto& ref : cl.members) members.push_back(Json::array({ref.service_id, ref.date.str()}));
    jc["members"] = std::move(members);
    clusters.push_back(std::move(jc));
  }
  j["clusters"] = std::move(clusters);
  j["warnings"] = m.warnings;
  return j;
}

inline ClusterModel model_from_json(const Json& j, const std::string& source = "model") {
  try {
    require(j.value("format", "") == "txrisk-cluster-model", ErrorCode::ParseError, source + ": not a cluster model");
    ClusterModel m;
    m.k = j.at("k").get<int>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.objective = j.at("objective").get<double>();
    m.iterations = j.value("iterations", 0);
    m.service_count = j.at("service_count").get<std::size_t>();
    m.day_count = j.at("day_count").get<std::size_t>();
    m.far_threshold = j.at("far_threshold").get<double>();
    m.schema = schema_from_json(j.at("schema"));
    m.norm.min = j.at("normalization").at("min").get<std::vector<double>>();
    m.norm.max = j.at("normalization").at("max").get<std::vector<double>>();
    require(m.norm.size() == m.schema.numeric_count(), ErrorCode::ParseError, source + ": normalization size mismatch");
    bool all_profiles = true;
    for (const auto& jc : j.at("clusters")) {
      Cluster cl;
      cl.id = jc.at("id").get<int>();
      cl.member_count = jc.at("member_count").get<std::size_t>();
      cl.centroid.continuous = jc.at("centroid").at("continuous").get<std::vector<double>>();
      cl.centroid.nominal = jc.at("centroid").at("nominal").get<std::vector<int>>();
      require(cl.centroid.continuous.size() == m.schema.continuous_count() &&
                  cl.centroid.nominal.size() == m.schema.nominal_count(),
              ErrorCode::ParseError, source + ": centroid does not match schema");
      for (const auto& ref : jc.at("members")) {
        cl.members.push_back({ref.at(0).get<std::string>(), Date::parse(ref.at(1).get<std::string>())});
      }
      require(cl.members.size() == cl.member_count, ErrorCode::ParseError, source + ": member_count mismatch");
      if (jc.contains("profile")) {
        m.profiles.push_back({series_from_json(jc["profile"].at("load_kva")), series_from_json(jc["profile"].at("ambient_c"))});
      } else {
        all_profiles = false;
      }
      m.clusters.push_back(std::move(cl));
    }
    if (!all_profiles) m.profiles.clear();
    require(static_cast<int>(m.clusters.size()) == m.k, ErrorCode::ParseError, source + ": cluster count != k");
    if (j.contains("warnings")) m.warnings = j["warnings"].get<std::vector<std::string>>();
    return m;
  } catch (const Json::exception& e) {
    fail(ErrorCode::ParseError, source + ": " + e.what());
  }
}

inline std::string model_to_string(const ClusterModel& m) { return model_to_json(m).dump(1) + "\n"; }

inline ClusterModel load_model(const std::filesystem::path& path) {
  return model_from_json(parse_json(read_text(path), path.string()), path.string());
}

// ----------------------------------------------------------------------------
// Query file

inline std::vector<QueryDay> parse_query(const CsvTable& t) {
  detail::expect_header(t, {"date", "t_max_c", "t_min_c", "t_avg_c", "l_avg_kva", "weekday"});
  std::vector<QueryDay> out;
  for (const auto& r : t.rows) {
    QueryDay q;
    q.date = detail::parse_date(t, r, 0);
    q.t_max = detail::parse_double(t, r, 1);
    q.t_min = detail::parse_double(t, r, 2);
    q.t_avg = detail::parse_double(t, r, 3);
    q.l_avg = detail::parse_double(t, r, 4);
    q.weekday = detail::parse_flag(t, r, 5);
    out.push_back(q);
  }
  return out;
}

// ----------------------------------------------------------------------------
// Report tables

inline std::string composition_csv(const ClusterModel& m) {
  std::string out = "Cluster ID,Number of Members";
  for (const auto kind : {FeatureKind::Numeric, FeatureKind::Ordinal, FeatureKind::Nominal}) {
    for (const auto* d : m.schema.of_kind(kind)) out += "," + d->name;
  }
  out += "\n";
  for (const auto& row : composition(m)) {
    out += std::to_string(row.cluster_id) + "," + std::to_string(row.member_count);
    for (double v : row.numeric) out += "," + fixed(v, 2);
    for (double v : row.ordinal) out += "," + fixed(v, 3);
    for (const auto& s : row.nominal) out += "," + s;
    out += "\n";
  }
  return out;
}

inline std::string thresholds_csv(const std::vector<ThresholdResult>& results) {
  std::string out =
      "Cluster ID,Maximum 24-hr average loading (p.u.),Maximum 24-hr peak loading (p.u.),Binding limit,Impact Ranking\n";
  for (const auto& r : results) {
    out += std::to_string(r.cluster_id) + "," + fixed(r.max_avg_load_pu, 2) + "," + fixed(r.max_peak_load_pu, 2) + "," +
           to_string(r.binding_limit) + "," + std::to_string(r.impact_rank) + "\n";
  }
  return out;
}

/// Month x cluster day counts with columns ordered by impact rank.
inline std::string month_matrix_csv(const MonthClusterMatrix& matrix, const std::vector<ThresholdResult>& ranked) {
  static const char* months[] = {"Jan", "Feb", "Mar", "Apr", "May", "June",
                                 "July", "Aug", "Sep", "Oct", "Nov", "Dec"};
  std::vector<std::size_t> columns(ranked.size());
  for (std::size_t c = 0; c < ranked.size(); ++c) columns[ranked[c].impact_rank - 1] = c;
  std::string out = "Mth";
  for (std::size_t r = 0; r < columns.size(); ++r) out += ",Imp " + std::to_string(r + 1);
  out += "\n";
  for (std::size_t m = 0; m < 12; ++m) {
    out += months[m];
    for (auto c : columns) out += "," + std::to_string(matrix.counts[m][c]);
    out += "\n";
  }
  const auto sums = matrix.column_sums();
  out += "Sum";
  for (auto c : columns) out += "," + std::to_string(sums[c]);
  out += "\nCluster ID";
  for (auto c : columns) out += "," + std::to_string(ranked[c].cluster_id);
  out += "\n";
  return out;
}

inline std::string temperature_grid_csv(const TemperatureStudy& s, bool hotspot = false) {
  auto pick = [hotspot](const TemperatureCell& c) { return hotspot ? c.max_hotspot : c.max_top_oil; };
  std::string out = "Cluster ID";
  for (int n : s.services) out += ",N=" + std::to_string(n);
  out += "\n";
  for (std::size_t c = 0; c < s.cluster_ids.size(); ++c) {
    out += std::to_string(s.cluster_ids[c]);
    for (const auto& cell : s.cells[c]) out += "," + fixed(pick(cell), 0);
    out += "\n";
  }
  out += "Max";
  for (const auto& cell : s.max_row) out += "," + fixed(pick(cell), 0);
  out += "\n";
  return out;
}

inline std::string life_loss_csv(const LifeStudy& s) {
  std::string out = "Cluster ID";
  for (int n : s.services) out += ",N=" + std::to_string(n);
  out += ",# of Days\n";
  for (std::size_t c = 0; c < s.cluster_ids.size(); ++c) {
    out += std::to_string(s.cluster_ids[c]);
    for (double v : s.daily_loss[c]) out += "," + fixed(v, 1);
    out += "," + fixed(s.cluster_days[c], 1) + "\n";
  }
  auto footer = [&](const char* label, const std::vector<double>& values) {
    out += label;
    for (double v : values) out += "," + fixed(v, 1);
    out += ",-\n";
  };
  footer("Total Loss of Life (Days)", s.total_days);
  footer("Average annual Loss of Life (Days)", s.annual_days);
  footer("Economic Loss ($/year)", s.economic_loss);
  return out;
}

inline std::string estimates_csv(const std::vector<DayEstimate>& rows) {
  std::string out = "day,date,t_max_c,t_min_c,t_avg_c,l_avg_kva,weekday,est_max_top_oil_c,far_flag\n";
  int i = 0;
  for (const auto& r : rows) {
    out += std::to_string(++i) + "," + r.day.date.str() + "," + fixed(r.day.t_max, 2) + "," + fixed(r.day.t_min, 2) +
           "," + fixed(r.day.t_avg, 2) + "," + fixed(r.day.l_avg, 2) + "," + (r.day.weekday ? "Y" : "N") + "," +
           fixed(r.result.estimate, 1) + "," + (r.result.far_flag ? "Y" : "N") + "\n";
  }
  return out;
}

/// Grouped bar chart: one group per cluster (impact order), one bar per month.
inline std::string month_distribution_svg(const MonthClusterMatrix& matrix, const std::vector<ThresholdResult>& ranked) {
  static const char* colors[] = {"#1f77b4", "#aec7e8", "#ff7f0e", "#ffbb78", "#2ca02c", "#98df8a",
                                 "#d62728", "#ff9896", "#9467bd", "#c5b0d5", "#8c564b", "#c49c94"};
  static const char* months[] = {"Jan", "Feb", "Mar", "Apr", "May", "Jun", "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};
  const std::size_t k = ranked.size();
  std::vector<std::size_t> columns(k);
  for (std::size_t c = 0; c < k; ++c) columns[ranked[c].impact_rank - 1] = c;
  std::size_t peak = 1;
  for (const auto& row : matrix.counts) {
    for (auto v : row) peak = std::max(peak, v);
  }
  const double left = 50, top = 20, height = 300, bar = 6, group = 12 * bar + 12;
  const double width = left + group * static_cast<double>(k) + 90;
  std::string svg;
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" height=\"%.0f\" font-family=\"sans-serif\" "
                "font-size=\"10\">\n",
                width, top + height + 40);
  svg += buf;
  std::snprintf(buf, sizeof buf, "<line x1=\"%.0f\" y1=\"%.0f\" x2=\"%.0f\" y2=\"%.0f\" stroke=\"black\"/>\n", left,
                top + height, left + group * static_cast<double>(k), top + height);
  svg += buf;
  for (std::size_t g = 0; g < k; ++g) {
    const auto c = columns[g];
    for (std::size_t m = 0; m < 12; ++m) {
      const double h = height * static_cast<double>(matrix.counts[m][c]) / static_cast<double>(peak);
      std::snprintf(buf, sizeof buf,
                    "<rect x=\"%.1f\" y=\"%.2f\" width=\"%.1f\" height=\"%.2f\" fill=\"%s\"><title>Imp %zu %s: "
                    "%zu</title></rect>\n",
                    left + group * static_cast<double>(g) + bar * static_cast<double>(m), top + height - h, bar, h,
                    colors[m], g + 1, months[m], matrix.counts[m][c]);
      svg += buf;
    }
    std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.0f\">Imp %zu</text>\n",
                  left + group * static_cast<double>(g) + 2 * bar, top + height + 14, g + 1);
    svg += buf;
  }
  for (std::size_t m = 0; m < 12; ++m) {
    const double x = left + group * static_cast<double>(k) + 10, y = top + 12 * static_cast<double>(m);
    std::snprintf(buf, sizeof buf,
                  "<rect x=\"%.0f\" y=\"%.0f\" width=\"8\" height=\"8\" fill=\"%s\"/><text x=\"%.0f\" "
                  "y=\"%.0f\">%s</text>\n",
                  x, y, colors[m], x + 12, y + 8, months[m]);
    svg += buf;
  }
  std::snprintf(buf, sizeof buf, "<text x=\"5\" y=\"%.0f\">%zu</text>\n<text x=\"5\" y=\"%.0f\">0</text>\n", top + 4,
                peak, top + height);
  svg += buf;
  svg += "</svg>\n";
  return svg;
}

}  // namespace txrisk
