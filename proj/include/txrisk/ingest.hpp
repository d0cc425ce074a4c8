#pragma once

// Residential service operation dataset: weather, calendar and meter CSVs
// joined into per-service per-day records, plus a seeded synthetic generator
// that writes the same three file formats.
//
//   weather.csv   date,hour,temp_c
//   meter.csv     service_id,date,hour,kw   |   service_id,date,energy_kwh
//   calendar.csv  date,is_weekday,is_holiday        (Y/N flags)

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "txrisk/clustering.hpp"
#include "txrisk/date.hpp"
#include "txrisk/error.hpp"
#include "txrisk/features.hpp"
#include "txrisk/thermal.hpp"
#include "txrisk/util.hpp"

namespace txrisk {

// ----------------------------------------------------------------------------
// CSV

struct CsvRow {
  std::size_t line = 0;
  std::vector<std::string> fields;
};

struct CsvTable {
  std::string source;
  std::vector<std::string> header;
  std::vector<CsvRow> rows;
};

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  for (auto& f : out) {
    const auto b = f.find_first_not_of(" \t");
    const auto e = f.find_last_not_of(" \t");
    f = b == std::string::npos ? std::string() : f.substr(b, e - b + 1);
  }
  return out;
}

inline CsvTable read_csv(std::istream& in, const std::string& source) {
  CsvTable table;
  table.source = source;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (n == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (table.header.empty()) {
      table.header = std::move(fields);
      continue;
    }
    if (fields.size() != table.header.size()) {
      fail(ErrorCode::ParseError, source + " line " + std::to_string(n) + ": expected " +
                                      std::to_string(table.header.size()) + " columns, got " +
                                      std::to_string(fields.size()));
    }
    table.rows.push_back({n, std::move(fields)});
  }
  require(!table.header.empty(), ErrorCode::ParseError, source + ": missing header row");
  return table;
}

inline CsvTable read_csv_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::Io, "cannot open " + path.string());
  return read_csv(in, path.string());
}

namespace detail {

inline std::string where(const CsvTable& t, const CsvRow& r, std::size_t col) {
  return t.source + " line " + std::to_string(r.line) + " column " + std::to_string(col + 1) + " (" +
         t.header[col] + ")";
}

inline double parse_double(const CsvTable& t, const CsvRow& r, std::size_t col) {
  const auto& s = r.fields[col];
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(v)) {
    fail(ErrorCode::ParseError, where(t, r, col) + ": not a number '" + s + "'");
  }
  return v;
}

inline int parse_hour(const CsvTable& t, const CsvRow& r, std::size_t col) {
  const double h = parse_double(t, r, col);
  if (h != std::floor(h) || h < 0 || h > 23) fail(ErrorCode::ParseError, where(t, r, col) + ": hour must be 0-23");
  return static_cast<int>(h);
}

inline bool parse_flag(const CsvTable& t, const CsvRow& r, std::size_t col) {
  const auto& s = r.fields[col];
  if (s == "Y" || s == "y") return true;
  if (s == "N" || s == "n") return false;
  fail(ErrorCode::ParseError, where(t, r, col) + ": expected Y or N, got '" + s + "'");
}

inline Date parse_date(const CsvTable& t, const CsvRow& r, std::size_t col) {
  try {
    return Date::parse(r.fields[col]);
  } catch (const Error&) {
    fail(ErrorCode::ParseError, where(t, r, col) + ": bad date '" + r.fields[col] + "'");
  }
}

inline void expect_header(const CsvTable& t, const std::vector<std::string>& expected) {
  if (t.header != expected) {
    std::string want;
    for (const auto& h : expected) want += (want.empty() ? "" : ",") + h;
    fail(ErrorCode::ParseError, t.source + ": header must be '" + want + "'");
  }
}

}  // namespace detail

// ----------------------------------------------------------------------------
// Hourly series with gaps

using PartialDay = std::array<std::optional<double>, kHoursPerDay>;

struct GapFill {
  bool kept = false;
  int missing = 0;
  HourlySeries values{};
};

/// Linear interpolation across missing hours (nearest known value at the
/// day edges) when at most `max_missing` hours are absent.
inline GapFill fill_gaps(const PartialDay& day, int max_missing = 2) {
  GapFill out;
  std::vector<std::size_t> known;
  for (std::size_t h = 0; h < kHoursPerDay; ++h) {
    if (day[h]) known.push_back(h);
  }
  out.missing = static_cast<int>(kHoursPerDay - known.size());
  if (known.empty() || out.missing > max_missing) return out;
  for (std::size_t h = 0; h < kHoursPerDay; ++h) {
    if (day[h]) {
      out.values[h] = *day[h];
      continue;
    }
    const auto after = std::upper_bound(known.begin(), known.end(), h);
    if (after == known.begin()) {
      out.values[h] = *day[*after];
    } else if (after == known.end()) {
      out.values[h] = *day[known.back()];
    } else {
      const std::size_t a = *(after - 1), b = *after;
      const double f = static_cast<double>(h - a) / static_cast<double>(b - a);
      out.values[h] = *day[a] + f * (*day[b] - *day[a]);
    }
  }
  out.kept = true;
  return out;
}

// ----------------------------------------------------------------------------
// Dataset

struct CalendarDay {
  Date date;
  bool weekday = true;
  bool holiday = false;
};

/// Summary features of one service on one day, in raw units.
struct DayRecord {
  std::string service_id;
  Date date;
  double t_max = 0, t_min = 0, t_avg = 0;
  double l_max = 0, l_min = 0, l_avg = 0;
  bool weekday = true;  ///< false on weekends and statutory holidays
  bool has_profile = false;
  bool flagged = false;  ///< interpolated or DST-normalized
};

struct Dataset {
  std::vector<DayRecord> records;
  ProfileStore profiles;
  std::vector<std::string> warnings;
  std::size_t dropped_days = 0;

  [[nodiscard]] std::size_t flagged_count() const {
    return static_cast<std::size_t>(std::count_if(records.begin(), records.end(), [](const DayRecord& r) { return r.flagged; }));
  }
};

struct LoadOptions {
  bool interpolate_gaps = true;  ///< false: any missing hour is a GapError
  int max_interpolated_hours = 2;
};

namespace detail {

struct HourlyBucket {
  PartialDay values;
  bool duplicate_hour = false;
};

inline void put_hour(HourlyBucket& b, int hour, double v) {
  if (b.values[hour]) {
    b.duplicate_hour = true;  // repeated DST hour: keep the first reading
    return;
  }
  b.values[hour] = v;
}

/// Fills a bucket per the gap policy; returns nullopt when the day is dropped.
inline std::optional<HourlySeries> resolve_day(const HourlyBucket& b, const LoadOptions& options,
                                               const std::string& what, Dataset& ds, bool& flagged) {
  const auto fill = fill_gaps(b.values, options.interpolate_gaps ? options.max_interpolated_hours : 0);
  if (fill.missing > 0 && !options.interpolate_gaps) {
    fail(ErrorCode::GapError, what + " has " + std::to_string(fill.missing) + " missing hourly readings");
  }
  if (!fill.kept) {
    ds.warnings.push_back(what + ": " + std::to_string(fill.missing) + " missing hourly readings, day dropped");
    ++ds.dropped_days;
    return std::nullopt;
  }
  flagged = flagged || fill.missing > 0 || b.duplicate_hour;
  return fill.values;
}

inline void summarize(const HourlySeries& s, double& mx, double& mn, double& avg) {
  mx = *std::max_element(s.begin(), s.end());
  mn = *std::min_element(s.begin(), s.end());
  double sum = 0.0;
  for (double v : s) sum += v;
  avg = sum / kHoursPerDay;
}

}  // namespace detail

/// Joins the three tables into per-service per-day records over the
/// intersection of their coverage.
inline Dataset load_dataset(const CsvTable& weather, const CsvTable& meter, const CsvTable& calendar,
                            const LoadOptions& options = {}) {
  using detail::parse_date;
  using detail::parse_double;
  Dataset ds;

  detail::expect_header(weather, {"date", "hour", "temp_c"});
  std::map<long, std::pair<Date, detail::HourlyBucket>> weather_days;
  for (const auto& r : weather.rows) {
    const Date d = parse_date(weather, r, 0);
    const int h = detail::parse_hour(weather, r, 1);
    const double t = parse_double(weather, r, 2);
    if (t < -60 || t > 60) fail(ErrorCode::ParseError, detail::where(weather, r, 2) + ": temperature outside [-60, 60]");
    auto& slot = weather_days[d.serial()];
    slot.first = d;
    detail::put_hour(slot.second, h, t);
  }

  detail::expect_header(calendar, {"date", "is_weekday", "is_holiday"});
  std::map<long, CalendarDay> calendar_days;
  std::size_t calendar_mismatch = 0;
  for (const auto& r : calendar.rows) {
    CalendarDay c{parse_date(calendar, r, 0), detail::parse_flag(calendar, r, 1), detail::parse_flag(calendar, r, 2)};
    if (c.weekday != c.date.is_weekday()) ++calendar_mismatch;
    calendar_days[c.date.serial()] = c;
  }
  if (calendar_mismatch > 0) {
    ds.warnings.push_back(std::to_string(calendar_mismatch) + " calendar rows override the date's weekday");
  }

  const bool hourly = meter.header == std::vector<std::string>{"service_id", "date", "hour", "kw"};
  const bool energy = meter.header == std::vector<std::string>{"service_id", "date", "energy_kwh"};
  require(hourly || energy, ErrorCode::ParseError,
          meter.source + ": header must be 'service_id,date,hour,kw' or 'service_id,date,energy_kwh'");
  std::map<ProfileKey, std::pair<Date, detail::HourlyBucket>> meter_hourly;
  std::map<ProfileKey, std::pair<Date, double>> meter_energy;
  for (const auto& r : meter.rows) {
    const auto& sid = r.fields[0];
    if (sid.empty()) fail(ErrorCode::ParseError, detail::where(meter, r, 0) + ": empty service id");
    const Date d = parse_date(meter, r, 1);
    if (hourly) {
      const int h = detail::parse_hour(meter, r, 2);
      const double kw = parse_double(meter, r, 3);
      if (kw < 0) fail(ErrorCode::ParseError, detail::where(meter, r, 3) + ": negative demand");
      auto& slot = meter_hourly[{sid, d.serial()}];
      slot.first = d;
      detail::put_hour(slot.second, h, kw);
    } else {
      const double e = parse_double(meter, r, 2);
      if (e < 0) fail(ErrorCode::ParseError, detail::where(meter, r, 2) + ": negative energy");
      meter_energy[{sid, d.serial()}] = {d, e};
    }
  }

  // Weather days after the gap policy.
  std::map<long, std::pair<HourlySeries, bool>> ambient;
  for (const auto& [serial, slot] : weather_days) {
    bool flagged = false;
    if (auto s = detail::resolve_day(slot.second, options, "weather " + slot.first.str(), ds, flagged)) {
      ambient[serial] = {*s, flagged};
    }
  }

  auto add_record = [&](const std::string& sid, const Date& d, const HourlySeries* load, double l_avg_energy,
                        bool flagged) {
    const auto w = ambient.find(d.serial());
    const auto c = calendar_days.find(d.serial());
    if (w == ambient.end() || c == calendar_days.end()) return;
    DayRecord rec;
    rec.service_id = sid;
    rec.date = d;
    detail::summarize(w->second.first, rec.t_max, rec.t_min, rec.t_avg);
    if (load) {
      detail::summarize(*load, rec.l_max, rec.l_min, rec.l_avg);
      rec.has_profile = true;
      ds.profiles[{sid, d.serial()}] = RawDayProfile{*load, w->second.first};
    } else {
      rec.l_max = rec.l_min = rec.l_avg = l_avg_energy;
    }
    rec.weekday = c->second.weekday && !c->second.holiday;
    rec.flagged = flagged || w->second.second;
    ds.records.push_back(std::move(rec));
  };

  for (const auto& [key, slot] : meter_hourly) {
    bool flagged = false;
    const auto s = detail::resolve_day(slot.second, options, "service " + key.first + " " + slot.first.str(), ds, flagged);
    if (s) add_record(key.first, slot.first, &*s, 0.0, flagged);
  }
  for (const auto& [key, slot] : meter_energy) add_record(key.first, slot.first, nullptr, slot.second / 24.0, false);

  require(!ds.records.empty(), ErrorCode::EmptyIntersection, "weather, meter and calendar files share no service-days");
  std::set<long> dates;
  for (const auto& r : ds.records) dates.insert(r.date.serial());
  if (dates.size() < 730) {
    ds.warnings.push_back("dataset covers " + std::to_string(dates.size()) + " days; multiple years are recommended");
  }
  return ds;
}

inline Dataset load_dataset(const std::filesystem::path& weather_path, const std::filesystem::path& meter_path,
                            const std::filesystem::path& calendar_path, const LoadOptions& options = {}) {
  return load_dataset(read_csv_file(weather_path), read_csv_file(meter_path), read_csv_file(calendar_path), options);
}

/// Feature vectors for `schema` built from the records' summary features.
inline std::vector<FeatureVector> feature_vectors(const Dataset& ds, const FeatureSchema& schema) {
  require(schema.count(FeatureKind::Ordinal) == 0, ErrorCode::SchemaMismatch,
          "the dataset files carry no ordinal features");
  for (const auto* def : schema.of_kind(FeatureKind::Nominal)) {
    require(def->name == "C_weekday", ErrorCode::SchemaMismatch, "no data source for nominal feature '" + def->name + "'");
    require(std::find(def->statuses.begin(), def->statuses.end(), "Y") != def->statuses.end() &&
                std::find(def->statuses.begin(), def->statuses.end(), "N") != def->statuses.end(),
            ErrorCode::SchemaMismatch, "C_weekday must declare statuses Y and N");
  }
  const auto numeric = schema.of_kind(FeatureKind::Numeric);
  std::vector<FeatureVector> out;
  out.reserve(ds.records.size());
  for (const auto& r : ds.records) {
    FeatureVector fv;
    fv.service_id = r.service_id;
    fv.date = r.date;
    for (const auto* def : numeric) {
      const auto& n = def->name;
      if (n == "T_max") fv.numeric.push_back(r.t_max);
      else if (n == "T_min") fv.numeric.push_back(r.t_min);
      else if (n == "T_avg") fv.numeric.push_back(r.t_avg);
      else if (n == "L_max") fv.numeric.push_back(r.l_max);
      else if (n == "L_min") fv.numeric.push_back(r.l_min);
      else if (n == "L_avg") fv.numeric.push_back(r.l_avg);
      else fail(ErrorCode::SchemaMismatch, "no data source for numeric feature '" + n + "'");
    }
    for (std::size_t j = 0; j < schema.nominal_count(); ++j) fv.nominal.push_back(r.weekday ? "Y" : "N");
    out.push_back(std::move(fv));
  }
  return out;
}

// ----------------------------------------------------------------------------
// Synthetic data

struct SynthConfig {
  double mean_temp_c = 4.0;
  double seasonal_amplitude_c = 15.0;  ///< peak in mid-July
  double diurnal_amplitude_c = 5.0;    ///< peak at 15:00
  double temp_noise_c = 2.5;           ///< day-to-day anomaly std-dev
  double base_load_kw = 1.2;
  double service_spread = 0.15;        ///< std-dev of per-service scale
  double shape_amplitude = 0.8;        ///< morning/evening peaks relative to base
  double weekend_factor = 1.12;
  double heating_coef = 0.02;          ///< kW per °C below heating_base_c
  double heating_base_c = 15.0;
  double cooling_coef = 0.12;          ///< kW per °C above cooling_base_c
  double cooling_base_c = 20.0;
  double load_noise = 0.08;            ///< relative hourly noise
  bool energy_only = false;            ///< emit daily energy instead of hourly kW
};

struct SynthFiles {
  std::string weather;
  std::string meter;
  std::string calendar;

  void write(const std::filesystem::path& dir) const {
    std::filesystem::create_directories(dir);
    for (const auto& [name, body] : {std::pair{"weather.csv", &weather}, {"meter.csv", &meter}, {"calendar.csv", &calendar}}) {
      std::ofstream out(dir / name, std::ios::binary);
      require(out.good(), ErrorCode::Io, "cannot write " + (dir / name).string());
      out << *body;
    }
  }
};

inline bool is_statutory_holiday(const Date& d) {
  return (d.month() == 1 && d.day() == 1) || (d.month() == 7 && d.day() == 1) ||
         (d.month() == 12 && (d.day() == 25 || d.day() == 26));
}

inline SynthFiles synth_dataset(std::uint64_t seed, int services, const Date& start, int days,
                                const SynthConfig& cfg = {}) {
  require(services > 0 && days > 0, ErrorCode::InvalidArgument, "services and days must be > 0");
  Rng rng(seed);
  char buf[128];
  SynthFiles files;
  std::string& weather = files.weather;
  std::string& calendar = files.calendar;
  weather = "date,hour,temp_c\n";
  calendar = "date,is_weekday,is_holiday\n";

  std::vector<HourlySeries> temps(static_cast<std::size_t>(days));
  double anomaly = 0.0;
  for (int d = 0; d < days; ++d) {
    const Date date = start.plus_days(d);
    anomaly = 0.7 * anomaly + std::sqrt(1.0 - 0.49) * cfg.temp_noise_c * rng.normal();
    const double seasonal = cfg.seasonal_amplitude_c * std::cos(2.0 * M_PI * (date.day_of_year() - 196) / 365.25);
    for (std::size_t h = 0; h < kHoursPerDay; ++h) {
      const double diurnal = cfg.diurnal_amplitude_c * std::cos(2.0 * M_PI * (static_cast<double>(h) - 15.0) / 24.0);
      const double t = std::clamp(cfg.mean_temp_c + seasonal + diurnal + anomaly, -59.0, 59.0);
      std::snprintf(buf, sizeof buf, "%.2f", t);
      temps[d][h] = std::strtod(buf, nullptr);
      weather += date.str() + "," + std::to_string(h) + "," + buf + "\n";
    }
    calendar += date.str() + (date.is_weekday() ? ",Y," : ",N,") + (is_statutory_holiday(date) ? "Y\n" : "N\n");
  }

  std::vector<double> scale(static_cast<std::size_t>(services));
  for (auto& s : scale) s = std::max(0.5, 1.0 + cfg.service_spread * rng.normal());
  HourlySeries shape{};
  for (std::size_t h = 0; h < kHoursPerDay; ++h) {
    const double x = static_cast<double>(h);
    shape[h] = 1.0 + cfg.shape_amplitude * (0.5 * std::exp(-std::pow((x - 8.0) / 2.0, 2)) +
                                             std::exp(-std::pow((x - 19.0) / 3.0, 2)) - 0.3);
  }

  std::string& meter = files.meter;
  meter = cfg.energy_only ? "service_id,date,energy_kwh\n" : "service_id,date,hour,kw\n";
  for (int s = 0; s < services; ++s) {
    std::snprintf(buf, sizeof buf, "S%03d", s + 1);
    const std::string sid = buf;
    for (int d = 0; d < days; ++d) {
      const Date date = start.plus_days(d);
      const bool workday = date.is_weekday() && !is_statutory_holiday(date);
      double energy = 0.0;
      for (std::size_t h = 0; h < kHoursPerDay; ++h) {
        const double t = temps[d][h];
        double kw = cfg.base_load_kw * scale[s] * shape[h] * (workday ? 1.0 : cfg.weekend_factor) +
                    cfg.heating_coef * std::max(0.0, cfg.heating_base_c - t) +
                    cfg.cooling_coef * std::max(0.0, t - cfg.cooling_base_c);
        kw *= 1.0 + cfg.load_noise * rng.normal();
        kw = std::max(0.0, kw);
        if (cfg.energy_only) {
          energy += kw;
          continue;
        }
        std::snprintf(buf, sizeof buf, "%.3f", kw);
        meter += sid + "," + date.str() + "," + std::to_string(h) + "," + buf + "\n";
      }
      if (cfg.energy_only) {
        std::snprintf(buf, sizeof buf, "%.3f", energy);
        meter += sid + "," + date.str() + "," + buf + "\n";
      }
    }
  }
  return files;
}

}  // namespace txrisk
