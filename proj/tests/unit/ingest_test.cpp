#include "txrisk/ingest.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "test_support.hpp"

using namespace txrisk;

namespace {

CsvTable table(const std::string& text, const std::string& name = "test.csv") {
  std::istringstream in(text);
  return read_csv(in, name);
}

struct Files {
  std::string weather = "date,hour,temp_c\n";
  std::string meter = "service_id,date,hour,kw\n";
  std::string calendar = "date,is_weekday,is_holiday\n";

  Dataset load(const LoadOptions& opts = {}) const {
    return load_dataset(table(weather, "weather.csv"), table(meter, "meter.csv"), table(calendar, "calendar.csv"), opts);
  }
};

// services × days of complete hourly data; temp = hour, load = 1 + hour/24.
Files complete_files(int services, int days, const Date& start = Date(2015, 3, 2)) {
  Files f;
  for (int d = 0; d < days; ++d) {
    const Date date = start.plus_days(d);
    for (int h = 0; h < 24; ++h) f.weather += date.str() + "," + std::to_string(h) + "," + std::to_string(h) + "\n";
    f.calendar += date.str() + (date.is_weekday() ? ",Y,N\n" : ",N,N\n");
    for (int s = 0; s < services; ++s) {
      for (int h = 0; h < 24; ++h) {
        f.meter += "S" + std::to_string(s) + "," + date.str() + "," + std::to_string(h) + "," +
                   std::to_string(1.0 + h / 24.0) + "\n";
      }
    }
  }
  return f;
}

std::string drop_meter_hours(const std::string& meter, const std::string& prefix, std::initializer_list<int> hours) {
  std::istringstream in(meter);
  std::string out, line;
  while (std::getline(in, line)) {
    bool skip = false;
    for (int h : hours) skip = skip || line == prefix + std::to_string(h) + "," + std::to_string(1.0 + h / 24.0);
    if (!skip) out += line + "\n";
  }
  return out;
}

}  // namespace

TEST(ReadCsv, StripsBomAndCarriageReturns) {
  const auto t = table("\xEF\xBB\xBF" "a,b\r\n1,2\r\n");
  EXPECT_EQ(t.header, (std::vector<std::string>{"a", "b"}));
  ASSERT_EQ(t.rows.size(), 1u);
  EXPECT_EQ(t.rows[0].fields, (std::vector<std::string>{"1", "2"}));
}

TEST(ReadCsv, ColumnCountMismatchIsParseError) {
  try {
    (void)table("a,b\n1,2,3\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ParseError);
  }
}

TEST(LoadDataset, Cardinality) {
  const auto ds = complete_files(2, 3).load();
  EXPECT_EQ(ds.records.size(), 6u);
  EXPECT_EQ(ds.profiles.size(), 6u);
  EXPECT_EQ(ds.flagged_count(), 0u);
  for (const auto& r : ds.records) {
    EXPECT_EQ(r.t_max, 23.0);
    EXPECT_EQ(r.t_min, 0.0);
    EXPECT_DOUBLE_EQ(r.t_avg, 11.5);
    EXPECT_LE(r.l_min, r.l_avg);
    EXPECT_LE(r.l_avg, r.l_max);
  }
}

TEST(LoadDataset, OneMissingHourIsInterpolatedAndFlagged) {
  auto f = complete_files(1, 2);
  const std::string day = Date(2015, 3, 2).str();
  f.meter = drop_meter_hours(f.meter, "S0," + day + ",", {10});
  const auto ds = f.load();
  ASSERT_EQ(ds.records.size(), 2u);
  EXPECT_EQ(ds.flagged_count(), 1u);
  const auto& p = ds.profiles.at({"S0", Date(2015, 3, 2).serial()});
  EXPECT_NEAR(p.load_kva[10], 1.0 + 10 / 24.0, 1e-6);
}

TEST(FillGaps, LinearAndEdgeFill) {
  PartialDay day;
  for (int h = 0; h < 24; ++h) day[h] = static_cast<double>(h);
  day[5].reset();
  day[6].reset();
  auto g = fill_gaps(day);
  ASSERT_TRUE(g.kept);
  EXPECT_EQ(g.missing, 2);
  EXPECT_DOUBLE_EQ(g.values[5], 5.0);
  EXPECT_DOUBLE_EQ(g.values[6], 6.0);
  day[6] = 6.0;
  day[0].reset();
  g = fill_gaps(day);
  EXPECT_DOUBLE_EQ(g.values[0], 1.0);
  day[1].reset();
  day[2].reset();
  EXPECT_FALSE(fill_gaps(day).kept);
}

TEST(LoadDataset, ThreeMissingHoursDropTheDay) {
  auto f = complete_files(1, 2);
  f.meter = drop_meter_hours(f.meter, "S0," + Date(2015, 3, 2).str() + ",", {1, 2, 3});
  const auto ds = f.load();
  EXPECT_EQ(ds.records.size(), 1u);
  EXPECT_EQ(ds.dropped_days, 1u);
}

TEST(LoadDataset, GapErrorWhenInterpolationDisabled) {
  auto f = complete_files(1, 2);
  f.meter = drop_meter_hours(f.meter, "S0," + Date(2015, 3, 2).str() + ",", {4});
  LoadOptions opts;
  opts.interpolate_gaps = false;
  try {
    (void)f.load(opts);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::GapError);
  }
}

TEST(LoadDataset, DuplicateHourKeepsFirstAndFlags) {
  auto f = complete_files(1, 1);
  f.meter += "S0," + Date(2015, 3, 2).str() + ",2,99\n";
  const auto ds = f.load();
  EXPECT_EQ(ds.flagged_count(), 1u);
  EXPECT_NEAR(ds.profiles.begin()->second.load_kva[2], 1.0 + 2 / 24.0, 1e-6);
}

TEST(LoadDataset, EmptyIntersection) {
  auto f = complete_files(1, 2);
  f.calendar = "date,is_weekday,is_holiday\n2001-01-01,Y,N\n";
  try {
    (void)f.load();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyIntersection);
  }
}

TEST(LoadDataset, ParseErrorsReportLocation) {
  auto f = complete_files(1, 1);
  f.weather += "2015-03-03,25,10\n";
  try {
    (void)f.load();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ParseError);
    EXPECT_NE(std::string(e.what()).find("weather.csv"), std::string::npos);
  }
  f = complete_files(1, 1);
  f.weather += "2015-03-03,1,75\n";
  EXPECT_THROW((void)f.load(), Error);
  f = complete_files(1, 1);
  f.calendar = "date,weekday\n";
  EXPECT_THROW((void)f.load(), Error);
}

TEST(LoadDataset, HolidayIsNotAWeekday) {
  auto f = complete_files(1, 1, Date(2015, 7, 1));
  f.calendar = "date,is_weekday,is_holiday\n2015-07-01,Y,Y\n";
  const auto ds = f.load();
  EXPECT_FALSE(ds.records[0].weekday);
}

TEST(LoadDataset, EnergyOnlyMeter) {
  auto f = complete_files(1, 1);
  f.meter = "service_id,date,energy_kwh\nS0," + Date(2015, 3, 2).str() + ",48\n";
  const auto ds = f.load();
  ASSERT_EQ(ds.records.size(), 1u);
  EXPECT_DOUBLE_EQ(ds.records[0].l_avg, 2.0);
  EXPECT_FALSE(ds.records[0].has_profile);
  EXPECT_TRUE(ds.profiles.empty());
}

TEST(FeatureVectors, DefaultSchemaAndUnsupportedFeatures) {
  const auto ds = complete_files(2, 2).load();
  const auto fvs = feature_vectors(ds, FeatureSchema::default_schema());
  ASSERT_EQ(fvs.size(), 4u);
  EXPECT_EQ(fvs[0].numeric.size(), 4u);
  const FeatureSchema ordinal({{"rain", FeatureKind::Ordinal, {"none", "light", "heavy"}, 1.0}});
  try {
    (void)feature_vectors(ds, ordinal);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SchemaMismatch);
  }
}

TEST(SynthDataset, Deterministic) {
  const auto a = synth_dataset(7, 3, Date(2014, 1, 1), 40);
  const auto b = synth_dataset(7, 3, Date(2014, 1, 1), 40);
  const auto c = synth_dataset(8, 3, Date(2014, 1, 1), 40);
  EXPECT_EQ(a.weather, b.weather);
  EXPECT_EQ(a.meter, b.meter);
  EXPECT_EQ(a.calendar, b.calendar);
  EXPECT_NE(a.meter, c.meter);
}

TEST(SynthDataset, RoundTripWithoutGaps) {
  const auto files = synth_dataset(3, 4, Date(2014, 1, 1), 60);
  const auto ds = load_dataset(table(files.weather), table(files.meter), table(files.calendar));
  EXPECT_EQ(ds.records.size(), 240u);
  EXPECT_EQ(ds.dropped_days, 0u);
  EXPECT_EQ(ds.flagged_count(), 0u);
  for (const auto& r : ds.records) {
    EXPECT_LE(r.t_min, r.t_avg);
    EXPECT_LE(r.t_avg, r.t_max);
  }
}

TEST(SynthDataset, WinterLoadExceedsSummerWithHeating) {
  SynthConfig cfg;
  cfg.cooling_coef = 0.0;
  cfg.heating_coef = 0.05;
  const auto files = synth_dataset(5, 3, Date(2014, 1, 1), 365, cfg);
  const auto ds = load_dataset(table(files.weather), table(files.meter), table(files.calendar));
  double winter = 0, summer = 0;
  int nw = 0, ns = 0;
  for (const auto& r : ds.records) {
    const int m = r.date.month();
    if (m == 12 || m <= 2) {
      winter += r.l_avg;
      ++nw;
    } else if (m >= 6 && m <= 8) {
      summer += r.l_avg;
      ++ns;
    }
  }
  EXPECT_GT(winter / nw, summer / ns);
}

TEST(SynthDataset, NoNoiseNoCouplingIsConstant) {
  SynthConfig cfg;
  cfg.load_noise = 0;
  cfg.heating_coef = 0;
  cfg.cooling_coef = 0;
  cfg.shape_amplitude = 0;
  cfg.weekend_factor = 1;
  cfg.service_spread = 0;
  const auto files = synth_dataset(9, 2, Date(2014, 1, 1), 10, cfg);
  const auto ds = load_dataset(table(files.weather), table(files.meter), table(files.calendar));
  for (const auto& [key, p] : ds.profiles)
    for (double v : p.load_kva) EXPECT_DOUBLE_EQ(v, cfg.base_load_kw);
}

TEST(SynthDataset, EnergyOnlyFilesLoad) {
  SynthConfig cfg;
  cfg.energy_only = true;
  const auto files = synth_dataset(2, 2, Date(2014, 1, 1), 5, cfg);
  const auto ds = load_dataset(table(files.weather), table(files.meter), table(files.calendar));
  EXPECT_EQ(ds.records.size(), 10u);
  EXPECT_TRUE(ds.profiles.empty());
}

TEST(SynthDataset, WritesFiles) {
  const auto dir = txrisk::testing::scratch_dir("synth");
  synth_dataset(1, 1, Date(2014, 1, 1), 3).write(dir);
  const auto ds = load_dataset(dir / "weather.csv", dir / "meter.csv", dir / "calendar.csv");
  EXPECT_EQ(ds.records.size(), 3u);
  std::filesystem::remove_all(dir);
}
