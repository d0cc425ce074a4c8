#pragma once

#include <cmath>
#include <map>
#include <numeric>
#include <span>
#include <string>

#include "txrisk/error.hpp"
#include "txrisk/thermal.hpp"

namespace txrisk {

/// Normal insulation life at the 110 °C reference hottest-spot, days.
inline constexpr double kNormalLifeDays = 7500.0;

/// Arrhenius aging acceleration relative to a 110 °C hottest-spot.
[[nodiscard]] inline double aging_acceleration(double hotspot_c) {
  require(hotspot_c > -273.0, ErrorCode::InvalidArgument, "hotspot temperature below absolute zero");
  return std::exp(15000.0 / 383.0 - 15000.0 / (hotspot_c + 273.0));
}

/// Mean of the hourly aging factors: effective aging days per calendar day.
[[nodiscard]] inline double equivalent_aging(std::span<const double> hourly_faa) {
  require(hourly_faa.size() == kHoursPerDay, ErrorCode::InvalidArgument, "equivalent_aging needs 24 hourly factors");
  return std::accumulate(hourly_faa.begin(), hourly_faa.end(), 0.0) / static_cast<double>(kHoursPerDay);
}

struct DailyAging {
  HourlySeries hourly_faa{};
  double equivalent = 0.0;  ///< days of life consumed per calendar day
};

[[nodiscard]] inline DailyAging daily_aging(const ThermalTrace& trace) {
  DailyAging out;
  for (std::size_t h = 0; h < kHoursPerDay; ++h) out.hourly_faa[h] = aging_acceleration(trace.hotspot[h]);
  out.equivalent = equivalent_aging(out.hourly_faa);
  return out;
}

struct LifeLoss {
  double total_days = 0.0;
  double annual_days = 0.0;
};

/// Sums per-cluster daily loss weighted by each cluster's day count.
[[nodiscard]] inline LifeLoss accumulate_life_loss(const std::map<int, double>& per_cluster_daily_loss,
                                                   const std::map<int, double>& member_day_counts, double years) {
  require(years > 0, ErrorCode::InvalidArgument, "years must be > 0");
  require(per_cluster_daily_loss.size() == member_day_counts.size(), ErrorCode::KeyMismatch,
          "loss and day-count maps cover different clusters");
  LifeLoss out;
  for (const auto& [cluster, loss] : per_cluster_daily_loss) {
    const auto it = member_day_counts.find(cluster);
    require(it != member_day_counts.end(), ErrorCode::KeyMismatch,
            "cluster " + std::to_string(cluster) + " has no day count");
    out.total_days += loss * it->second;
  }
  out.annual_days = out.total_days / years;
  return out;
}

/// Annual cost of consumed insulation life.
[[nodiscard]] inline double economic_loss(double annual_loss_days, double replacement_cost) {
  return annual_loss_days / kNormalLifeDays * replacement_cost;
}

}  // namespace txrisk
