#pragma once

// =============================================================================
// Oil-immersed transformer thermal model (IEEE C57.91 top-oil / hottest-spot)
// =============================================================================
// Hourly recurrence, for both the top-oil rise over ambient and the winding
// hottest-spot rise over top-oil:
//
//   rise[h] = (ultimate[h] - rise[h-1]) * (1 - exp(-dt / tau)) + rise[h-1]
//
//   ultimate top-oil rise   = rated_rise * ((K^2 R + 1) / (R + 1))^n
//   ultimate hotspot rise   = hotspot_differential * K^(2m)
//
// The day is treated as periodic: hour 24 feeds hour 1 of the next sweep,
// and sweeps repeat until no hourly rise moves by more than the tolerance.
// =============================================================================

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <string>

#include "txrisk/error.hpp"

namespace txrisk {

inline constexpr std::size_t kHoursPerDay = 24;
using HourlySeries = std::array<double, kHoursPerDay>;

/// Nameplate and thermal constants of one transformer.
struct TransformerSpec {
  double rated_kva = 25.0;
  double top_oil_rise_rated = 55.0;     ///< top-oil rise over ambient at rated load, °C
  double hotspot_differential = 25.0;   ///< rated hottest-spot rise over top-oil, °C
  double loss_ratio = 4.0;              ///< rated load loss / no-load loss
  double oil_time_constant = 3.0;       ///< hours
  double winding_time_constant = 0.1;   ///< hours
  double exponent_n = 0.8;
  double exponent_m = 0.8;
  double top_oil_limit = 120.0;         ///< °C
  double hotspot_limit = 200.0;         ///< °C
  double replacement_cost = 5000.0;     ///< purchase + installation

  void validate() const {
    auto check = [](bool ok, const char* what) { require(ok, ErrorCode::InvalidArgument, what); };
    check(rated_kva > 0, "rated_kva must be > 0");
    check(top_oil_rise_rated > 0, "top_oil_rise_rated must be > 0");
    check(hotspot_differential > 0, "hotspot_differential must be > 0");
    check(loss_ratio > 0, "loss_ratio must be > 0");
    check(oil_time_constant > 0, "oil_time_constant must be > 0");
    check(winding_time_constant > 0, "winding_time_constant must be > 0");
    check(exponent_n > 0 && exponent_n <= 1, "exponent_n must be in (0, 1]");
    check(exponent_m > 0 && exponent_m <= 1, "exponent_m must be in (0, 1]");
    check(top_oil_limit < hotspot_limit, "top_oil_limit must be below hotspot_limit");
    check(replacement_cost >= 0, "replacement_cost must be >= 0");
  }
};

/// Paired 24-hour ambient temperature (°C) and per-unit load sequences.
struct DayProfile {
  HourlySeries ambient{};
  HourlySeries load_pu{};

  void validate() const {
    for (double k : load_pu) {
      require(std::isfinite(k) && k >= 0, ErrorCode::InvalidArgument, "load_pu entries must be finite and >= 0");
    }
    for (double t : ambient) {
      require(std::isfinite(t), ErrorCode::InvalidArgument, "ambient entries must be finite");
    }
  }

  static DayProfile constant(double ambient_c, double load) {
    DayProfile p;
    p.ambient.fill(ambient_c);
    p.load_pu.fill(load);
    return p;
  }
};

/// Converged hourly temperatures of one simulated day.
struct ThermalTrace {
  HourlySeries top_oil{};
  HourlySeries hotspot{};
  HourlySeries top_oil_rise{};
  HourlySeries hotspot_rise{};
  int iterations = 0;

  [[nodiscard]] double max_top_oil() const { return *std::max_element(top_oil.begin(), top_oil.end()); }
  [[nodiscard]] double max_hotspot() const { return *std::max_element(hotspot.begin(), hotspot.end()); }
};

struct SimulationOptions {
  double tolerance = 0.01;   ///< max |Δ rise| between sweeps, °C
  int max_sweeps = 200;
  double dt_hours = 1.0;
  double initial_top_oil_rise = 0.0;
  double initial_hotspot_rise = 0.0;
};

[[nodiscard]] inline double ultimate_top_oil_rise(const TransformerSpec& spec, double k_u) {
  const double r = spec.loss_ratio;
  return spec.top_oil_rise_rated * std::pow((k_u * k_u * r + 1.0) / (r + 1.0), spec.exponent_n);
}

[[nodiscard]] inline double ultimate_hotspot_rise(const TransformerSpec& spec, double k_u) {
  return spec.hotspot_differential * std::pow(k_u, 2.0 * spec.exponent_m);
}

/// First-order transient from `initial_rise` toward `ultimate_rise` over `dt`.
[[nodiscard]] inline double exponential_step(double initial_rise, double ultimate_rise, double time_constant,
                                             double dt) {
  return (ultimate_rise - initial_rise) * (1.0 - std::exp(-dt / time_constant)) + initial_rise;
}

/// Rises produced by one sweep over hours 1..24.
struct SweepResult {
  HourlySeries top_oil_rise{};
  HourlySeries hotspot_rise{};
};

/// One pass over the day starting from the given hour-1 initial rises.
[[nodiscard]] inline SweepResult sweep_day(const TransformerSpec& spec, const DayProfile& profile,
                                           double initial_top_oil_rise, double initial_hotspot_rise,
                                           double dt_hours = 1.0) {
  SweepResult out;
  double to = initial_top_oil_rise;
  double hs = initial_hotspot_rise;
  for (std::size_t h = 0; h < kHoursPerDay; ++h) {
    const double k = profile.load_pu[h];
    to = exponential_step(to, ultimate_top_oil_rise(spec, k), spec.oil_time_constant, dt_hours);
    hs = exponential_step(hs, ultimate_hotspot_rise(spec, k), spec.winding_time_constant, dt_hours);
    out.top_oil_rise[h] = to;
    out.hotspot_rise[h] = hs;
  }
  return out;
}

[[nodiscard]] inline ThermalTrace assemble_trace(const DayProfile& profile, const SweepResult& sweep, int iterations) {
  ThermalTrace trace;
  trace.top_oil_rise = sweep.top_oil_rise;
  trace.hotspot_rise = sweep.hotspot_rise;
  for (std::size_t h = 0; h < kHoursPerDay; ++h) {
    trace.top_oil[h] = profile.ambient[h] + sweep.top_oil_rise[h];
    trace.hotspot[h] = trace.top_oil[h] + sweep.hotspot_rise[h];
  }
  trace.iterations = iterations;
  return trace;
}

/// Iterates the periodic daily cycle to its steady state.
/// Throws NonConvergence if the tolerance is not met within `max_sweeps`.
[[nodiscard]] inline ThermalTrace simulate_day(const TransformerSpec& spec, const DayProfile& profile,
                                               const SimulationOptions& options = {}) {
  profile.validate();
  SweepResult current =
      sweep_day(spec, profile, options.initial_top_oil_rise, options.initial_hotspot_rise, options.dt_hours);
  for (int sweep = 2; sweep <= options.max_sweeps; ++sweep) {
    const SweepResult next = sweep_day(spec, profile, current.top_oil_rise.back(), current.hotspot_rise.back(),
                                       options.dt_hours);
    double change = 0.0;
    for (std::size_t h = 0; h < kHoursPerDay; ++h) {
      change = std::max(change, std::abs(next.top_oil_rise[h] - current.top_oil_rise[h]));
      change = std::max(change, std::abs(next.hotspot_rise[h] - current.hotspot_rise[h]));
    }
    current = next;
    if (change < options.tolerance) return assemble_trace(profile, current, sweep);
  }
  fail(ErrorCode::NonConvergence,
       "daily cycle did not settle within " + std::to_string(options.max_sweeps) + " sweeps");
}

/// Outcome of comparing a trace against the top-oil and hottest-spot limits.
struct LimitVerdict {
  bool within_limits = true;
  bool top_oil_ok = true;
  bool hotspot_ok = true;
  double worst_top_oil = 0.0;
  double worst_hotspot = 0.0;
};

[[nodiscard]] inline LimitVerdict check_limits(const TransformerSpec& spec, const ThermalTrace& trace) {
  LimitVerdict v;
  v.worst_top_oil = trace.max_top_oil();
  v.worst_hotspot = trace.max_hotspot();
  v.top_oil_ok = v.worst_top_oil <= spec.top_oil_limit;
  v.hotspot_ok = v.worst_hotspot <= spec.hotspot_limit;
  v.within_limits = v.top_oil_ok && v.hotspot_ok;
  return v;
}

}  // namespace txrisk
