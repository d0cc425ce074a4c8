// txrisk: residential transformer overloading risk assessment CLI.

#include <cstdio>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "txrisk/commands.hpp"

namespace {

using txrisk::ErrorCode;

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return 2;
    case ErrorCode::Io: return 3;
    case ErrorCode::ParseError: return 4;
    case ErrorCode::GapError: return 5;
    case ErrorCode::EmptyIntersection: return 6;
    case ErrorCode::EmptyDataset: return 7;
    case ErrorCode::SchemaMismatch: return 8;
    case ErrorCode::TooFewPoints: return 9;
    case ErrorCode::EmptyMembers: return 10;
    case ErrorCode::MissingProfile: return 11;
    case ErrorCode::NonConvergence: return 12;
    case ErrorCode::NoFeasibleScale: return 13;
    case ErrorCode::FarFromAllClusters: return 14;
    case ErrorCode::ZeroServices: return 15;
    case ErrorCode::KeyMismatch: return 16;
    case ErrorCode::OutOfRange: return 17;
  }
  return 1;
}

constexpr const char* kExitCodes =
    "Exit codes:\n"
    "  0 success            1 internal error       2 usage / invalid argument\n"
    "  3 I/O                4 parse error          5 gap in hourly data\n"
    "  6 empty intersection 7 empty dataset        8 schema mismatch\n"
    "  9 too few points    10 empty cluster       11 missing profile\n"
    " 12 non-convergence   13 no feasible scale   14 far from all clusters\n"
    " 15 zero services     16 key mismatch        17 out of range\n";

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Residential transformer overloading risk assessment"};
  app.footer(kExitCodes);
  app.require_subcommand(1);

  std::string config_path, out_dir, n_range, k_sweep;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  bool strict = false;
  int k = 0, restarts = 0, services = 0, synth_services = 0, synth_days = 0;
  double budget = 0, years = 0;
  std::string weather, meter, calendar, spec, model, query, start;
  bool no_svg = false;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "random seed");
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--threads", threads, "worker threads (default: processors)");
    sub->add_flag("--strict", strict, "refuse estimates far from every cluster");
  };

  auto* synth = app.add_subcommand("synth", "write a seeded synthetic weather/meter/calendar dataset");
  common(synth);
  synth->add_option("--services", synth_services, "number of services");
  synth->add_option("--days", synth_days, "number of days");
  synth->add_option("--start", start, "first date (YYYY-MM-DD)");

  auto* cluster = app.add_subcommand("cluster", "cluster the service operation dataset");
  common(cluster);
  cluster->add_option("--weather", weather, "weather.csv");
  cluster->add_option("--meter", meter, "meter.csv");
  cluster->add_option("--calendar", calendar, "calendar.csv");
  cluster->add_option("-k,--clusters", k, "number of clusters");
  cluster->add_option("--restarts", restarts, "k-means restarts (best objective kept)");
  cluster->add_option("--k-sweep", k_sweep, "also report the objective for k in A..B");

  auto* assess = app.add_subcommand("assess", "thresholds, impact ranking and max-service studies");
  common(assess);
  assess->add_option("--spec", spec, "transformer spec JSON");
  assess->add_option("--model", model, "cluster model JSON");
  assess->add_option("--n-range", n_range, "service counts A..B");
  assess->add_option("--budget", budget, "annual economic loss budget");
  assess->add_option("--years", years, "years covered by the model's data");
  assess->add_flag("--no-svg", no_svg, "skip the month-distribution chart");

  auto* estimate = app.add_subcommand("estimate", "estimate max top-oil temperature for query days");
  common(estimate);
  estimate->add_option("--spec", spec, "transformer spec JSON");
  estimate->add_option("--model", model, "cluster model JSON");
  estimate->add_option("--query", query, "query CSV");
  estimate->add_option("--services", services, "services on the transformer");

  CLI11_PARSE(app, argc, argv);

  try {
    txrisk::RunConfig cfg;
    if (!config_path.empty()) cfg = txrisk::load_config(config_path);
    auto* sub = app.get_subcommands().front();
    auto given = [sub](const char* flag) { return sub->count(flag) > 0; };
    if (given("--seed")) cfg.seed = seed;
    if (given("--out")) cfg.out_dir = out_dir;
    if (given("--threads")) cfg.threads = threads;
    if (strict) cfg.strict = true;
    if (sub == synth) {
      if (given("--services")) cfg.synth.services = synth_services;
      if (given("--days")) cfg.synth.days = synth_days;
      if (given("--start")) cfg.synth.start = txrisk::Date::parse(start);
    }
    if (sub == cluster) {
      if (given("--weather")) cfg.weather = weather;
      if (given("--meter")) cfg.meter = meter;
      if (given("--calendar")) cfg.calendar = calendar;
      if (given("--clusters")) cfg.k = k;
      if (given("--restarts")) cfg.restarts = restarts;
      if (given("--k-sweep")) cfg.k_sweep = txrisk::parse_int_range(k_sweep);
    }
    if (sub == assess || sub == estimate) {
      if (given("--spec")) cfg.spec = spec;
      if (given("--model")) cfg.model = model;
    }
    if (sub == assess) {
      if (given("--n-range")) {
        const auto r = txrisk::parse_int_range(n_range);
        cfg.n_range = {r.first, r.second};
      }
      if (given("--budget")) cfg.budget = budget;
      if (given("--years")) cfg.years = years;
      if (no_svg) cfg.svg = false;
      (void)cfg.n_range.values();  // rejects an empty range before any work
    }
    if (sub == estimate) {
      if (given("--query")) cfg.query = query;
      if (given("--services")) cfg.services = services;
    }

    txrisk::CommandResult result;
    if (sub == synth) result = txrisk::run_synth(cfg);
    else if (sub == cluster) result = txrisk::run_cluster(cfg);
    else if (sub == assess) result = txrisk::run_assess(cfg);
    else result = txrisk::run_estimate(cfg);

    for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
    for (const auto& f : result.files) std::cout << f.string() << "\n";
    return 0;
  } catch (const txrisk::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
