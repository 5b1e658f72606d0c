// transitheat: batch heat-exposure simulation for transit riders.
//
// Subcommands:
//   simulate  full (year, scenario) sweep from a run config
//   plan      one itinerary query, printed as JSON
//   validate  GTFS feed validation report
//   hi / wc   single heat-index / wind-chill evaluations

#include <iostream>

#include <CLI11.hpp>

#include "transitheat/transitheat.hpp"

namespace th = transitheat;

namespace {

th::geo::LatLon parse_latlon(const std::string& s) {
  const size_t comma = s.find(',');
  if (comma == std::string::npos)
    throw th::InputError("expected lat,lon but got '" + s + "'");
  try {
    return {std::stod(s.substr(0, comma)), std::stod(s.substr(comma + 1))};
  } catch (const std::exception&) {
    throw th::InputError("expected lat,lon but got '" + s + "'");
  }
}

int run(int argc, char** argv) {
  CLI::App app{"transit rider heat exposure simulator"};
  app.require_subcommand(1);

  // simulate
  auto* sim = app.add_subcommand("simulate", "run the full (year, scenario) sweep");
  std::string config_path;
  sim->add_option("--config", config_path, "run config file")->required();
  std::string sim_seed, sim_out, sim_years, sim_scenarios, sim_gtfs, sim_baseline, sim_deltas,
      sim_survey, sim_synth, sim_profiles;
  int sim_par = 0;
  sim->add_option("--seed", sim_seed, "override the random seed");
  sim->add_option("--out", sim_out, "override the output directory");
  sim->add_option("--years", sim_years, "override the year range (FROM:TO)");
  sim->add_option("--scenarios", sim_scenarios, "override the scenario list");
  sim->add_option("--gtfs", sim_gtfs, "override the GTFS directory");
  sim->add_option("--baseline", sim_baseline, "override the baseline weather CSV");
  sim->add_option("--deltas", sim_deltas, "override the climate delta CSV");
  sim->add_option("--survey", sim_survey, "override: load this survey CSV");
  sim->add_option("--synthesize", sim_synth, "override: synthesize from this config");
  sim->add_option("--parallelism", sim_par, "override the worker count");
  sim->add_option("--dump-profiles", sim_profiles, "write per-trip activity profiles here");

  // plan
  auto* plan = app.add_subcommand("plan", "plan one itinerary and print it as JSON");
  std::string plan_gtfs, plan_from, plan_to, plan_depart, plan_date, plan_access = "walk";
  double plan_max_access = 1000.0, plan_footpath = 200.0;
  int plan_transfers = 3;
  plan->add_option("--gtfs", plan_gtfs, "GTFS directory")->required();
  plan->add_option("--from", plan_from, "origin lat,lon")->required();
  plan->add_option("--to", plan_to, "destination lat,lon")->required();
  plan->add_option("--depart", plan_depart, "departure time HH:MM:SS")->required();
  plan->add_option("--date", plan_date, "service date YYYY-MM-DD")->required();
  plan->add_option("--access", plan_access, "walk|bike|micromobility");
  plan->add_option("--max-access-m", plan_max_access, "origin/destination stop radius");
  plan->add_option("--max-footpath-m", plan_footpath, "footpath radius between stops");
  plan->add_option("--max-transfers", plan_transfers, "transfer bound");

  // validate
  auto* val = app.add_subcommand("validate", "validate a GTFS feed");
  std::string val_gtfs;
  bool val_json = false;
  val->add_option("--gtfs", val_gtfs, "GTFS directory")->required();
  val->add_flag("--json", val_json, "emit the report as JSON");

  // hi / wc
  auto* hi = app.add_subcommand("hi", "heat index for one (temp, humidity) pair");
  double hi_t = 0, hi_rh = 0;
  hi->add_option("-t,--temp", hi_t, "air temperature degF")->required();
  hi->add_option("-r,--rh", hi_rh, "relative humidity percent")->required();
  auto* wc = app.add_subcommand("wc", "wind chill for one (temp, wind) pair");
  double wc_t = 0, wc_v = 0;
  wc->add_option("-t,--temp", wc_t, "air temperature degF")->required();
  wc->add_option("-v,--wind", wc_v, "wind speed mph")->required();

  CLI11_PARSE(app, argc, argv);

  if (sim->parsed()) {
    th::sim::RunConfig cfg = th::sim::RunConfig::from_file(config_path);
    if (!sim_seed.empty()) cfg.seed = std::stoull(sim_seed);
    if (!sim_out.empty()) cfg.out_dir = sim_out;
    if (!sim_gtfs.empty()) cfg.gtfs_dir = sim_gtfs;
    if (!sim_baseline.empty()) cfg.baseline_csv = sim_baseline;
    if (!sim_deltas.empty()) cfg.deltas_csv = sim_deltas;
    if (!sim_survey.empty()) {
      cfg.survey_csv = sim_survey;
      cfg.synth_cfg.clear();
    }
    if (!sim_synth.empty()) {
      cfg.synth_cfg = sim_synth;
      cfg.survey_csv.clear();
    }
    if (!sim_years.empty()) {
      const size_t colon = sim_years.find(':');
      cfg.year_from = std::stoi(sim_years.substr(0, colon == std::string::npos ? sim_years.size() : colon));
      cfg.year_to = colon == std::string::npos ? cfg.year_from : std::stoi(sim_years.substr(colon + 1));
    }
    if (!sim_scenarios.empty()) {
      cfg.scenarios.clear();
      std::stringstream ss(sim_scenarios);
      std::string part;
      while (std::getline(ss, part, ','))
        cfg.scenarios.push_back(th::climate::parse_scenario(th::csv::trim(part)));
    }
    if (sim_par > 0) cfg.parallelism = sim_par;
    if (!sim_profiles.empty()) {
      cfg.dump_profiles = true;
      cfg.profiles_dir = sim_profiles;
    }
    th::sim::run_sweep(cfg);
    return 0;
  }

  if (plan->parsed()) {
    const auto bundle = th::gtfs::load_feed(plan_gtfs);
    const auto network = th::net::build_network(bundle, plan_footpath);
    th::route::TripQuery q;
    q.origin = parse_latlon(plan_from);
    q.destination = parse_latlon(plan_to);
    q.depart_s = th::timeutil::parse_hms(plan_depart);
    q.service_date = th::timeutil::parse_date(plan_date);
    q.access_mode = th::parse_access_mode(plan_access);
    q.max_transfers = plan_transfers;
    q.max_access_m = plan_max_access;
    const auto mask = network.active_trip_mask(q.service_date);
    const auto res = th::route::plan_trip(network, q, {}, &mask);
    if (!res.ok()) {
      std::cout << nlohmann::json{{"no_path", th::route::no_path_reason_name(res.reason)}}.dump(2)
                << "\n";
      return 1;
    }
    std::cout << res.itinerary->to_json().dump(2) << "\n";
    return 0;
  }

  if (val->parsed()) {
    const auto bundle = th::gtfs::load_feed_raw(val_gtfs);
    const auto report = th::gtfs::validate(bundle);
    if (val_json) {
      std::cout << report.to_json().dump(2) << "\n";
    } else {
      std::cout << (report.ok() ? "feed is valid" : "feed has errors") << " ("
                << report.errors.size() << " errors, " << report.warnings.size()
                << " warnings)\n"
                << report.summary();
    }
    return report.ok() ? 0 : 1;
  }

  if (hi->parsed()) {
    std::cout << th::csv::format_double(th::thermal::heat_index_f(hi_t, hi_rh)) << "\n";
    return 0;
  }
  if (wc->parsed()) {
    std::cout << th::csv::format_double(th::thermal::wind_chill_f(wc_t, wc_v)) << "\n";
    return 0;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const transitheat::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
}
