#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <set>
#include <thread>

#include <json.hpp>

#include "transitheat/climate.hpp"
#include "transitheat/cohort.hpp"
#include "transitheat/equity.hpp"
#include "transitheat/exposure.hpp"
#include "transitheat/gtfs.hpp"
#include "transitheat/network.hpp"
#include "transitheat/router.hpp"
#include "transitheat/thermal.hpp"
#include "transitheat/trajectory.hpp"

namespace transitheat::sim {

namespace fs = std::filesystem;

struct RunConfig {
  fs::path gtfs_dir;
  fs::path baseline_csv;
  fs::path deltas_csv;
  bool deltas_celsius = false;
  fs::path survey_csv;   // exactly one of survey_csv / synth_cfg
  fs::path synth_cfg;
  fs::path airport_zone; // optional
  double airport_radius_m = 500.0;
  fs::path workrest_csv; // required
  fs::path met_csv;      // optional, code defaults otherwise
  fs::path thermal_cfg;  // optional
  fs::path grid_csv;     // optional spatial offsets
  double grid_lat0 = 0.0, grid_lon0 = 0.0, grid_cell_deg = 0.01;

  std::vector<climate::Scenario> scenarios = {climate::Scenario::ssp245,
                                              climate::Scenario::ssp370,
                                              climate::Scenario::ssp585};
  int year_from = 2019;
  int year_to = 2100;
  std::optional<timeutil::Date> window_start, window_end;
  geo::BBox study_box;

  fs::path out_dir;
  int parallelism = 1;
  bool dump_profiles = false;
  fs::path profiles_dir;  // defaults to out_dir/profiles
  std::optional<uint64_t> seed;  // overrides the synth config seed
  size_t suppress_floor = 50;

  route::RouterConfig router;
  double max_access_m = 1000.0;
  double max_footpath_m = 200.0;
  int32_t transfer_slack_s = 60;
  int max_transfers = 3;

  static RunConfig from_file(const fs::path& path) {
    RunConfig c;
    const fs::path base = path.parent_path();
    auto kv = csv::parse_kv_file(path);
    auto rel = [&](const std::string& v) {
      fs::path p(v);
      return p.is_absolute() ? p : base / p;
    };
    auto take = [&](const char* key, auto fn) {
      auto it = kv.find(key);
      if (it != kv.end()) fn(it->second);
    };
    take("gtfs", [&](const std::string& v) { c.gtfs_dir = rel(v); });
    take("baseline", [&](const std::string& v) { c.baseline_csv = rel(v); });
    take("deltas", [&](const std::string& v) { c.deltas_csv = rel(v); });
    take("deltas_celsius", [&](const std::string& v) { c.deltas_celsius = v == "true" || v == "1"; });
    take("survey", [&](const std::string& v) { c.survey_csv = rel(v); });
    take("synth", [&](const std::string& v) { c.synth_cfg = rel(v); });
    take("airport_zone", [&](const std::string& v) { c.airport_zone = rel(v); });
    take("airport_radius_m", [&](const std::string& v) { c.airport_radius_m = std::stod(v); });
    take("workrest", [&](const std::string& v) { c.workrest_csv = rel(v); });
    take("met", [&](const std::string& v) { c.met_csv = rel(v); });
    take("thermal", [&](const std::string& v) { c.thermal_cfg = rel(v); });
    take("grid", [&](const std::string& v) { c.grid_csv = rel(v); });
    take("grid_lat0", [&](const std::string& v) { c.grid_lat0 = std::stod(v); });
    take("grid_lon0", [&](const std::string& v) { c.grid_lon0 = std::stod(v); });
    take("grid_cell_deg", [&](const std::string& v) { c.grid_cell_deg = std::stod(v); });
    take("scenarios", [&](const std::string& v) {
      c.scenarios.clear();
      std::stringstream ss(v);
      std::string part;
      while (std::getline(ss, part, ','))
        c.scenarios.push_back(climate::parse_scenario(csv::trim(part)));
      if (c.scenarios.empty()) throw InputError("scenarios list is empty");
    });
    take("years", [&](const std::string& v) {
      const size_t colon = v.find(':');
      if (colon == std::string::npos) {
        c.year_from = c.year_to = std::stoi(v);
      } else {
        c.year_from = std::stoi(v.substr(0, colon));
        c.year_to = std::stoi(v.substr(colon + 1));
      }
      if (c.year_to < c.year_from) throw InputError("years range is reversed");
    });
    take("window_start", [&](const std::string& v) { c.window_start = timeutil::parse_date(v); });
    take("window_end", [&](const std::string& v) { c.window_end = timeutil::parse_date(v); });
    take("study_min_lat", [&](const std::string& v) { c.study_box.min_lat = std::stod(v); });
    take("study_max_lat", [&](const std::string& v) { c.study_box.max_lat = std::stod(v); });
    take("study_min_lon", [&](const std::string& v) { c.study_box.min_lon = std::stod(v); });
    take("study_max_lon", [&](const std::string& v) { c.study_box.max_lon = std::stod(v); });
    take("out_dir", [&](const std::string& v) { c.out_dir = rel(v); });
    take("parallelism", [&](const std::string& v) { c.parallelism = std::stoi(v); });
    take("dump_profiles", [&](const std::string& v) { c.dump_profiles = v == "true" || v == "1"; });
    take("seed", [&](const std::string& v) { c.seed = std::stoull(v); });
    take("suppress_floor", [&](const std::string& v) { c.suppress_floor = std::stoull(v); });
    take("walk_speed", [&](const std::string& v) { c.router.walk_speed_mps = std::stod(v); });
    take("bike_speed", [&](const std::string& v) { c.router.bike_speed_mps = std::stod(v); });
    take("micromobility_speed",
         [&](const std::string& v) { c.router.micromobility_speed_mps = std::stod(v); });
    take("direct_walk_cutoff_m",
         [&](const std::string& v) { c.router.direct_walk_cutoff_m = std::stod(v); });
    take("max_access_m", [&](const std::string& v) { c.max_access_m = std::stod(v); });
    take("max_footpath_m", [&](const std::string& v) { c.max_footpath_m = std::stod(v); });
    take("transfer_slack_s", [&](const std::string& v) { c.transfer_slack_s = std::stoi(v); });
    take("max_transfers", [&](const std::string& v) { c.max_transfers = std::stoi(v); });
    c.validate_or_throw();
    return c;
  }

  void validate_or_throw() const {
    if (gtfs_dir.empty()) throw InputError("config: 'gtfs' is required");
    if (baseline_csv.empty()) throw InputError("config: 'baseline' is required");
    if (deltas_csv.empty()) throw InputError("config: 'deltas' is required");
    if (workrest_csv.empty()) throw InputError("config: 'workrest' is required");
    if (out_dir.empty()) throw InputError("config: 'out_dir' is required");
    if (survey_csv.empty() == synth_cfg.empty())
      throw InputError("config: exactly one of 'survey' or 'synth' is required");
    if (parallelism < 1) throw InputError("config: parallelism must be >= 1");
    if (window_start.has_value() != window_end.has_value())
      throw InputError("config: window_start and window_end go together");
  }

  // Canonical text of everything that affects results (not parallelism or paths'
  // spelling), hashed into the manifest.
  std::string canonical() const {
    std::string s;
    auto add = [&](const std::string& k, const std::string& v) { s += k + "=" + v + "\n"; };
    add("deltas_celsius", deltas_celsius ? "1" : "0");
    add("airport_radius_m", csv::format_double(airport_radius_m));
    std::string sc;
    for (auto x : scenarios) sc += std::string(climate::scenario_name(x)) + ",";
    add("scenarios", sc);
    add("years", std::to_string(year_from) + ":" + std::to_string(year_to));
    if (window_start) add("window_start", timeutil::format_date(*window_start));
    if (window_end) add("window_end", timeutil::format_date(*window_end));
    if (seed) add("seed", std::to_string(*seed));
    add("suppress_floor", std::to_string(suppress_floor));
    add("walk_speed", csv::format_double(router.walk_speed_mps));
    add("bike_speed", csv::format_double(router.bike_speed_mps));
    add("micromobility_speed", csv::format_double(router.micromobility_speed_mps));
    add("direct_walk_cutoff_m", csv::format_double(router.direct_walk_cutoff_m));
    add("max_access_m", csv::format_double(max_access_m));
    add("max_footpath_m", csv::format_double(max_footpath_m));
    add("transfer_slack_s", std::to_string(transfer_slack_s));
    add("max_transfers", std::to_string(max_transfers));
    return s;
  }
};

namespace detail {

inline uint64_t fnv1a(const void* data, size_t len, uint64_t h = 14695981039346656037ull) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string fnv1a_hex(const std::string& s) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a(s.data(), s.size())));
  return buf;
}

inline std::string file_fingerprint(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return "unreadable";
  uint64_t h = 14695981039346656037ull;
  char buf[1 << 16];
  while (in.read(buf, sizeof buf) || in.gcount() > 0)
    h = fnv1a(buf, static_cast<size_t>(in.gcount()), h);
  char out[24];
  std::snprintf(out, sizeof out, "%016llx", static_cast<unsigned long long>(h));
  return out;
}

inline void parallel_for(size_t n, int threads, const std::function<void(size_t)>& fn) {
  if (threads <= 1 || n <= 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr error;
  std::mutex error_mu;
  const int use = std::min<int>(threads, static_cast<int>(n));
  pool.reserve(static_cast<size_t>(use));
  for (int t = 0; t < use; ++t)
    pool.emplace_back([&] {
      for (;;) {
        const size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lk(error_mu);
          if (!error) error = std::current_exception();
          return;
        }
      }
    });
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace detail

struct RunStats {
  size_t cohort_size = 0;
  size_t rejects = 0;
  size_t window_removed = 0;
  size_t airport_removed = 0;
  size_t routed = 0;
  size_t no_path = 0;
  size_t plan_trip_calls = 0;
  size_t exposure_passes = 0;
  double cohort_weight = 0.0;
  double routed_weight = 0.0;
  double wall_ms = 0.0;
};

struct RunArtifacts {
  equity::SweepMatrix matrix;
  // (year, scenario index) -> tables; kept in memory for tests and the bundle.
  std::map<std::pair<int, int>, std::array<equity::RiskTable, 5>> tables;
  std::map<std::pair<int, int>, std::array<std::optional<double>, 5>> segment_shares;
  RunStats stats;
  nlohmann::json manifest;
};

// Full (year, scenario) sweep: route and expand each trip once, then one
// exposure pass per pair over the shared immutable profiles. Aggregation folds
// per-trip slots in cohort order, so results are independent of parallelism.
inline RunArtifacts run_sweep(const RunConfig& cfg, std::ostream& progress = std::cerr) {
  const auto t_start = std::chrono::steady_clock::now();
  cfg.validate_or_throw();

  const bool out_dir_existed = fs::exists(cfg.out_dir);
  std::vector<fs::path> created;
  auto track = [&](const fs::path& p) {
    created.push_back(p);
    return p;
  };
  auto cleanup = [&]() {
    std::error_code ec;
    if (!out_dir_existed) {
      fs::remove_all(cfg.out_dir, ec);
    } else {
      for (auto it = created.rbegin(); it != created.rend(); ++it) fs::remove_all(*it, ec);
    }
  };

  try {
    // Inputs.
    const gtfs::FeedBundle bundle = gtfs::load_feed(cfg.gtfs_dir);
    const net::TransitNetwork network = net::build_network(
        bundle, cfg.max_footpath_m, cfg.router.walk_speed_mps, cfg.transfer_slack_s);
    climate::WeatherArchive baseline = climate::load_baseline(cfg.baseline_csv);
    if (!cfg.grid_csv.empty())
      baseline.grid = climate::GridOffsets::from_csv(cfg.grid_csv, cfg.grid_lat0,
                                                     cfg.grid_lon0, cfg.grid_cell_deg);
    const climate::ClimateDeltaTable deltas =
        climate::load_deltas(cfg.deltas_csv, cfg.deltas_celsius);
    const int baseline_year = baseline.baseline_year();
    for (auto sc : cfg.scenarios)
      for (int y = cfg.year_from; y <= cfg.year_to; ++y)
        if (y != baseline_year && !deltas.has(sc, y))
          throw InputError(std::string("config year ") + std::to_string(y) +
                           " has no delta for " + climate::scenario_name(sc));

    const exposure::MetTable met =
        cfg.met_csv.empty() ? exposure::MetTable::defaults() : exposure::MetTable::from_csv(cfg.met_csv);
    const exposure::WorkRestSchedule schedule = exposure::WorkRestSchedule::from_csv(cfg.workrest_csv);
    const thermal::BandConfig bands =
        cfg.thermal_cfg.empty() ? thermal::BandConfig{} : thermal::BandConfig::from_file(cfg.thermal_cfg);
    (void)bands;  // comfort bands feed reporting CLIs, not risk accounting

    RunStats stats;

    // Cohort.
    std::vector<cohort::TripRecord> trips;
    cohort::CohortLoad survey_load;
    if (!cfg.survey_csv.empty()) {
      survey_load = cohort::load_trips(cfg.survey_csv, cfg.study_box);
      trips = survey_load.records;
      stats.rejects = survey_load.rejects.size();
      progress << "loaded " << trips.size() << " trip records ("
               << csv::format_double(survey_load.accepted_weight) << " trip-equivalents), "
               << survey_load.rejects.size() << " rejected\n";
    } else {
      cohort::SynthConfig synth = cohort::SynthConfig::from_file(cfg.synth_cfg);
      if (cfg.seed) synth.seed = *cfg.seed;
      trips = cohort::synthesize(synth, network);
      progress << "synthesized " << trips.size() << " trip records (seed " << synth.seed
               << ")\n";
    }
    if (cfg.window_start) {
      auto fo = cohort::filter_window(std::move(trips), *cfg.window_start, *cfg.window_end);
      stats.window_removed = fo.removed_count;
      trips = std::move(fo.kept);
    }
    if (!cfg.airport_zone.empty()) {
      const auto zone = cohort::AirportZone::from_file(cfg.airport_zone, cfg.airport_radius_m);
      auto fo = cohort::filter_airport(std::move(trips), zone, &network);
      stats.airport_removed = fo.removed_count;
      trips = std::move(fo.kept);
    }
    stats.cohort_size = trips.size();
    for (const auto& t : trips) stats.cohort_weight += t.weight;
    if (trips.empty()) throw InputError("cohort is empty after filters");

    // Active-trip masks per distinct service date.
    std::map<timeutil::Date, std::vector<uint8_t>> masks;
    for (const auto& t : trips)
      if (!masks.count(t.service_date))
        masks[t.service_date] = network.active_trip_mask(t.service_date);

    // Route and expand once per trip.
    struct Routed {
      route::Itinerary itinerary;
      trajectory::ActivityProfile profile;
      size_t trip_idx = 0;
    };
    std::vector<std::optional<Routed>> routed(trips.size());
    std::atomic<size_t> plan_calls{0};
    detail::parallel_for(trips.size(), cfg.parallelism, [&](size_t i) {
      const auto& t = trips[i];
      route::TripQuery q;
      q.origin = t.origin;
      q.destination = t.destination;
      q.depart_s = t.depart_s;
      q.service_date = t.service_date;
      q.access_mode = t.access_mode;
      q.max_transfers = cfg.max_transfers;
      q.max_access_m = cfg.max_access_m;
      q.board_stop_hint = t.board_stop_hint;
      plan_calls.fetch_add(1);
      auto res = route::plan_trip(network, q, cfg.router, &masks.at(t.service_date));
      if (!res.ok()) return;
      Routed r;
      r.itinerary = std::move(*res.itinerary);
      r.profile = trajectory::expand(r.itinerary, t.id);
      r.trip_idx = i;
      routed[i] = std::move(r);
    });
    stats.plan_trip_calls = plan_calls.load();
    for (const auto& r : routed)
      if (r) {
        ++stats.routed;
        stats.routed_weight += trips[r->trip_idx].weight;
      }
    stats.no_path = trips.size() - stats.routed;
    progress << "routed " << stats.routed << "/" << trips.size() << " trips\n";
    if (stats.routed == 0) throw InputError("no trip could be routed");

    // Output scaffolding.
    fs::create_directories(cfg.out_dir);
    track(cfg.out_dir / "equity");
    fs::create_directories(cfg.out_dir / "equity");
    if (!cfg.survey_csv.empty() && !survey_load.rejects.empty())
      cohort::write_rejects_report(survey_load, track(cfg.out_dir / "rejects.csv"));
    if (cfg.dump_profiles) {
      const fs::path pdir =
          cfg.profiles_dir.empty() ? track(cfg.out_dir / "profiles") : cfg.profiles_dir;
      fs::create_directories(pdir);
      for (const auto& r : routed) {
        if (!r) continue;
        std::ofstream out(pdir / (trips[r->trip_idx].id + ".csv"), std::ios::trunc);
        out << "t,lat,lon,activity,segment\n";
        for (const auto& s : r->profile.samples)
          out << s.t << ',' << csv::format_double(s.pos.lat) << ','
              << csv::format_double(s.pos.lon) << ',' << segment_kind_name(s.kind) << ','
              << s.segment << '\n';
      }
    }

    std::ofstream trip_out(track(cfg.out_dir / "trip_results.csv"), std::ios::trunc);
    trip_out << "trip_id,year,scenario,deficit_min,at_risk,access_walk,access_bike,"
                "access_micromobility,wait,transfer_walk\n";

    RunArtifacts art;
    art.matrix.baseline_year = baseline_year;
    art.matrix.scenarios = cfg.scenarios;

    nlohmann::json bundle_json;
    bundle_json["equity"] = nlohmann::json::object();
    const size_t total_passes =
        cfg.scenarios.size() * static_cast<size_t>(cfg.year_to - cfg.year_from + 1);

    // Sweep.
    std::vector<equity::TripOutcome> outcomes(trips.size());
    std::vector<double> deficits(trips.size(), 0.0);
    for (size_t si = 0; si < cfg.scenarios.size(); ++si) {
      const auto scenario = cfg.scenarios[si];
      for (int year = cfg.year_from; year <= cfg.year_to; ++year) {
        const climate::WeatherArchive archive =
            climate::project(baseline, deltas, scenario, year);
        detail::parallel_for(trips.size(), cfg.parallelism, [&](size_t i) {
          if (!routed[i]) return;
          const auto& r = *routed[i];
          const auto& t = trips[i];
          timeutil::Date d = t.service_date;
          d.year = year + (d.year - baseline_year);
          if (!timeutil::valid_date(d))
            throw InputError("service date " + timeutil::format_date(t.service_date) +
                             " does not exist in year " + std::to_string(year));
          const int64_t day_epoch = timeutil::days_from_civil(d) * 86400;
          auto weather_at = [&](int32_t tod, const geo::LatLon& pos) {
            return archive.at(day_epoch + tod, pos);
          };
          const auto res = exposure::accumulate(r.profile, weather_at, met, schedule);
          const auto vuln = exposure::segment_vulnerability(res, r.itinerary);
          equity::TripOutcome o;
          o.trip_id = t.id;
          o.weight = t.weight;
          o.at_risk = res.at_risk;
          o.demo = t.demo;
          for (size_t k = 0; k < 5; ++k) {
            o.has_kind[k] = vuln.has_kind[k];
            o.kind_flagged[k] = vuln.flagged[k];
          }
          outcomes[i] = std::move(o);
          deficits[i] = res.rest_deficit_min;
        });

        std::vector<equity::TripOutcome> pass;
        pass.reserve(stats.routed);
        for (size_t i = 0; i < trips.size(); ++i)
          if (routed[i]) pass.push_back(outcomes[i]);

        const auto rate = equity::overall_rate_pct(pass);
        art.matrix.add(year, si, rate.value_or(0.0));
        auto& tables = art.tables[{year, static_cast<int>(si)}];
        for (size_t d = 0; d < 5; ++d)
          tables[d] = equity::specific_exposure_rate(pass, cohort::kAllDimensions[d],
                                                     cfg.suppress_floor);
        art.segment_shares[{year, static_cast<int>(si)}] = equity::segment_share(pass);
        ++stats.exposure_passes;

        // trip_results rows, cohort order.
        for (size_t i = 0; i < trips.size(); ++i) {
          if (!routed[i]) continue;
          const auto& o = outcomes[i];
          char def[32];
          std::snprintf(def, sizeof def, "%.6f", deficits[i]);
          trip_out << csv::escape(o.trip_id) << ',' << year << ','
                   << climate::scenario_name(scenario) << ',' << def << ','
                   << (o.at_risk ? 1 : 0);
          for (size_t k = 0; k < 5; ++k) trip_out << ',' << (o.kind_flagged[k] ? 1 : 0);
          trip_out << '\n';
        }

        // equity/<SCEN>/<year>/<dim>.csv
        const fs::path pair_dir =
            cfg.out_dir / "equity" / climate::scenario_name(scenario) / std::to_string(year);
        fs::create_directories(pair_dir);
        for (size_t d = 0; d < 5; ++d) {
          std::ofstream out(pair_dir / (std::string(cohort::dimension_name(
                                            cohort::kAllDimensions[d])) +
                                        ".csv"),
                            std::ios::trunc);
          equity::write_risk_table_csv(tables[d], out);
        }
        nlohmann::json& jt =
            bundle_json["equity"][climate::scenario_name(scenario)][std::to_string(year)];
        for (size_t d = 0; d < 5; ++d)
          jt[cohort::dimension_name(cohort::kAllDimensions[d])] =
              equity::risk_table_json(tables[d]);

        if (stats.exposure_passes % 10 == 0 || stats.exposure_passes == total_passes)
          progress << "pass " << stats.exposure_passes << "/" << total_passes << " ("
                   << climate::scenario_name(scenario) << " " << year << ")\n";
      }
    }
    trip_out.close();

    // Cross-pass outputs.
    {
      std::ofstream out(track(cfg.out_dir / "sweep_matrix.csv"), std::ios::trunc);
      equity::write_sweep_matrix_csv(art.matrix, out);
    }
    {
      std::ofstream out(track(cfg.out_dir / "segment_share.csv"), std::ios::trunc);
      out << "segment_kind,year,scenario,share_pct\n";
      for (size_t k = 0; k < 5; ++k)
        for (const auto& [key, shares] : art.segment_shares) {
          out << segment_kind_name(exposure::kVulnerabilityKinds[k]) << ',' << key.first
              << ',' << climate::scenario_name(cfg.scenarios[static_cast<size_t>(key.second)])
              << ',' << (shares[k] ? equity::format_pct(*shares[k], 1) : "NA") << '\n';
        }
    }
    {
      nlohmann::json m;
      m["baseline_year"] = art.matrix.baseline_year;
      for (const auto& [key, pct] : art.matrix.cells)
        m[climate::scenario_name(cfg.scenarios[static_cast<size_t>(key.second)])]
         [std::to_string(key.first)] = pct;
      bundle_json["sweep_matrix"] = std::move(m);
      nlohmann::json segs;
      for (size_t k = 0; k < 5; ++k) {
        const char* kname = segment_kind_name(exposure::kVulnerabilityKinds[k]);
        for (const auto& [key, shares] : art.segment_shares)
          segs[kname][climate::scenario_name(cfg.scenarios[static_cast<size_t>(key.second)])]
              [std::to_string(key.first)] =
                  shares[k] ? nlohmann::json(*shares[k]) : nlohmann::json();
      }
      bundle_json["segment_share"] = std::move(segs);
      std::ofstream out(track(cfg.out_dir / "bundle.json"), std::ios::trunc);
      out << bundle_json.dump(2) << '\n';
    }
    {
      std::ofstream out(track(cfg.out_dir / "summary.txt"), std::ios::trunc);
      out << "weighted % of trips at extreme heat risk\n";
      std::ostringstream matrix_text;
      equity::write_sweep_matrix_csv(art.matrix, matrix_text);
      out << matrix_text.str();
      out << "\nbaseline " << art.matrix.baseline_year << ": "
          << (art.matrix.cell(art.matrix.baseline_year, 0)
                  ? equity::format_pct(*art.matrix.cell(art.matrix.baseline_year, 0), 2)
                  : std::string("NA"))
          << " %\n";
      for (size_t si = 0; si < cfg.scenarios.size(); ++si) {
        const auto last = art.matrix.cell(cfg.year_to, si);
        out << climate::scenario_name(cfg.scenarios[si]) << " " << cfg.year_to << ": "
            << (last ? equity::format_pct(*last, 2) : std::string("NA")) << " %\n";
      }
    }

    const auto t_end = std::chrono::steady_clock::now();
    stats.wall_ms =
        std::chrono::duration_cast<std::chrono::duration<double, std::milli>>(t_end - t_start)
            .count();

    // Manifest: deterministic identity section plus a run-info section.
    nlohmann::json manifest;
    manifest["config_hash"] = detail::fnv1a_hex(cfg.canonical());
    nlohmann::json inputs;
    for (const auto& entry : fs::directory_iterator(cfg.gtfs_dir))
      if (entry.is_regular_file())
        inputs["gtfs/" + entry.path().filename().string()] =
            detail::file_fingerprint(entry.path());
    inputs["baseline"] = detail::file_fingerprint(cfg.baseline_csv);
    inputs["deltas"] = detail::file_fingerprint(cfg.deltas_csv);
    if (!cfg.survey_csv.empty()) inputs["survey"] = detail::file_fingerprint(cfg.survey_csv);
    if (!cfg.synth_cfg.empty()) inputs["synth"] = detail::file_fingerprint(cfg.synth_cfg);
    if (!cfg.airport_zone.empty())
      inputs["airport_zone"] = detail::file_fingerprint(cfg.airport_zone);
    inputs["workrest"] = detail::file_fingerprint(cfg.workrest_csv);
    if (!cfg.met_csv.empty()) inputs["met"] = detail::file_fingerprint(cfg.met_csv);
    manifest["inputs"] = std::move(inputs);
    manifest["counts"] = {{"cohort", stats.cohort_size},
                          {"rejects", stats.rejects},
                          {"window_removed", stats.window_removed},
                          {"airport_removed", stats.airport_removed},
                          {"routed", stats.routed},
                          {"no_path", stats.no_path},
                          {"plan_trip_calls", stats.plan_trip_calls},
                          {"exposure_passes", stats.exposure_passes}};
    manifest["weights"] = {{"cohort", stats.cohort_weight}, {"routed", stats.routed_weight}};
    manifest["sweep"] = {{"baseline_year", baseline_year},
                         {"year_from", cfg.year_from},
                         {"year_to", cfg.year_to},
                         {"scenario_count", cfg.scenarios.size()}};
    if (cfg.seed) manifest["seed"] = *cfg.seed;
    // Non-deterministic run info; comparisons must ignore this object.
    manifest["run"] = {{"timestamp", timeutil::format_iso_timestamp(static_cast<int64_t>(
                                         std::chrono::duration_cast<std::chrono::seconds>(
                                             std::chrono::system_clock::now().time_since_epoch())
                                             .count()))},
                       {"wall_ms", stats.wall_ms},
                       {"parallelism", cfg.parallelism}};
    {
      std::ofstream out(track(cfg.out_dir / "manifest.json"), std::ios::trunc);
      out << manifest.dump(2) << '\n';
    }

    art.stats = stats;
    art.manifest = std::move(manifest);
    progress << "done: " << stats.exposure_passes << " exposure passes in "
             << static_cast<long>(stats.wall_ms) << " ms\n";
    return art;
  } catch (...) {
    cleanup();
    throw;
  }
}

}  // namespace transitheat::sim
