#pragma once

#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "transitheat/csv.hpp"
#include "transitheat/geo.hpp"
#include "transitheat/network.hpp"
#include "transitheat/router.hpp"
#include "transitheat/timeutil.hpp"

namespace transitheat::cohort {

using geo::LatLon;
using timeutil::Date;

// Closed demographic vocabularies. Parsing is strict: anything outside the
// set rejects the row.
inline constexpr std::array<const char*, 7> kAgeBands = {
    "under-18", "18-24", "25-34", "35-44", "45-54", "55-64", "65+"};
inline constexpr std::array<const char*, 8> kIncomeBands = {
    "<10k", "10k-20k", "20k-30k", "30k-40k", "40k-50k", "50k-60k", "60k-75k", "75k+"};
inline constexpr std::array<const char*, 5> kRaces = {
    "black", "white", "asian", "american-indian-alaska", "other"};
inline constexpr std::array<const char*, 3> kGenders = {"female", "male", "other"};
inline constexpr std::array<const char*, 3> kVehicles = {"0", "1", "2+"};

enum class Dimension { age, income, race, gender, vehicles };
inline constexpr std::array<Dimension, 5> kAllDimensions = {
    Dimension::age, Dimension::income, Dimension::race, Dimension::gender,
    Dimension::vehicles};

inline const char* dimension_name(Dimension d) {
  switch (d) {
    case Dimension::age: return "age";
    case Dimension::income: return "income";
    case Dimension::race: return "race";
    case Dimension::gender: return "gender";
    default: return "vehicles";
  }
}

inline size_t dimension_cardinality(Dimension d) {
  switch (d) {
    case Dimension::age: return kAgeBands.size();
    case Dimension::income: return kIncomeBands.size();
    case Dimension::race: return kRaces.size();
    case Dimension::gender: return kGenders.size();
    default: return kVehicles.size();
  }
}

inline const char* group_token(Dimension d, size_t idx) {
  switch (d) {
    case Dimension::age: return kAgeBands.at(idx);
    case Dimension::income: return kIncomeBands.at(idx);
    case Dimension::race: return kRaces.at(idx);
    case Dimension::gender: return kGenders.at(idx);
    default: return kVehicles.at(idx);
  }
}

template <size_t N>
int token_index(const std::array<const char*, N>& tokens, const std::string& s) {
  for (size_t i = 0; i < N; ++i)
    if (s == tokens[i]) return static_cast<int>(i);
  return -1;
}

struct Demographics {
  uint8_t age = 0;       // index into kAgeBands
  uint8_t income = 0;    // kIncomeBands
  uint8_t race = 0;      // kRaces
  uint8_t gender = 0;    // kGenders
  uint8_t vehicles = 0;  // kVehicles

  uint8_t group(Dimension d) const {
    switch (d) {
      case Dimension::age: return age;
      case Dimension::income: return income;
      case Dimension::race: return race;
      case Dimension::gender: return gender;
      default: return vehicles;
    }
  }
};

struct TripRecord {
  std::string id;
  LatLon origin;
  LatLon destination;
  int32_t depart_s = 0;
  Date service_date;
  double weight = 1.0;  // trip-equivalents
  Demographics demo;
  AccessMode access_mode = AccessMode::walk;
  std::string board_stop_hint;
};

struct RejectedRow {
  long line = 0;
  std::string reason;
  double weight = 0.0;  // parsed weight when available, else 0
};

struct CohortLoad {
  std::vector<TripRecord> records;
  std::vector<RejectedRow> rejects;
  double accepted_weight = 0.0;
  double rejected_weight = 0.0;
};

// Survey-shaped CSV. Invalid rows land in the rejects report rather than being
// silently dropped; more than half the rows rejecting aborts the load.
inline CohortLoad load_trips(const std::filesystem::path& path,
                             const geo::BBox& study_box = {}) {
  CohortLoad out;
  csv::Reader r(path);
  const int c_id = r.require_col("id");
  const int c_olat = r.require_col("origin_lat");
  const int c_olon = r.require_col("origin_lon");
  const int c_dlat = r.require_col("dest_lat");
  const int c_dlon = r.require_col("dest_lon");
  const int c_dep = r.require_col("depart");
  const int c_date = r.require_col("date");
  const int c_w = r.require_col("weight");
  const int c_age = r.require_col("age");
  const int c_inc = r.require_col("income");
  const int c_race = r.require_col("race");
  const int c_gen = r.require_col("gender");
  const int c_veh = r.require_col("vehicles");
  const int c_mode = r.col("access_mode");
  const int c_hint = r.col("board_stop_hint");

  long rows = 0;
  std::vector<std::string> row;
  while (r.next(row)) {
    ++rows;
    double weight = 0.0;
    try {
      TripRecord t;
      t.id = r.get(row, c_id, "id");
      t.origin = {r.get_double(row, c_olat, "origin_lat"),
                  r.get_double(row, c_olon, "origin_lon")};
      t.destination = {r.get_double(row, c_dlat, "dest_lat"),
                       r.get_double(row, c_dlon, "dest_lon")};
      t.depart_s = timeutil::parse_hms(r.get(row, c_dep, "depart"));
      t.service_date = timeutil::parse_date(r.get(row, c_date, "date"));
      weight = r.get_double(row, c_w, "weight");
      t.weight = weight;
      if (t.weight <= 0) r.fail("weight", "expansion weight must be positive");
      if (!study_box.contains(t.origin)) r.fail("origin_lat", "origin outside study area");
      if (!study_box.contains(t.destination)) r.fail("dest_lat", "destination outside study area");

      auto field = [&](int c, const char* name) -> const std::string& {
        return r.get(row, c, name);
      };
      int v;
      if ((v = token_index(kAgeBands, field(c_age, "age"))) < 0)
        r.fail("age", "unknown band '" + row[static_cast<size_t>(c_age)] + "'");
      t.demo.age = static_cast<uint8_t>(v);
      if ((v = token_index(kIncomeBands, field(c_inc, "income"))) < 0)
        r.fail("income", "unknown band '" + row[static_cast<size_t>(c_inc)] + "'");
      t.demo.income = static_cast<uint8_t>(v);
      if ((v = token_index(kRaces, field(c_race, "race"))) < 0)
        r.fail("race", "unknown value '" + row[static_cast<size_t>(c_race)] + "'");
      t.demo.race = static_cast<uint8_t>(v);
      if ((v = token_index(kGenders, field(c_gen, "gender"))) < 0)
        r.fail("gender", "unknown value '" + row[static_cast<size_t>(c_gen)] + "'");
      t.demo.gender = static_cast<uint8_t>(v);
      if ((v = token_index(kVehicles, field(c_veh, "vehicles"))) < 0)
        r.fail("vehicles", "unknown value '" + row[static_cast<size_t>(c_veh)] + "'");
      t.demo.vehicles = static_cast<uint8_t>(v);
      if (c_mode >= 0 && c_mode < static_cast<int>(row.size()) &&
          !row[static_cast<size_t>(c_mode)].empty())
        t.access_mode = parse_access_mode(row[static_cast<size_t>(c_mode)]);
      if (c_hint >= 0 && c_hint < static_cast<int>(row.size()))
        t.board_stop_hint = row[static_cast<size_t>(c_hint)];

      out.accepted_weight += t.weight;
      out.records.push_back(std::move(t));
    } catch (const InputError& e) {
      out.rejects.push_back({r.line_no(), e.what(), weight});
      out.rejected_weight += weight;
    }
  }
  if (rows > 0 && out.rejects.size() * 2 > static_cast<size_t>(rows))
    throw InputError(path.string() + ": " + std::to_string(out.rejects.size()) + " of " +
                     std::to_string(rows) + " rows rejected (over 50%), aborting");
  return out;
}

inline void write_rejects_report(const CohortLoad& load, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw InputError("cannot write " + path.string());
  out << "line,weight,reason\n";
  for (const auto& rej : load.rejects)
    out << rej.line << ',' << csv::format_double(rej.weight) << ',' << csv::escape(rej.reason)
        << '\n';
}

// Deterministic synthetic cohort: origins and destinations sampled near
// network stops, demographics sampled independently per configured marginals.
struct SynthConfig {
  size_t count = 1000;
  uint64_t seed = 1;
  Date date_min{2019, 8, 7};
  Date date_max{2019, 8, 7};
  int32_t depart_min_s = 6 * 3600;
  int32_t depart_max_s = 21 * 3600;
  double origin_offset_m = 800.0;
  double weight_min = 1.0;
  double weight_max = 8.0;
  std::array<std::vector<double>, 5> marginals;    // per Dimension, sums to 1
  std::vector<double> access_mode_marginal = {1.0, 0.0, 0.0};  // walk, bike, micromobility

  SynthConfig() {
    marginals[0] = {0.05, 0.22, 0.24, 0.17, 0.14, 0.10, 0.08};          // age
    marginals[1] = {0.18, 0.20, 0.16, 0.13, 0.11, 0.09, 0.07, 0.06};    // income
    marginals[2] = {0.55, 0.25, 0.08, 0.02, 0.10};                      // race
    marginals[3] = {0.47, 0.51, 0.02};                                  // gender
    marginals[4] = {0.55, 0.30, 0.15};                                  // vehicles
  }

  void validate_or_throw() const {
    for (size_t d = 0; d < marginals.size(); ++d) {
      if (marginals[d].size() != dimension_cardinality(kAllDimensions[d]))
        throw InputError(std::string("marginal for ") + dimension_name(kAllDimensions[d]) +
                         " has the wrong number of entries");
      double sum = 0;
      for (double p : marginals[d]) {
        if (p < 0) throw InputError("marginal probabilities must be non-negative");
        sum += p;
      }
      if (std::fabs(sum - 1.0) > 1e-6)
        throw InputError(std::string("marginal for ") + dimension_name(kAllDimensions[d]) +
                         " sums to " + std::to_string(sum) + ", expected 1");
    }
    double sum = 0;
    for (double p : access_mode_marginal) sum += p;
    if (access_mode_marginal.size() != 3 || std::fabs(sum - 1.0) > 1e-6)
      throw InputError("access_mode marginal must have walk,bike,micromobility summing to 1");
    if (date_max < date_min) throw InputError("date_max before date_min");
    if (depart_max_s < depart_min_s) throw InputError("depart_max before depart_min");
  }

  static SynthConfig from_file(const std::filesystem::path& path) {
    SynthConfig c;
    auto kv = csv::parse_kv_file(path);
    auto take = [&](const char* key, auto parse) {
      auto it = kv.find(key);
      if (it != kv.end()) parse(it->second);
    };
    take("count", [&](const std::string& v) { c.count = std::stoull(v); });
    take("seed", [&](const std::string& v) { c.seed = std::stoull(v); });
    take("date", [&](const std::string& v) { c.date_min = c.date_max = timeutil::parse_date(v); });
    take("date_min", [&](const std::string& v) { c.date_min = timeutil::parse_date(v); });
    take("date_max", [&](const std::string& v) { c.date_max = timeutil::parse_date(v); });
    take("depart_min", [&](const std::string& v) { c.depart_min_s = timeutil::parse_hms(v); });
    take("depart_max", [&](const std::string& v) { c.depart_max_s = timeutil::parse_hms(v); });
    take("origin_offset_m", [&](const std::string& v) { c.origin_offset_m = std::stod(v); });
    take("weight_min", [&](const std::string& v) { c.weight_min = std::stod(v); });
    take("weight_max", [&](const std::string& v) { c.weight_max = std::stod(v); });

    auto parse_marginal = [&](const std::string& text, Dimension d) {
      std::vector<double> probs(dimension_cardinality(d), 0.0);
      std::stringstream ss(text);
      std::string part;
      while (std::getline(ss, part, ',')) {
        const size_t colon = part.rfind(':');
        if (colon == std::string::npos)
          throw InputError("bad marginal entry '" + part + "' (expected token:prob)");
        const std::string token = csv::trim(part.substr(0, colon));
        int idx = -1;
        for (size_t i = 0; i < dimension_cardinality(d); ++i)
          if (token == group_token(d, i)) idx = static_cast<int>(i);
        if (idx < 0)
          throw InputError(std::string("unknown ") + dimension_name(d) + " token '" + token + "'");
        probs[static_cast<size_t>(idx)] = std::stod(part.substr(colon + 1));
      }
      return probs;
    };
    for (size_t d = 0; d < kAllDimensions.size(); ++d)
      take(dimension_name(kAllDimensions[d]), [&](const std::string& v) {
        c.marginals[d] = parse_marginal(v, kAllDimensions[d]);
      });
    take("access_mode", [&](const std::string& v) {
      std::vector<double> probs(3, 0.0);
      std::stringstream ss(v);
      std::string part;
      while (std::getline(ss, part, ',')) {
        const size_t colon = part.rfind(':');
        if (colon == std::string::npos) throw InputError("bad access_mode entry '" + part + "'");
        const std::string token = csv::trim(part.substr(0, colon));
        const double p = std::stod(part.substr(colon + 1));
        if (token == "walk") probs[0] = p;
        else if (token == "bike") probs[1] = p;
        else if (token == "micromobility") probs[2] = p;
        else throw InputError("unknown access mode '" + token + "'");
      }
      c.access_mode_marginal = probs;
    });
    c.validate_or_throw();
    return c;
  }
};

namespace detail {

// Hand-rolled draws keep the byte stream independent of the standard
// library's distribution implementations.
class Rng {
 public:
  explicit Rng(uint64_t seed) : eng_(seed) {}
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  int64_t uniform_int(int64_t lo, int64_t hi) {  // inclusive
    return lo + static_cast<int64_t>(uniform() * static_cast<double>(hi - lo + 1));
  }
  size_t pick(const std::vector<double>& probs) {
    const double u = uniform();
    double acc = 0;
    for (size_t i = 0; i < probs.size(); ++i) {
      acc += probs[i];
      if (u < acc) return i;
    }
    return probs.size() - 1;
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace detail

inline std::vector<TripRecord> synthesize(const SynthConfig& cfg,
                                          const net::TransitNetwork& net) {
  cfg.validate_or_throw();
  if (net.stop_count() == 0) throw InputError("cannot synthesize trips on an empty network");
  detail::Rng rng(cfg.seed);
  const int64_t day_min = timeutil::days_from_civil(cfg.date_min);
  const int64_t day_max = timeutil::days_from_civil(cfg.date_max);

  std::vector<TripRecord> out;
  out.reserve(cfg.count);
  for (size_t i = 0; i < cfg.count; ++i) {
    TripRecord t;
    t.id = "synth-" + std::to_string(i);
    const size_t o_stop = static_cast<size_t>(rng.uniform_int(0, static_cast<int64_t>(net.stop_count()) - 1));
    size_t d_stop = static_cast<size_t>(rng.uniform_int(0, static_cast<int64_t>(net.stop_count()) - 1));
    if (net.stop_count() > 1)
      while (d_stop == o_stop)
        d_stop = static_cast<size_t>(rng.uniform_int(0, static_cast<int64_t>(net.stop_count()) - 1));
    auto jitter = [&](const LatLon& p) {
      const double r = cfg.origin_offset_m * std::sqrt(rng.uniform());
      const double a = rng.uniform() * 2.0 * 3.14159265358979323846;
      return geo::offset_m(p, r * std::cos(a), r * std::sin(a));
    };
    t.origin = jitter(net.stop_pos[o_stop]);
    t.destination = jitter(net.stop_pos[d_stop]);
    t.depart_s = static_cast<int32_t>(rng.uniform_int(cfg.depart_min_s, cfg.depart_max_s));
    t.service_date = timeutil::civil_from_days(rng.uniform_int(day_min, day_max));
    t.weight = rng.uniform(cfg.weight_min, cfg.weight_max);
    t.demo.age = static_cast<uint8_t>(rng.pick(cfg.marginals[0]));
    t.demo.income = static_cast<uint8_t>(rng.pick(cfg.marginals[1]));
    t.demo.race = static_cast<uint8_t>(rng.pick(cfg.marginals[2]));
    t.demo.gender = static_cast<uint8_t>(rng.pick(cfg.marginals[3]));
    t.demo.vehicles = static_cast<uint8_t>(rng.pick(cfg.marginals[4]));
    t.access_mode = static_cast<AccessMode>(rng.pick(cfg.access_mode_marginal));
    out.push_back(std::move(t));
  }
  return out;
}

// Airport exclusion zone: either a boundary-inclusive polygon or a set of stop
// ids with a radius.
struct AirportZone {
  std::vector<LatLon> polygon;
  std::vector<std::string> stop_ids;
  double stop_radius_m = 500.0;

  bool contains(const LatLon& p, const net::TransitNetwork* net) const {
    if (!polygon.empty() && geo::point_in_polygon(p, polygon)) return true;
    if (net) {
      for (const auto& id : stop_ids) {
        auto it = net->stop_index.find(id);
        if (it != net->stop_index.end() &&
            geo::haversine_m(p, net->stop_pos[it->second]) <= stop_radius_m)
          return true;
      }
    }
    return false;
  }

  // JSON polygon (GeoJSON ring, lon-first) or a plain list of stop ids.
  static AirportZone from_file(const std::filesystem::path& path, double radius_m = 500.0) {
    AirportZone z;
    z.stop_radius_m = radius_m;
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path.string());
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const size_t first = content.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && content[first] == '{') {
      nlohmann::json j = nlohmann::json::parse(content);
      if (j.contains("geometry")) j = j["geometry"];
      if (!j.contains("coordinates"))
        throw InputError(path.string() + ": polygon JSON needs a coordinates array");
      const auto& ring = j["coordinates"][0];
      for (const auto& pt : ring)
        z.polygon.push_back({pt[1].get<double>(), pt[0].get<double>()});
      if (z.polygon.size() < 3) throw InputError(path.string() + ": polygon needs 3+ vertices");
    } else {
      std::stringstream ss(content);
      std::string line;
      while (std::getline(ss, line)) {
        const std::string id = csv::trim(line);
        if (!id.empty() && id[0] != '#') z.stop_ids.push_back(id);
      }
      if (z.stop_ids.empty()) throw InputError(path.string() + ": no stop ids in zone file");
    }
    return z;
  }
};

struct FilterOutcome {
  std::vector<TripRecord> kept;
  size_t removed_count = 0;
  double removed_weight = 0.0;
};

// Drops records with an endpoint inside the zone (boundary counts as inside).
inline FilterOutcome filter_airport(std::vector<TripRecord> trips, const AirportZone& zone,
                                    const net::TransitNetwork* net = nullptr) {
  FilterOutcome out;
  for (auto& t : trips) {
    if (zone.contains(t.origin, net) || zone.contains(t.destination, net)) {
      ++out.removed_count;
      out.removed_weight += t.weight;
    } else {
      out.kept.push_back(std::move(t));
    }
  }
  return out;
}

// Keeps records whose service date falls in the closed range.
inline FilterOutcome filter_window(std::vector<TripRecord> trips, const Date& first,
                                   const Date& last) {
  FilterOutcome out;
  for (auto& t : trips) {
    if (t.service_date >= first && t.service_date <= last) {
      out.kept.push_back(std::move(t));
    } else {
      ++out.removed_count;
      out.removed_weight += t.weight;
    }
  }
  return out;
}

}  // namespace transitheat::cohort
