#pragma once

#include <algorithm>
#include <array>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "transitheat/csv.hpp"
#include "transitheat/geo.hpp"
#include "transitheat/timeutil.hpp"

namespace transitheat::gtfs {

using timeutil::Date;

struct Stop {
  std::string id;
  std::string name;
  double lat = 0.0;
  double lon = 0.0;
  friend bool operator==(const Stop&, const Stop&) = default;
};

struct Route {
  std::string id;
  std::string short_name;
  int mode = 3;  // GTFS route_type; 3 = bus
  friend bool operator==(const Route&, const Route&) = default;
};

struct Trip {
  std::string id;
  std::string route_id;
  std::string service_id;
  friend bool operator==(const Trip&, const Trip&) = default;
};

struct StopTime {
  std::string trip_id;
  std::string stop_id;
  int32_t arrival_s = 0;    // seconds of service day, > 86400 allowed
  int32_t departure_s = 0;
  int32_t sequence = 0;
  friend bool operator==(const StopTime&, const StopTime&) = default;
};

struct Service {
  std::string id;
  std::array<bool, 7> weekday{};  // Monday..Sunday
  Date start;
  Date end;
  friend bool operator==(const Service&, const Service&) = default;
};

struct CalendarException {
  std::string service_id;
  Date date;
  int type = 0;  // 1 = added, 2 = removed
  friend bool operator==(const CalendarException&, const CalendarException&) = default;
};

struct TransferRule {
  std::string from_stop;
  std::string to_stop;
  int32_t min_transfer_s = 0;
  friend bool operator==(const TransferRule&, const TransferRule&) = default;
};

struct FeedBundle {
  std::vector<Stop> stops;
  std::vector<Route> routes;
  std::vector<Trip> trips;
  std::vector<StopTime> stop_times;  // grouped by trip in first-appearance order, sequence ascending
  std::vector<Service> services;
  std::vector<CalendarException> exceptions;
  std::vector<TransferRule> transfers;

  // Derived lookups, rebuilt by reindex().
  std::unordered_map<std::string, uint32_t> stop_index;
  std::unordered_map<std::string, uint32_t> route_index;
  std::unordered_map<std::string, uint32_t> trip_index;
  std::unordered_map<std::string, uint32_t> service_index;

  void reindex() {
    stop_index.clear();
    route_index.clear();
    trip_index.clear();
    service_index.clear();
    for (uint32_t i = 0; i < stops.size(); ++i) stop_index.emplace(stops[i].id, i);
    for (uint32_t i = 0; i < routes.size(); ++i) route_index.emplace(routes[i].id, i);
    for (uint32_t i = 0; i < trips.size(); ++i) trip_index.emplace(trips[i].id, i);
    for (uint32_t i = 0; i < services.size(); ++i) service_index.emplace(services[i].id, i);
  }

  bool same_tables(const FeedBundle& o) const {
    return stops == o.stops && routes == o.routes && trips == o.trips &&
           stop_times == o.stop_times && services == o.services &&
           exceptions == o.exceptions && transfers == o.transfers;
  }
};

struct ValidationIssue {
  std::string file;
  long line = 0;  // 0 when the issue is not tied to a single row
  std::string field;
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationIssue> errors;
  std::vector<ValidationIssue> warnings;
  bool ok() const { return errors.empty(); }

  nlohmann::json to_json() const {
    auto dump = [](const std::vector<ValidationIssue>& v) {
      nlohmann::json arr = nlohmann::json::array();
      for (const auto& i : v) {
        nlohmann::json j{{"file", i.file}, {"field", i.field}, {"message", i.message}};
        if (i.line > 0) j["line"] = i.line;
        arr.push_back(std::move(j));
      }
      return arr;
    };
    return nlohmann::json{{"ok", ok()},
                          {"error_count", errors.size()},
                          {"warning_count", warnings.size()},
                          {"errors", dump(errors)},
                          {"warnings", dump(warnings)}};
  }

  std::string summary(size_t max_items = 20) const {
    std::string s;
    size_t n = 0;
    for (const auto& e : errors) {
      if (n++ >= max_items) {
        s += "  ... " + std::to_string(errors.size() - max_items) + " more\n";
        break;
      }
      s += "  " + e.file + (e.line ? ":" + std::to_string(e.line) : "") + " [" +
           e.field + "] " + e.message + "\n";
    }
    return s;
  }
};

namespace detail {

inline std::filesystem::path table_path(const std::filesystem::path& dir, const char* name) {
  return dir / name;
}

inline void require_table(const std::filesystem::path& dir, const char* name) {
  if (!std::filesystem::exists(table_path(dir, name)))
    throw InputError("GTFS feed at " + dir.string() + " is missing required table " + name);
}

}  // namespace detail

// Parses the text tables without cross-reference validation. Malformed rows throw.
inline FeedBundle load_feed_raw(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw InputError("not a directory: " + dir.string());
  for (const char* t : {"stops.txt", "routes.txt", "trips.txt", "stop_times.txt", "calendar.txt"})
    detail::require_table(dir, t);

  FeedBundle b;
  {
    csv::Reader r(dir / "stops.txt");
    const int c_id = r.require_col("stop_id");
    const int c_name = r.col("stop_name");
    const int c_lat = r.require_col("stop_lat");
    const int c_lon = r.require_col("stop_lon");
    std::vector<std::string> row;
    while (r.next(row)) {
      Stop s;
      s.id = r.get(row, c_id, "stop_id");
      if (s.id.empty()) r.fail("stop_id", "empty id");
      if (c_name >= 0 && c_name < static_cast<int>(row.size())) s.name = row[c_name];
      s.lat = r.get_double(row, c_lat, "stop_lat");
      s.lon = r.get_double(row, c_lon, "stop_lon");
      if (s.lat < -90 || s.lat > 90) r.fail("stop_lat", "latitude out of range");
      if (s.lon < -180 || s.lon > 180) r.fail("stop_lon", "longitude out of range");
      b.stops.push_back(std::move(s));
    }
  }
  {
    csv::Reader r(dir / "routes.txt");
    const int c_id = r.require_col("route_id");
    const int c_short = r.col("route_short_name");
    const int c_type = r.require_col("route_type");
    std::vector<std::string> row;
    while (r.next(row)) {
      Route rt;
      rt.id = r.get(row, c_id, "route_id");
      if (rt.id.empty()) r.fail("route_id", "empty id");
      if (c_short >= 0 && c_short < static_cast<int>(row.size())) rt.short_name = row[c_short];
      rt.mode = static_cast<int>(r.get_long(row, c_type, "route_type"));
      b.routes.push_back(std::move(rt));
    }
  }
  {
    csv::Reader r(dir / "trips.txt");
    const int c_route = r.require_col("route_id");
    const int c_service = r.require_col("service_id");
    const int c_id = r.require_col("trip_id");
    std::vector<std::string> row;
    while (r.next(row)) {
      Trip t;
      t.route_id = r.get(row, c_route, "route_id");
      t.service_id = r.get(row, c_service, "service_id");
      t.id = r.get(row, c_id, "trip_id");
      if (t.id.empty()) r.fail("trip_id", "empty id");
      b.trips.push_back(std::move(t));
    }
  }
  {
    csv::Reader r(dir / "stop_times.txt");
    const int c_trip = r.require_col("trip_id");
    const int c_arr = r.require_col("arrival_time");
    const int c_dep = r.require_col("departure_time");
    const int c_stop = r.require_col("stop_id");
    const int c_seq = r.require_col("stop_sequence");
    std::vector<std::string> row;
    while (r.next(row)) {
      StopTime st;
      st.trip_id = r.get(row, c_trip, "trip_id");
      st.arrival_s = timeutil::parse_hms_or(r.get(row, c_arr, "arrival_time"), -1);
      if (st.arrival_s < 0) r.fail("arrival_time", "bad time '" + row[c_arr] + "'");
      st.departure_s = timeutil::parse_hms_or(r.get(row, c_dep, "departure_time"), -1);
      if (st.departure_s < 0) r.fail("departure_time", "bad time '" + row[c_dep] + "'");
      st.stop_id = r.get(row, c_stop, "stop_id");
      st.sequence = static_cast<int32_t>(r.get_long(row, c_seq, "stop_sequence"));
      b.stop_times.push_back(std::move(st));
    }
  }
  {
    csv::Reader r(dir / "calendar.txt");
    const int c_id = r.require_col("service_id");
    static constexpr const char* days[7] = {"monday", "tuesday", "wednesday", "thursday",
                                            "friday", "saturday", "sunday"};
    int c_day[7];
    for (int i = 0; i < 7; ++i) c_day[i] = r.require_col(days[i]);
    const int c_start = r.require_col("start_date");
    const int c_end = r.require_col("end_date");
    std::vector<std::string> row;
    while (r.next(row)) {
      Service s;
      s.id = r.get(row, c_id, "service_id");
      for (int i = 0; i < 7; ++i) {
        const long v = r.get_long(row, c_day[i], days[i]);
        if (v != 0 && v != 1) r.fail(days[i], "expected 0 or 1");
        s.weekday[static_cast<size_t>(i)] = v == 1;
      }
      try {
        s.start = timeutil::parse_date_compact(r.get(row, c_start, "start_date"));
        s.end = timeutil::parse_date_compact(r.get(row, c_end, "end_date"));
      } catch (const InputError& e) {
        r.fail("start_date/end_date", e.what());
      }
      b.services.push_back(std::move(s));
    }
  }
  if (std::filesystem::exists(dir / "calendar_dates.txt")) {
    csv::Reader r(dir / "calendar_dates.txt");
    const int c_id = r.require_col("service_id");
    const int c_date = r.require_col("date");
    const int c_type = r.require_col("exception_type");
    std::vector<std::string> row;
    while (r.next(row)) {
      CalendarException e;
      e.service_id = r.get(row, c_id, "service_id");
      try {
        e.date = timeutil::parse_date_compact(r.get(row, c_date, "date"));
      } catch (const InputError& ex) {
        r.fail("date", ex.what());
      }
      e.type = static_cast<int>(r.get_long(row, c_type, "exception_type"));
      if (e.type != 1 && e.type != 2) r.fail("exception_type", "expected 1 or 2");
      b.exceptions.push_back(std::move(e));
    }
  }
  if (std::filesystem::exists(dir / "transfers.txt")) {
    csv::Reader r(dir / "transfers.txt");
    const int c_from = r.require_col("from_stop_id");
    const int c_to = r.require_col("to_stop_id");
    const int c_min = r.col("min_transfer_time");
    std::vector<std::string> row;
    while (r.next(row)) {
      TransferRule t;
      t.from_stop = r.get(row, c_from, "from_stop_id");
      t.to_stop = r.get(row, c_to, "to_stop_id");
      t.min_transfer_s = 0;
      if (c_min >= 0 && c_min < static_cast<int>(row.size()) && !row[c_min].empty())
        t.min_transfer_s = static_cast<int32_t>(r.get_long(row, c_min, "min_transfer_time"));
      b.transfers.push_back(std::move(t));
    }
  }

  // Normalize stop_times: group by trip in first-appearance order, ascending sequence.
  std::unordered_map<std::string, uint32_t> first_seen;
  first_seen.reserve(b.trips.size());
  uint32_t next_rank = 0;
  for (const auto& st : b.stop_times)
    if (first_seen.emplace(st.trip_id, next_rank).second) ++next_rank;
  std::stable_sort(b.stop_times.begin(), b.stop_times.end(),
                   [&](const StopTime& a, const StopTime& c) {
                     const uint32_t ra = first_seen[a.trip_id], rc = first_seen[c.trip_id];
                     if (ra != rc) return ra < rc;
                     return a.sequence < c.sequence;
                   });

  b.reindex();
  return b;
}

inline ValidationReport validate(const FeedBundle& b) {
  ValidationReport rep;
  auto err = [&](std::string file, std::string field, std::string msg) {
    rep.errors.push_back({std::move(file), 0, std::move(field), std::move(msg)});
  };

  for (const auto& st : b.stop_times) {
    if (!b.trip_index.count(st.trip_id))
      err("stop_times.txt", "trip_id", "references unknown trip '" + st.trip_id + "'");
    if (!b.stop_index.count(st.stop_id))
      err("stop_times.txt", "stop_id", "references unknown stop '" + st.stop_id + "'");
    if (st.departure_s < st.arrival_s)
      err("stop_times.txt", "departure_time",
          "trip '" + st.trip_id + "' departs before it arrives at stop '" + st.stop_id + "'");
  }
  for (const auto& t : b.trips) {
    if (!b.route_index.count(t.route_id))
      err("trips.txt", "route_id", "trip '" + t.id + "' references unknown route '" + t.route_id + "'");
    if (!b.service_index.count(t.service_id) &&
        std::none_of(b.exceptions.begin(), b.exceptions.end(),
                     [&](const CalendarException& e) { return e.service_id == t.service_id; }))
      err("trips.txt", "service_id", "trip '" + t.id + "' references unknown service '" + t.service_id + "'");
  }
  for (const auto& e : b.exceptions)
    if (e.type == 2 && !b.service_index.count(e.service_id))
      rep.warnings.push_back({"calendar_dates.txt", 0, "service_id",
                              "removal exception for unknown service '" + e.service_id + "'"});
  for (const auto& t : b.transfers) {
    if (!b.stop_index.count(t.from_stop))
      err("transfers.txt", "from_stop_id", "unknown stop '" + t.from_stop + "'");
    if (!b.stop_index.count(t.to_stop))
      err("transfers.txt", "to_stop_id", "unknown stop '" + t.to_stop + "'");
    if (t.min_transfer_s < 0)
      err("transfers.txt", "min_transfer_time", "negative transfer time");
  }

  // Per-trip ordering: sequences strictly increasing, times non-decreasing, >= 2 stops.
  size_t i = 0;
  std::set<std::string> trips_with_times;
  while (i < b.stop_times.size()) {
    size_t j = i;
    while (j < b.stop_times.size() && b.stop_times[j].trip_id == b.stop_times[i].trip_id) ++j;
    const std::string& trip = b.stop_times[i].trip_id;
    trips_with_times.insert(trip);
    if (j - i < 2)
      err("stop_times.txt", "trip_id", "trip '" + trip + "' has fewer than 2 stop_times");
    for (size_t k = i + 1; k < j; ++k) {
      if (b.stop_times[k].sequence <= b.stop_times[k - 1].sequence)
        err("stop_times.txt", "stop_sequence",
            "trip '" + trip + "' sequence not strictly increasing");
      if (b.stop_times[k].arrival_s < b.stop_times[k - 1].departure_s)
        err("stop_times.txt", "arrival_time",
            "trip '" + trip + "' time travels backwards at sequence " +
                std::to_string(b.stop_times[k].sequence));
    }
    i = j;
  }
  for (const auto& t : b.trips)
    if (!trips_with_times.count(t.id))
      err("trips.txt", "trip_id", "trip '" + t.id + "' has no stop_times");

  return rep;
}

// Parse + validate; throws on any validation error, listing offenders.
inline FeedBundle load_feed(const std::filesystem::path& dir) {
  FeedBundle b = load_feed_raw(dir);
  const ValidationReport rep = validate(b);
  if (!rep.ok())
    throw InputError("GTFS feed at " + dir.string() + " failed validation (" +
                     std::to_string(rep.errors.size()) + " errors):\n" + rep.summary());
  return b;
}

inline void save_feed(const FeedBundle& b, const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  auto open = [&](const char* name) {
    std::ofstream out(dir / name, std::ios::trunc);
    if (!out) throw InputError("cannot write " + (dir / name).string());
    return out;
  };
  {
    auto out = open("stops.txt");
    out << "stop_id,stop_name,stop_lat,stop_lon\n";
    for (const auto& s : b.stops)
      out << csv::escape(s.id) << ',' << csv::escape(s.name) << ','
          << csv::format_double(s.lat) << ',' << csv::format_double(s.lon) << '\n';
  }
  {
    auto out = open("routes.txt");
    out << "route_id,route_short_name,route_type\n";
    for (const auto& r : b.routes)
      out << csv::escape(r.id) << ',' << csv::escape(r.short_name) << ',' << r.mode << '\n';
  }
  {
    auto out = open("trips.txt");
    out << "route_id,service_id,trip_id\n";
    for (const auto& t : b.trips)
      out << csv::escape(t.route_id) << ',' << csv::escape(t.service_id) << ','
          << csv::escape(t.id) << '\n';
  }
  {
    auto out = open("stop_times.txt");
    out << "trip_id,arrival_time,departure_time,stop_id,stop_sequence\n";
    for (const auto& st : b.stop_times)
      out << csv::escape(st.trip_id) << ',' << timeutil::format_hms(st.arrival_s) << ','
          << timeutil::format_hms(st.departure_s) << ',' << csv::escape(st.stop_id) << ','
          << st.sequence << '\n';
  }
  {
    auto out = open("calendar.txt");
    out << "service_id,monday,tuesday,wednesday,thursday,friday,saturday,sunday,"
           "start_date,end_date\n";
    for (const auto& s : b.services) {
      out << csv::escape(s.id);
      for (bool d : s.weekday) out << ',' << (d ? 1 : 0);
      out << ',' << timeutil::format_date_compact(s.start) << ','
          << timeutil::format_date_compact(s.end) << '\n';
    }
  }
  if (!b.exceptions.empty()) {
    auto out = open("calendar_dates.txt");
    out << "service_id,date,exception_type\n";
    for (const auto& e : b.exceptions)
      out << csv::escape(e.service_id) << ',' << timeutil::format_date_compact(e.date)
          << ',' << e.type << '\n';
  }
  if (!b.transfers.empty()) {
    auto out = open("transfers.txt");
    out << "from_stop_id,to_stop_id,min_transfer_time\n";
    for (const auto& t : b.transfers)
      out << csv::escape(t.from_stop) << ',' << csv::escape(t.to_stop) << ','
          << t.min_transfer_s << '\n';
  }
}

// Trip ids whose service runs on the given date. Empty set + warning when the
// date precedes or follows every service range.
inline std::set<std::string> active_trips(const FeedBundle& b, const Date& date,
                                          std::vector<std::string>* warnings = nullptr) {
  const int wd = timeutil::weekday_mon0(date);
  std::set<std::string> active_services;
  bool in_any_range = false;
  for (const auto& s : b.services) {
    if (date >= s.start && date <= s.end) {
      in_any_range = true;
      if (s.weekday[static_cast<size_t>(wd)]) active_services.insert(s.id);
    }
  }
  for (const auto& e : b.exceptions) {
    if (e.date == date) {
      in_any_range = true;
      if (e.type == 1) active_services.insert(e.service_id);
      else active_services.erase(e.service_id);
    }
  }
  if (!in_any_range && warnings)
    warnings->push_back("date " + timeutil::format_date(date) +
                        " is outside every service range in the feed");
  std::set<std::string> out;
  for (const auto& t : b.trips)
    if (active_services.count(t.service_id)) out.insert(t.id);
  return out;
}

}  // namespace transitheat::gtfs
