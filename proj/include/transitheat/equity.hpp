#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "transitheat/climate.hpp"
#include "transitheat/cohort.hpp"
#include "transitheat/exposure.hpp"

namespace transitheat::equity {

using cohort::Dimension;

// One routed trip joined with its exposure outcome; the unit every table
// aggregates over. Weights are survey expansion weights.
struct TripOutcome {
  std::string trip_id;
  double weight = 1.0;
  bool at_risk = false;
  cohort::Demographics demo;
  std::array<bool, 5> has_kind{};      // exposure::kVulnerabilityKinds order
  std::array<bool, 5> kind_flagged{};
};

struct RiskRow {
  std::string group;
  long samples = 0;           // unweighted record count
  double weighted_total = 0.0;
  double weighted_at_risk = 0.0;
  std::optional<double> specific_rate_pct;    // share of the group's trips at risk
  std::optional<double> composition_safe_pct; // group share of all safe trips
  std::optional<double> composition_risk_pct; // group share of all at-risk trips
  bool suppressed = false;    // below the reporting cell floor
};

struct RiskTable {
  Dimension dimension = Dimension::age;
  std::vector<RiskRow> rows;
};

namespace detail {

inline RiskTable build_table(const std::vector<TripOutcome>& outcomes, Dimension dim,
                             size_t suppress_floor) {
  const size_t n = cohort::dimension_cardinality(dim);
  RiskTable t;
  t.dimension = dim;
  t.rows.resize(n);
  double total_risk = 0.0, total_safe = 0.0;
  for (size_t g = 0; g < n; ++g) t.rows[g].group = cohort::group_token(dim, g);
  for (const auto& o : outcomes) {
    RiskRow& r = t.rows[o.demo.group(dim)];
    r.samples += 1;
    r.weighted_total += o.weight;
    if (o.at_risk) {
      r.weighted_at_risk += o.weight;
      total_risk += o.weight;
    } else {
      total_safe += o.weight;
    }
  }
  for (auto& r : t.rows) {
    if (r.weighted_total > 0)
      r.specific_rate_pct = 100.0 * r.weighted_at_risk / r.weighted_total;
    if (total_risk > 0) r.composition_risk_pct = 100.0 * r.weighted_at_risk / total_risk;
    if (total_safe > 0)
      r.composition_safe_pct = 100.0 * (r.weighted_total - r.weighted_at_risk) / total_safe;
    r.suppressed = r.samples > 0 && r.samples < static_cast<long>(suppress_floor);
  }
  return t;
}

}  // namespace detail

// Percentage of each group's weighted trips that are at risk. Empty groups
// keep a null rate.
inline RiskTable specific_exposure_rate(const std::vector<TripOutcome>& outcomes,
                                        Dimension dim, size_t suppress_floor = 50) {
  return detail::build_table(outcomes, dim, suppress_floor);
}

// Each group's share of the at-risk stratum and of the safe stratum. Empty
// strata yield all-null columns.
inline RiskTable exposure_composition(const std::vector<TripOutcome>& outcomes,
                                      Dimension dim, size_t suppress_floor = 50) {
  return detail::build_table(outcomes, dim, suppress_floor);
}

// Weighted share of all trips at risk, in percent. nullopt for no trips.
inline std::optional<double> overall_rate_pct(const std::vector<TripOutcome>& outcomes) {
  double total = 0.0, risk = 0.0;
  for (const auto& o : outcomes) {
    total += o.weight;
    if (o.at_risk) risk += o.weight;
  }
  if (total <= 0) return std::nullopt;
  return 100.0 * risk / total;
}

// Per segment kind: weighted share of trips containing the kind whose kind was
// flagged. Kinds absent from the cohort stay null.
inline std::array<std::optional<double>, 5> segment_share(
    const std::vector<TripOutcome>& outcomes) {
  std::array<double, 5> denom{}, num{};
  for (const auto& o : outcomes)
    for (size_t k = 0; k < 5; ++k) {
      if (!o.has_kind[k]) continue;
      denom[k] += o.weight;
      if (o.kind_flagged[k]) num[k] += o.weight;
    }
  std::array<std::optional<double>, 5> out;
  for (size_t k = 0; k < 5; ++k)
    if (denom[k] > 0) out[k] = 100.0 * num[k] / denom[k];
  return out;
}

// (year, scenario) -> weighted % at risk over all trips. The baseline year is
// scenario-independent and reported once.
struct SweepMatrix {
  int baseline_year = 0;
  std::vector<int> years;  // ascending
  std::vector<climate::Scenario> scenarios;
  std::map<std::pair<int, int>, double> cells;  // (year, scenario index) -> pct

  void add(int year, size_t scenario_idx, double pct) {
    if (std::find(years.begin(), years.end(), year) == years.end()) {
      years.push_back(year);
      std::sort(years.begin(), years.end());
    }
    cells[{year, static_cast<int>(scenario_idx)}] = pct;
  }

  std::optional<double> cell(int year, size_t scenario_idx) const {
    auto it = cells.find({year, static_cast<int>(scenario_idx)});
    if (it == cells.end()) return std::nullopt;
    return it->second;
  }
};

inline std::string format_pct(double v, int decimals) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

inline void write_risk_table_csv(const RiskTable& t, std::ostream& out) {
  out << "group,samples,weighted_trips,weighted_at_risk,specific_rate_pct,"
         "composition_safe_pct,composition_risk_pct,suppressed\n";
  for (const auto& r : t.rows) {
    out << csv::escape(r.group) << ',' << r.samples << ','
        << csv::format_double(r.weighted_total) << ','
        << csv::format_double(r.weighted_at_risk) << ',';
    out << (r.specific_rate_pct ? format_pct(*r.specific_rate_pct, 1) : "NA") << ',';
    out << (r.composition_safe_pct ? format_pct(*r.composition_safe_pct, 1) : "NA") << ',';
    out << (r.composition_risk_pct ? format_pct(*r.composition_risk_pct, 1) : "NA") << ',';
    out << (r.suppressed ? 1 : 0) << '\n';
  }
}

// Matrix CSV mirrors the report-table shape: the baseline year prints its rate
// in the first scenario column only.
inline void write_sweep_matrix_csv(const SweepMatrix& m, std::ostream& out) {
  out << "year";
  for (auto s : m.scenarios) out << ',' << climate::scenario_name(s);
  out << '\n';
  for (int y : m.years) {
    out << y;
    for (size_t s = 0; s < m.scenarios.size(); ++s) {
      out << ',';
      const auto c = m.cell(y, s);
      if (y == m.baseline_year) {
        if (s == 0 && c) out << format_pct(*c, 2);
      } else {
        out << (c ? format_pct(*c, 2) : "");
      }
    }
    out << '\n';
  }
}

inline nlohmann::json risk_table_json(const RiskTable& t) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : t.rows) {
    nlohmann::json j{{"group", r.group},
                     {"samples", r.samples},
                     {"weighted_trips", r.weighted_total},
                     {"weighted_at_risk", r.weighted_at_risk},
                     {"suppressed", r.suppressed}};
    j["specific_rate_pct"] =
        r.specific_rate_pct ? nlohmann::json(*r.specific_rate_pct) : nlohmann::json();
    j["composition_safe_pct"] =
        r.composition_safe_pct ? nlohmann::json(*r.composition_safe_pct) : nlohmann::json();
    j["composition_risk_pct"] =
        r.composition_risk_pct ? nlohmann::json(*r.composition_risk_pct) : nlohmann::json();
    rows.push_back(std::move(j));
  }
  return rows;
}

}  // namespace transitheat::equity
