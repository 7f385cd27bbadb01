#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lcbsim/geozone.hpp"
#include "lcbsim/simulation.hpp"

namespace lcb {

struct ZoneOutcome {
  ZoneKey zone;
  TrafficClass traffic_class = TrafficClass::Light;
  std::int64_t vehicle_count = 0;
  std::int64_t arrivals = 0;
  std::int64_t budget = 0;
  PathOutcome ensemble;
  std::array<PathOutcome, kAlgorithmCount> fixed{};
  PathOutcome tbo0;
  int initial_active = 0;
  std::int64_t active_switches = 0;
};

// Which committed path a metric is read from.
struct Subject {
  enum class Kind { Ensemble, Fixed, Tbo0 };
  Kind kind = Kind::Ensemble;
  int index = 0;  // algorithm index for Kind::Fixed

  static Subject ensemble() { return {Kind::Ensemble, 0}; }
  static Subject fixed(int i) { return {Kind::Fixed, i}; }
  static Subject tbo0() { return {Kind::Tbo0, 0}; }

  const PathOutcome& of(const ZoneOutcome& z) const;
  std::string label() const;
};

struct ClassAverages {
  std::size_t zones = 0;
  double avg_service = 0.0;     // seconds per zone
  double avg_selections = 0.0;  // per zone
};

// Means over the zones of one class; nullopt marks an empty class.
std::optional<ClassAverages> averages_by_class(std::span<const ZoneOutcome> outcomes,
                                               TrafficClass cls, Subject subject,
                                               Accounting accounting);

// Same, over every zone regardless of class.
std::optional<ClassAverages> averages_all(std::span<const ZoneOutcome> outcomes,
                                          Subject subject, Accounting accounting);

// For each of the nine TBO-x, the number of zones where it attains the
// maximal service; a zone counts for every algorithm tied at the max.
std::array<std::int64_t, kAlgorithmCount> best_algorithm_zone_counts(
    std::span<const ZoneOutcome> outcomes, Accounting accounting);

struct IntervalRecord {
  ZoneKey zone;
  std::int64_t interval = 0;
  Seconds start = 0;
  Cumulatives cumulative{};
  int winner = 0;  // lowest index on ties
  int active = -1; // ensemble's active algorithm during the interval, if known
};

// Rebuilds per-interval passive cumulatives from a zone's decision log
// (sum of s over entries whose verdict bit is set). Length is
// ceil((run_end - run_start) / d); empty intervals are kept.
std::vector<IntervalRecord> interval_winner_series(const ZoneKey& zone,
                                                   std::span<const DecisionLogEntry> log,
                                                   Seconds d, Seconds run_start,
                                                   Seconds run_end);

// (ensemble - baseline) / baseline * 100. Baseline zero: 0 if ensemble is
// also zero, +inf otherwise.
double percent_delta(double ensemble, double baseline);

struct BudgetOutcomes {
  double budget_fraction = 0.0;  // NaN when an absolute budget was given
  std::int64_t budget = 0;
  std::vector<ZoneOutcome> zones;
};

struct ComparisonRow {
  std::int64_t budget = 0;
  double budget_fraction = 0.0;
  std::optional<double> service_delta_pct;     // nullopt: class empty
  std::optional<double> selections_delta_pct;
};

// One row per budget setting: ensemble against `baseline` over the zones of
// one traffic class.
std::vector<ComparisonRow> comparison_table(std::span<const BudgetOutcomes> runs,
                                            TrafficClass cls, Subject baseline,
                                            Accounting accounting);

// Fixed-point, or "inf"/"-inf"/"NA".
std::string format_fixed(double value, int decimals);
std::string format_fixed(const std::optional<double>& value, int decimals);

// Report writers; column orders are fixed and documented in the README.
void write_zones_csv(std::span<const BudgetOutcomes> runs, std::ostream& out);
void write_intervals_csv(std::span<const IntervalRecord> records, std::ostream& out);
void write_summary_csv(std::span<const BudgetOutcomes> runs, Accounting accounting,
                       std::ostream& out);

}  // namespace lcb
