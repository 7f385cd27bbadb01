#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "lcbsim/events.hpp"
#include "lcbsim/selection.hpp"

namespace lcb {

struct SimulationOptions {
  std::uint64_t seed = 0;
  std::int64_t budget = 0;
  Seconds interval = 21'600;
  Seconds run_start = 0;
  Seconds run_end = 0;  // exclusive
  bool keep_decision_log = true;
};

// One ensemble decision, as exported to decisions.csv.
struct DecisionLogEntry {
  Seconds time = 0;
  VehicleIndex vehicle = 0;
  Seconds s = 0;
  std::uint16_t verdict_mask = 0;
  int active = 0;
  Verdict committed = Verdict::Reject;
  std::int64_t budget_remaining = 0;  // after the decision
};

// Totals of one committed path over the run.
struct PathOutcome {
  Seconds credited = 0;
  Seconds served = 0;
  std::int64_t selections = 0;
  std::int64_t broker_switches = 0;

  Seconds service(Accounting a) const { return a == Accounting::Credited ? credited : served; }
};

struct ZoneRun {
  PathOutcome ensemble;
  std::array<PathOutcome, kAlgorithmCount> fixed{};
  PathOutcome tbo0;
  int initial_active = 0;
  std::int64_t active_switches = 0;
  std::vector<int> active_per_interval;  // ceil(run length / interval) entries
  std::vector<BoundaryStep> boundaries;
  std::vector<DecisionLogEntry> log;
  std::vector<BrokerAssignment> assignments;  // ensemble broker tenures
};

std::int64_t interval_count(Seconds run_start, Seconds run_end, Seconds interval);

// Runs the ensemble, the nine standalone TBO-x and standalone TBO-0 over the
// same arrival stream and thresholds. Boundaries coinciding with an arrival
// are processed first.
ZoneRun simulate_zone(const ZoneArrivals& arrivals, const ZoneThresholds& thresholds,
                      const SimulationOptions& options);

// zone,time,vehicle_id,s,verdict_mask,active,committed,budget_remaining
void write_decision_log_csv(const ZoneKey& zone, std::span<const DecisionLogEntry> log,
                            std::span<const std::string> vehicle_ids, std::ostream& out,
                            bool header);

}  // namespace lcb
