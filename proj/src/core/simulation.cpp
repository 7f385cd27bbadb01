#include "lcbsim/simulation.hpp"

#include <ostream>

#include <fmt/format.h>

#include "lcbsim/error.hpp"

namespace lcb {

std::int64_t interval_count(Seconds run_start, Seconds run_end, Seconds interval) {
  if (interval <= 0) {
    throw ArgumentError("interval must be positive");
  }
  const Seconds length = run_end - run_start;
  return length <= 0 ? 0 : (length + interval - 1) / interval;
}

namespace {

PathOutcome outcome_of(const CommitLedger& ledger) {
  return PathOutcome{ledger.credited_total(), ledger.served_total(), ledger.selections(),
                     ledger.broker_switches()};
}

}  // namespace

ZoneRun simulate_zone(const ZoneArrivals& arrivals, const ZoneThresholds& thresholds,
                      const SimulationOptions& options) {
  ZoneRun run;
  auto ensemble = ensemble_init(options.seed, arrivals.zone, options.budget, options.interval,
                                options.run_start);
  run.initial_active = ensemble.active;

  std::array<FixedTboState, kAlgorithmCount> fixed;
  for (std::size_t i = 0; i < kAlgorithmCount; ++i) {
    fixed[i] = FixedTboState{thresholds.tau[i], CommitLedger(options.budget)};
  }
  FixedTboState tbo0{thresholds.tbo0, CommitLedger(options.budget)};

  const auto intervals = interval_count(options.run_start, options.run_end, options.interval);
  run.active_per_interval.reserve(static_cast<std::size_t>(intervals));
  run.active_per_interval.push_back(ensemble.active);
  auto advance_clock = [&](Seconds now) {
    for (const auto& step : ensemble_on_boundary(ensemble, now)) {
      run.boundaries.push_back(step);
      run.active_per_interval.push_back(ensemble.active);
    }
  };

  if (options.keep_decision_log) {
    run.log.reserve(arrivals.events.size());
  }
  for (const auto& e : arrivals.events) {
    if (e.entry_time < options.run_start || e.entry_time >= options.run_end) {
      throw ArgumentError(fmt::format("arrival at {} outside run [{}, {})", e.entry_time,
                                      options.run_start, options.run_end));
    }
    advance_clock(e.entry_time);
    auto d = ensemble_on_arrival(ensemble, e, thresholds.tau);
    if (d.departed) {
      run.assignments.push_back(*d.departed);
    }
    if (d.replaced) {
      run.assignments.push_back(*d.replaced);
    }
    if (options.keep_decision_log) {
      run.log.push_back(DecisionLogEntry{e.entry_time, e.vehicle, e.estimate, d.verdict_mask,
                                         ensemble.active, d.committed,
                                         ensemble.ledger.budget_remaining()});
    }
    for (auto& f : fixed) {
      fixed_on_arrival(f, e);
    }
    fixed_on_arrival(tbo0, e);
  }
  // Remaining boundaries inside the run, so every interval has an active
  // algorithm on record.
  advance_clock(options.run_end - 1);

  if (auto last = ensemble.ledger.finish(options.run_end)) {
    run.assignments.push_back(*last);
  }
  for (auto& f : fixed) {
    f.ledger.finish(options.run_end);
  }
  tbo0.ledger.finish(options.run_end);

  run.ensemble = outcome_of(ensemble.ledger);
  for (std::size_t i = 0; i < kAlgorithmCount; ++i) {
    run.fixed[i] = outcome_of(fixed[i].ledger);
  }
  run.tbo0 = outcome_of(tbo0.ledger);
  run.active_switches = ensemble.active_switches;
  return run;
}

void write_decision_log_csv(const ZoneKey& zone, std::span<const DecisionLogEntry> log,
                            std::span<const std::string> vehicle_ids, std::ostream& out,
                            bool header) {
  if (header) {
    out << "zone,time,vehicle_id,s,verdict_mask,active,committed,budget_remaining\n";
  }
  for (const auto& e : log) {
    out << zone.geohash << ',' << e.time << ',' << vehicle_ids[e.vehicle] << ',' << e.s << ','
        << e.verdict_mask << ',' << e.active << ','
        << (e.committed == Verdict::Accept ? "accept" : "reject") << ',' << e.budget_remaining
        << '\n';
  }
}

}  // namespace lcb
