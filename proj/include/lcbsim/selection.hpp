#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lcbsim/events.hpp"

namespace lcb {

inline constexpr std::size_t kAlgorithmCount = 9;

// TBO-x: accept iff the estimated service time strictly exceeds the zone's
// x-th percentile of service times.
struct AlgorithmSpec {
  int index = 0;
  int percentile_x = 0;

  std::string label() const;
};

// TBO-10 .. TBO-90, indices 0..8.
std::span<const AlgorithmSpec, kAlgorithmCount> ensemble_algorithms();

using ThresholdSet = std::array<Seconds, kAlgorithmCount>;
using Cumulatives = std::array<Seconds, kAlgorithmCount>;

// Nearest-rank percentile: element at 1-based rank ceil(x/100 * n), with
// rank clamped to >= 1 so x = 0 yields the minimum. x in [0, 100].
// Throws ArgumentError on an empty list or x outside [0, 100].
Seconds nearest_rank_percentile(std::span<const Seconds> sorted_values, int x);

ThresholdSet thresholds_for(std::span<const Seconds> sorted_values);

struct ZoneThresholds {
  ThresholdSet tau{};
  Seconds tbo0 = 0;  // 0th percentile, for the standalone TBO-0 baseline
};

// Aligned with ArrivalStreams::zones. L per zone is every arrival's estimate.
struct ThresholdTable {
  std::vector<ZoneThresholds> zones;
};

ThresholdTable build_threshold_table(const ArrivalStreams& streams);

enum class Verdict : std::uint8_t { Reject = 0, Accept = 1 };

constexpr Verdict tbo_decide(Seconds s, Seconds tau) {
  return s > tau ? Verdict::Accept : Verdict::Reject;
}

// Bit i set iff algorithm i accepts s.
std::uint16_t verdict_mask(Seconds s, const ThresholdSet& tau);

enum class Accounting { Credited, Truncated };
std::string_view to_string(Accounting a);

enum class EndReason { Replacement, Departure, RunEnd };
std::string_view to_string(EndReason r);

struct Broker {
  VehicleIndex vehicle = 0;
  Seconds accept_time = 0;
  Seconds estimate = 0;   // credited at acceptance
  Seconds exit_time = 0;  // actual departure
};

// A finished broker tenure. `credited` is the estimate counted at
// acceptance; `served` is the time actually served, cut at replacement.
struct BrokerAssignment {
  VehicleIndex vehicle = 0;
  Seconds accept_time = 0;
  Seconds end_time = 0;
  Seconds credited = 0;
  Seconds served = 0;
  EndReason ended_by = EndReason::Departure;

  Seconds service(Accounting a) const { return a == Accounting::Credited ? credited : served; }
};

// Growable bitset over vehicle indices.
class VehicleSet {
 public:
  bool contains(VehicleIndex v) const { return v < bits_.size() && bits_[v]; }
  void insert(VehicleIndex v);
  std::size_t size() const { return count_; }

 private:
  std::vector<bool> bits_;
  std::size_t count_ = 0;
};

// Budget, rejected set and current broker of one committed decision path.
// Both the ensemble and the standalone TBO baselines commit through this.
class CommitLedger {
 public:
  explicit CommitLedger(std::int64_t budget) : budget_remaining_(budget) {}

  // Clears a broker whose exit_time is before `now`.
  std::optional<BrokerAssignment> expire(Seconds now);

  struct Commit {
    Verdict verdict = Verdict::Reject;
    std::optional<BrokerAssignment> replaced;
  };
  // `wanted` is the deciding algorithm's verdict; the committed verdict is
  // Accept only if the vehicle was never rejected here and budget remains.
  // Every committed reject adds the vehicle to the rejected set.
  Commit commit(const ArrivalEvent& e, Verdict wanted);

  // Closes a live broker at the end of the run.
  std::optional<BrokerAssignment> finish(Seconds run_end);

  std::int64_t budget_remaining() const { return budget_remaining_; }
  const VehicleSet& rejected() const { return rejected_; }
  const std::optional<Broker>& broker() const { return broker_; }
  std::int64_t selections() const { return selections_; }
  std::int64_t broker_switches() const { return broker_switches_; }
  Seconds credited_total() const { return credited_total_; }
  // Complete only after finish().
  Seconds served_total() const { return served_total_; }

 private:
  BrokerAssignment close(Seconds at, EndReason reason);

  std::int64_t budget_remaining_;
  VehicleSet rejected_;
  std::optional<Broker> broker_;
  std::int64_t selections_ = 0;
  std::int64_t broker_switches_ = 0;
  Seconds credited_total_ = 0;
  Seconds served_total_ = 0;
};

// Per-zone state of the ensemble meta-algorithm.
struct EnsembleState {
  std::uint64_t zone_id = 0;
  int active = 0;
  Cumulatives cumulative{};
  Seconds interval = 0;
  Seconds next_boundary = 0;
  std::int64_t interval_index = 0;  // interval the clock is in
  std::int64_t active_switches = 0;
  CommitLedger ledger{0};
};

// Uniform draw over the nine algorithms, keyed by (seed, zone id).
int initial_active_algorithm(std::uint64_t seed, std::uint64_t zone_id);

// Throws ArgumentError if budget < 0 or d <= 0.
EnsembleState ensemble_init(std::uint64_t seed, const ZoneKey& zone, std::int64_t budget,
                            Seconds d, Seconds start_time);

struct ArrivalDecision {
  Verdict committed = Verdict::Reject;
  std::uint16_t verdict_mask = 0;
  std::optional<BrokerAssignment> departed;  // earlier broker that left unreplaced
  std::optional<BrokerAssignment> replaced;
};

// Passive bookkeeping for all nine algorithms (budget and rejected set are
// not consulted), then the active algorithm's verdict is committed.
// Pre: every boundary at or before e.entry_time has been processed
// (ArgumentError otherwise).
ArrivalDecision ensemble_on_arrival(EnsembleState& state, const ArrivalEvent& e,
                                    const ThresholdSet& tau);

struct BoundaryStep {
  std::int64_t closed_interval = 0;
  Seconds boundary_time = 0;
  Cumulatives cumulative{};  // counters of the interval that just closed
  int previous_active = 0;
  int best = 0;
  bool switched = false;
};

// Processes every boundary with time <= now: best = argmax of cumulatives
// (current active kept on ties, else lowest index), switch if needed, zero
// the counters, advance the boundary clock.
std::vector<BoundaryStep> ensemble_on_boundary(EnsembleState& state, Seconds now);

// argmax, ties resolved to `keep` when it is among the maxima, else to the
// lowest index.
int argmax_keep(const Cumulatives& values, int keep);
int argmax_lowest(const Cumulatives& values);

// Standalone TBO with a fixed threshold, committing through its own ledger.
struct FixedTboState {
  Seconds tau = 0;
  CommitLedger ledger{0};
};

ArrivalDecision fixed_on_arrival(FixedTboState& state, const ArrivalEvent& e);

}  // namespace lcb
