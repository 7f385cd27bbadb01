#include "lcbsim/selection.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "lcbsim/error.hpp"
#include "lcbsim/rng.hpp"

namespace lcb {
namespace {

constexpr std::array<AlgorithmSpec, kAlgorithmCount> kAlgorithms = {{
    {0, 10}, {1, 20}, {2, 30}, {3, 40}, {4, 50}, {5, 60}, {6, 70}, {7, 80}, {8, 90},
}};

}  // namespace

std::string AlgorithmSpec::label() const { return fmt::format("TBO-{}", percentile_x); }

std::span<const AlgorithmSpec, kAlgorithmCount> ensemble_algorithms() { return kAlgorithms; }

Seconds nearest_rank_percentile(std::span<const Seconds> sorted_values, int x) {
  if (sorted_values.empty()) {
    throw ArgumentError("percentile of an empty list");
  }
  if (x < 0 || x > 100) {
    throw ArgumentError(fmt::format("percentile must be in [0, 100], got {}", x));
  }
  const auto n = static_cast<std::int64_t>(sorted_values.size());
  const std::int64_t rank = std::max<std::int64_t>(1, (x * n + 99) / 100);
  return sorted_values[static_cast<std::size_t>(rank - 1)];
}

ThresholdSet thresholds_for(std::span<const Seconds> sorted_values) {
  ThresholdSet tau{};
  for (const auto& spec : kAlgorithms) {
    tau[static_cast<std::size_t>(spec.index)] =
        nearest_rank_percentile(sorted_values, spec.percentile_x);
  }
  return tau;
}

ThresholdTable build_threshold_table(const ArrivalStreams& streams) {
  ThresholdTable table;
  table.zones.reserve(streams.zones.size());
  std::vector<Seconds> list;
  for (const auto& z : streams.zones) {
    if (z.events.empty()) {
      throw ArgumentError(fmt::format("zone {} has no arrivals", z.zone.geohash));
    }
    list.clear();
    for (const auto& e : z.events) {
      list.push_back(e.estimate);
    }
    std::sort(list.begin(), list.end());
    table.zones.push_back(ZoneThresholds{thresholds_for(list), nearest_rank_percentile(list, 0)});
  }
  return table;
}

std::uint16_t verdict_mask(Seconds s, const ThresholdSet& tau) {
  std::uint16_t mask = 0;
  for (std::size_t i = 0; i < kAlgorithmCount; ++i) {
    if (tbo_decide(s, tau[i]) == Verdict::Accept) {
      mask |= static_cast<std::uint16_t>(1u << i);
    }
  }
  return mask;
}

std::string_view to_string(Accounting a) {
  return a == Accounting::Credited ? "credited" : "truncated";
}

std::string_view to_string(EndReason r) {
  switch (r) {
    case EndReason::Replacement:
      return "replacement";
    case EndReason::Departure:
      return "departure";
    case EndReason::RunEnd:
      return "run_end";
  }
  return "unknown";
}

void VehicleSet::insert(VehicleIndex v) {
  if (v >= bits_.size()) {
    bits_.resize(std::max<std::size_t>(v + 1, bits_.size() * 2), false);
  }
  if (!bits_[v]) {
    bits_[v] = true;
    ++count_;
  }
}

BrokerAssignment CommitLedger::close(Seconds at, EndReason reason) {
  const Broker b = *broker_;
  broker_.reset();
  const Seconds end = std::min(at, b.exit_time);
  BrokerAssignment a{b.vehicle, b.accept_time, end, b.estimate,
                     std::max<Seconds>(0, end - b.accept_time), reason};
  served_total_ += a.served;
  return a;
}

std::optional<BrokerAssignment> CommitLedger::expire(Seconds now) {
  if (broker_ && broker_->exit_time < now) {
    return close(broker_->exit_time, EndReason::Departure);
  }
  return std::nullopt;
}

CommitLedger::Commit CommitLedger::commit(const ArrivalEvent& e, Verdict wanted) {
  Commit result;
  if (wanted == Verdict::Accept && !rejected_.contains(e.vehicle) && budget_remaining_ > 0) {
    --budget_remaining_;
    ++selections_;
    if (broker_) {
      result.replaced = close(e.entry_time, EndReason::Replacement);
      ++broker_switches_;
    }
    broker_ = Broker{e.vehicle, e.entry_time, e.estimate, e.exit_time};
    credited_total_ += e.estimate;
    result.verdict = Verdict::Accept;
  } else {
    rejected_.insert(e.vehicle);
  }
  return result;
}

std::optional<BrokerAssignment> CommitLedger::finish(Seconds run_end) {
  if (!broker_) {
    return std::nullopt;
  }
  if (broker_->exit_time < run_end) {
    return close(broker_->exit_time, EndReason::Departure);
  }
  return close(run_end, EndReason::RunEnd);
}

int initial_active_algorithm(std::uint64_t seed, std::uint64_t zone_id) {
  const std::uint64_t h = splitmix64(substream_seed(seed, "ensemble-init") ^ zone_id);
  return static_cast<int>(h % kAlgorithmCount);
}

EnsembleState ensemble_init(std::uint64_t seed, const ZoneKey& zone, std::int64_t budget,
                            Seconds d, Seconds start_time) {
  if (budget < 0) {
    throw ArgumentError(fmt::format("budget must be >= 0, got {}", budget));
  }
  if (d <= 0) {
    throw ArgumentError(fmt::format("interval must be positive, got {}", d));
  }
  EnsembleState s;
  s.zone_id = zone.numeric_id;
  s.active = initial_active_algorithm(seed, zone.numeric_id);
  s.interval = d;
  s.next_boundary = start_time + d;
  s.ledger = CommitLedger(budget);
  return s;
}

ArrivalDecision ensemble_on_arrival(EnsembleState& state, const ArrivalEvent& e,
                                    const ThresholdSet& tau) {
  if (e.entry_time >= state.next_boundary) {
    throw ArgumentError(fmt::format("arrival at {} is past the unprocessed boundary at {}",
                                    e.entry_time, state.next_boundary));
  }
  ArrivalDecision d;
  d.verdict_mask = verdict_mask(e.estimate, tau);
  for (std::size_t i = 0; i < kAlgorithmCount; ++i) {
    if ((d.verdict_mask >> i) & 1u) {
      state.cumulative[i] += e.estimate;
    }
  }
  const auto wanted = ((d.verdict_mask >> state.active) & 1u) ? Verdict::Accept : Verdict::Reject;
  d.departed = state.ledger.expire(e.entry_time);
  auto commit = state.ledger.commit(e, wanted);
  d.committed = commit.verdict;
  d.replaced = std::move(commit.replaced);
  return d;
}

int argmax_lowest(const Cumulatives& values) {
  return static_cast<int>(std::max_element(values.begin(), values.end()) - values.begin());
}

int argmax_keep(const Cumulatives& values, int keep) {
  const Seconds top = *std::max_element(values.begin(), values.end());
  if (values[static_cast<std::size_t>(keep)] == top) {
    return keep;
  }
  return argmax_lowest(values);
}

std::vector<BoundaryStep> ensemble_on_boundary(EnsembleState& state, Seconds now) {
  std::vector<BoundaryStep> steps;
  while (now >= state.next_boundary) {
    BoundaryStep step;
    step.closed_interval = state.interval_index;
    step.boundary_time = state.next_boundary;
    step.cumulative = state.cumulative;
    step.previous_active = state.active;
    step.best = argmax_keep(state.cumulative, state.active);
    if (step.best != state.active) {
      state.active = step.best;
      ++state.active_switches;
      step.switched = true;
    }
    state.cumulative.fill(0);
    state.next_boundary += state.interval;
    ++state.interval_index;
    steps.push_back(step);
  }
  return steps;
}

ArrivalDecision fixed_on_arrival(FixedTboState& state, const ArrivalEvent& e) {
  ArrivalDecision d;
  const auto wanted = tbo_decide(e.estimate, state.tau);
  d.verdict_mask = wanted == Verdict::Accept ? 1 : 0;
  d.departed = state.ledger.expire(e.entry_time);
  auto commit = state.ledger.commit(e, wanted);
  d.committed = commit.verdict;
  d.replaced = std::move(commit.replaced);
  return d;
}

}  // namespace lcb
