#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lcbsim/geozone.hpp"
#include "lcbsim/trace.hpp"

namespace lcb {

inline constexpr Seconds kDefaultGapTimeout = 1'800;

using VehicleIndex = std::uint32_t;

// A zone label per observation. `zone` is any stable label; the pipeline
// uses packed 7-character geohash bits.
struct ZonedFix {
  Seconds timestamp = 0;
  std::uint64_t zone = 0;
};

struct DwellInterval {
  Seconds entry = 0;
  std::uint64_t zone = 0;
  Seconds exit = 0;  // timestamp of the last observation inside the zone

  Seconds duration() const { return exit - entry; }
  bool operator==(const DwellInterval&) const = default;
};

// Incremental run-length detector. Feed time-ordered fixes of one vehicle;
// a dwell closes when the zone changes, when the gap to the previous fix
// exceeds the timeout, or on finish().
class DwellTracker {
 public:
  explicit DwellTracker(Seconds gap_timeout) : gap_timeout_(gap_timeout) {}

  // Returns the dwell closed by this fix, if any.
  std::optional<DwellInterval> push(Seconds timestamp, std::uint64_t zone);
  std::optional<DwellInterval> finish();

 private:
  Seconds gap_timeout_;
  std::optional<DwellInterval> open_;
};

std::vector<DwellInterval> detect_zone_changes(std::span<const ZonedFix> fixes,
                                               Seconds gap_timeout = kDefaultGapTimeout);

// Zones from 7-character geohashes of each fix.
std::vector<DwellInterval> detect_zone_changes(std::span<const Fix> fixes,
                                               Seconds gap_timeout = kDefaultGapTimeout);

// One vehicle entering a zone. `estimate` is the service time the selection
// algorithms see (s_i); it equals the actual dwell unless an estimator
// noise hook is configured.
struct ArrivalEvent {
  VehicleIndex vehicle = 0;
  Seconds entry_time = 0;
  Seconds exit_time = 0;
  Seconds estimate = 0;

  Seconds service_time() const { return exit_time - entry_time; }
  bool operator==(const ArrivalEvent&) const = default;
};

struct ZoneArrivals {
  ZoneKey zone;
  std::vector<ArrivalEvent> events;  // sorted by (entry_time, vehicle)
};

// Per-zone arrival streams for one run. Zones are sorted by geohash.
struct ArrivalStreams {
  std::vector<std::string> vehicle_ids;  // indexed by VehicleIndex
  std::vector<ZoneArrivals> zones;
  Seconds run_start = 0;
  Seconds run_end = 0;  // exclusive

  std::size_t total_events() const;
  const ZoneArrivals* find(const ZoneKey& zone) const;
};

// Multiplicative estimator noise: estimate = round(actual * u), u uniform in
// [1 - amplitude, 1 + amplitude]. Off when amplitude == 0.
struct EstimatorNoise {
  double amplitude = 0.0;
  std::uint64_t seed = 0;
};

struct ArrivalOptions {
  Seconds gap_timeout = kDefaultGapTimeout;
  // Replay the trace this many times, copy i shifted by i days, without
  // materializing the replicated TraceSet. The trace must span one day
  // when replication > 1.
  int replication = 1;
  EstimatorNoise noise;
};

// Every dwell of every vehicle becomes one ArrivalEvent. With `zones` set,
// only those zones are kept (and every listed zone appears, possibly empty);
// otherwise every observed zone is returned.
ArrivalStreams build_arrival_streams(const TraceSet& trace,
                                     std::optional<std::span<const ZoneKey>> zones,
                                     const ArrivalOptions& options = {});

// N_z per zone: distinct vehicles with at least one arrival.
std::vector<ZoneStats> zone_activity(const ArrivalStreams& streams);

// zone,vehicle_id,entry,exit,s
void write_arrivals_csv(const ArrivalStreams& streams, std::ostream& out);

}  // namespace lcb
