#include "lcbsim/events.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <unordered_map>

#include <fmt/format.h>

#include "lcbsim/error.hpp"
#include "lcbsim/rng.hpp"

namespace lcb {

std::optional<DwellInterval> DwellTracker::push(Seconds timestamp, std::uint64_t zone) {
  if (open_ && open_->zone == zone && timestamp - open_->exit <= gap_timeout_) {
    open_->exit = timestamp;
    return std::nullopt;
  }
  auto closed = open_;
  open_ = DwellInterval{timestamp, zone, timestamp};
  return closed;
}

std::optional<DwellInterval> DwellTracker::finish() {
  auto closed = open_;
  open_.reset();
  return closed;
}

std::vector<DwellInterval> detect_zone_changes(std::span<const ZonedFix> fixes,
                                               Seconds gap_timeout) {
  std::vector<DwellInterval> out;
  DwellTracker tracker(gap_timeout);
  for (const auto& f : fixes) {
    if (auto d = tracker.push(f.timestamp, f.zone)) {
      out.push_back(*d);
    }
  }
  if (auto d = tracker.finish()) {
    out.push_back(*d);
  }
  return out;
}

std::vector<DwellInterval> detect_zone_changes(std::span<const Fix> fixes, Seconds gap_timeout) {
  std::vector<ZonedFix> zoned;
  zoned.reserve(fixes.size());
  for (const auto& f : fixes) {
    zoned.push_back({f.timestamp, geohash_bits(f.latitude, f.longitude, kZonePrecision)});
  }
  return detect_zone_changes(zoned, gap_timeout);
}

std::size_t ArrivalStreams::total_events() const {
  std::size_t n = 0;
  for (const auto& z : zones) {
    n += z.events.size();
  }
  return n;
}

const ZoneArrivals* ArrivalStreams::find(const ZoneKey& zone) const {
  const auto it = std::lower_bound(zones.begin(), zones.end(), zone,
                                   [](const ZoneArrivals& a, const ZoneKey& k) { return a.zone < k; });
  return it != zones.end() && it->zone == zone ? &*it : nullptr;
}

namespace {

Seconds noisy_estimate(const EstimatorNoise& noise, VehicleIndex vehicle, std::uint64_t zone,
                       Seconds entry, Seconds actual) {
  if (noise.amplitude <= 0.0) {
    return actual;
  }
  std::uint64_t h = splitmix64(noise.seed ^ zone);
  h = splitmix64(h ^ vehicle);
  h = splitmix64(h ^ static_cast<std::uint64_t>(entry));
  const double u = static_cast<double>(h >> 11) * 0x1.0p-53;
  const double factor = 1.0 - noise.amplitude + 2.0 * noise.amplitude * u;
  return std::max<Seconds>(0, std::llround(static_cast<double>(actual) * factor));
}

}  // namespace

ArrivalStreams build_arrival_streams(const TraceSet& trace,
                                     std::optional<std::span<const ZoneKey>> zones,
                                     const ArrivalOptions& options) {
  if (options.replication < 1) {
    throw ArgumentError(fmt::format("replication must be >= 1, got {}", options.replication));
  }
  if (options.replication > 1 && trace.day_count() != 1) {
    throw ArgumentError(
        fmt::format("only a one-day trace can be replicated (trace spans {} days)",
                    trace.day_count()));
  }
  if (options.gap_timeout <= 0) {
    throw ArgumentError("gap timeout must be positive");
  }

  // Zone filter, keyed by packed geohash bits.
  std::unordered_map<std::uint64_t, std::size_t> slot_of;
  std::vector<std::uint64_t> slot_bits;
  const bool filtered = zones.has_value();
  if (filtered) {
    for (const auto& z : *zones) {
      std::uint64_t bits = 0;
      for (char c : z.geohash) {
        bits = (bits << 5) | static_cast<std::uint64_t>(kGeohashAlphabet.find(c));
      }
      if (slot_of.emplace(bits, slot_bits.size()).second) {
        slot_bits.push_back(bits);
      }
    }
  }
  std::vector<std::vector<ArrivalEvent>> buckets(slot_bits.size());

  auto emit = [&](VehicleIndex v, const DwellInterval& d) {
    auto it = slot_of.find(d.zone);
    if (it == slot_of.end()) {
      if (filtered) {
        return;
      }
      it = slot_of.emplace(d.zone, slot_bits.size()).first;
      slot_bits.push_back(d.zone);
      buckets.emplace_back();
    }
    const Seconds actual = d.duration();
    buckets[it->second].push_back(ArrivalEvent{
        v, d.entry, d.exit, noisy_estimate(options.noise, v, d.zone, d.entry, actual)});
  };

  ArrivalStreams streams;
  streams.vehicle_ids.reserve(trace.vehicle_count());
  std::vector<std::uint64_t> fix_zones;
  const auto tracks = trace.tracks();
  for (std::size_t vi = 0; vi < tracks.size(); ++vi) {
    const auto& track = tracks[vi];
    const auto v = static_cast<VehicleIndex>(vi);
    streams.vehicle_ids.push_back(track.vehicle_id);
    fix_zones.clear();
    for (const auto& f : track.fixes) {
      fix_zones.push_back(geohash_bits(f.latitude, f.longitude, kZonePrecision));
    }
    DwellTracker tracker(options.gap_timeout);
    for (int copy = 0; copy < options.replication; ++copy) {
      const Seconds shift = copy * kSecondsPerDay;
      for (std::size_t j = 0; j < track.fixes.size(); ++j) {
        if (auto d = tracker.push(track.fixes[j].timestamp + shift, fix_zones[j])) {
          emit(v, *d);
        }
      }
    }
    if (auto d = tracker.finish()) {
      emit(v, *d);
    }
  }

  std::vector<std::size_t> order(slot_bits.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    order[i] = i;
  }
  // Packed bits sort like the geohash strings: the alphabet is ASCII-ordered.
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return slot_bits[a] < slot_bits[b]; });
  streams.zones.reserve(order.size());
  for (std::size_t slot : order) {
    auto& events = buckets[slot];
    std::sort(events.begin(), events.end(), [](const ArrivalEvent& a, const ArrivalEvent& b) {
      return a.entry_time != b.entry_time ? a.entry_time < b.entry_time : a.vehicle < b.vehicle;
    });
    streams.zones.push_back(
        ZoneArrivals{ZoneKey::from_geohash(geohash_from_bits(slot_bits[slot], kZonePrecision)),
                     std::move(events)});
  }

  streams.run_start = trace.first_timestamp();
  streams.run_end = streams.run_start +
                    static_cast<Seconds>(trace.day_count()) * options.replication * kSecondsPerDay;
  return streams;
}

std::vector<ZoneStats> zone_activity(const ArrivalStreams& streams) {
  std::vector<ZoneStats> out;
  out.reserve(streams.zones.size());
  std::vector<VehicleIndex> seen;
  for (const auto& z : streams.zones) {
    seen.clear();
    for (const auto& e : z.events) {
      seen.push_back(e.vehicle);
    }
    std::sort(seen.begin(), seen.end());
    const auto distinct = std::unique(seen.begin(), seen.end()) - seen.begin();
    out.push_back(ZoneStats{z.zone, static_cast<std::int64_t>(distinct), TrafficClass::Light});
  }
  return out;
}

void write_arrivals_csv(const ArrivalStreams& streams, std::ostream& out) {
  out << "zone,vehicle_id,entry,exit,s\n";
  for (const auto& z : streams.zones) {
    for (const auto& e : z.events) {
      out << z.zone.geohash << ',' << streams.vehicle_ids[e.vehicle] << ',' << e.entry_time << ','
          << e.exit_time << ',' << e.estimate << '\n';
    }
  }
}

}  // namespace lcb
