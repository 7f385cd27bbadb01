#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lcb {

using Seconds = std::int64_t;

inline constexpr Seconds kSecondsPerDay = 86'400;

// One timestamped GPS observation of one vehicle.
struct TraceRecord {
  std::string vehicle_id;
  Seconds timestamp = 0;
  double latitude = 0.0;
  double longitude = 0.0;
  std::optional<double> speed;    // m/s
  std::optional<double> heading;  // degrees, [0, 360)

  bool operator==(const TraceRecord&) const = default;
};

// Per-vehicle observation without the id, as stored inside a TraceSet.
// Missing speed/heading are kept as std::nullopt.
struct Fix {
  Seconds timestamp = 0;
  double latitude = 0.0;
  double longitude = 0.0;
  std::optional<double> speed;
  std::optional<double> heading;

  bool operator==(const Fix&) const = default;
};

struct VehicleTrack {
  std::string vehicle_id;
  std::vector<Fix> fixes;  // strictly increasing timestamps

  bool operator==(const VehicleTrack&) const = default;
};

// Canonical, immutable trace: tracks sorted by vehicle_id, fixes strictly
// increasing in time within each track. A track's position in `tracks()` is
// its vehicle index, so index order equals lexicographic id order.
class TraceSet {
 public:
  TraceSet() = default;

  // Builds the canonical form: groups by vehicle, stable-sorts by timestamp
  // and keeps the first of any duplicate (vehicle, timestamp) pair.
  // `day_count` == 0 derives it from the time span.
  static TraceSet from_records(std::vector<TraceRecord> records, int day_count = 0);

  // Takes already-canonical tracks (sorted ids, strictly increasing times).
  // Throws ArgumentError if the tracks are not canonical.
  static TraceSet from_tracks(std::vector<VehicleTrack> tracks, int day_count = 0);

  std::span<const VehicleTrack> tracks() const { return tracks_; }
  int day_count() const { return day_count_; }
  std::size_t vehicle_count() const { return tracks_.size(); }
  std::size_t record_count() const { return record_count_; }
  bool empty() const { return record_count_ == 0; }

  Seconds first_timestamp() const { return first_; }
  Seconds last_timestamp() const { return last_; }

  // Flattened, ordered by (vehicle_id, timestamp).
  std::vector<TraceRecord> records() const;

  bool operator==(const TraceSet&) const = default;

 private:
  void finish(int day_count);

  std::vector<VehicleTrack> tracks_;
  int day_count_ = 0;
  std::size_t record_count_ = 0;
  Seconds first_ = 0;
  Seconds last_ = 0;
};

// Parses one comma-separated row: id, timestamp, latitude, longitude
// [, speed [, heading]]. Empty speed/heading fields mean "absent".
// Throws ParseError (bad field, wrong field count) or ValidationError
// (value out of range); both carry the 1-based column.
TraceRecord parse_record(std::string_view line);

struct LoadReport {
  TraceSet trace;
  std::size_t skipped_rows = 0;
  std::vector<std::string> warnings;  // first few skip reasons
};

// Reads every row, skipping malformed ones. A first row whose id column is
// literally "vehicle_id" is treated as a header. Blank lines are ignored.
LoadReport read_trace(std::istream& in);
LoadReport load_trace(const std::filesystem::path& path);

// k copies of a one-day trace, copy i shifted by i days.
TraceSet replicate_trace(const TraceSet& trace, int k);

// Canonical CSV dump with a header row; load_trace of the output reproduces
// the TraceSet exactly.
void write_trace_csv(const TraceSet& trace, std::ostream& out);
void write_trace_csv(const TraceSet& trace, const std::filesystem::path& path);

}  // namespace lcb
