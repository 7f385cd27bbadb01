#include "lcbsim/trace.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>

#include <fmt/format.h>

#include "lcbsim/error.hpp"

namespace lcb {
namespace {

constexpr std::array<std::string_view, 6> kColumnNames = {
    "vehicle_id", "timestamp", "latitude", "longitude", "speed", "heading"};

constexpr std::size_t kMaxWarnings = 20;

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(trim(line.substr(start)));
      break;
    }
    fields.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return fields;
}

template <typename T>
T parse_number(std::string_view field, int column) {
  T value{};
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (field.empty() || ec != std::errc{} || ptr != end) {
    throw ParseError(column, fmt::format("column {} ({}): cannot parse '{}'", column,
                                         kColumnNames[column - 1], field));
  }
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(value)) {
      throw ParseError(column, fmt::format("column {} ({}): non-finite value '{}'",
                                           column, kColumnNames[column - 1], field));
    }
  }
  return value;
}

void write_double(std::ostream& out, double v) {
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  out.write(buf.data(), ptr - buf.data());
}

int days_spanned(Seconds first, Seconds last) {
  return static_cast<int>((last - first) / kSecondsPerDay) + 1;
}

}  // namespace

TraceRecord parse_record(std::string_view line) {
  const auto fields = split_fields(line);
  if (fields.size() < 4 || fields.size() > 6) {
    throw ParseError(0, fmt::format("expected 4-6 fields, got {}", fields.size()));
  }
  TraceRecord r;
  if (fields[0].empty()) {
    throw ParseError(1, "column 1 (vehicle_id): empty");
  }
  r.vehicle_id = std::string(fields[0]);
  r.timestamp = parse_number<Seconds>(fields[1], 2);
  r.latitude = parse_number<double>(fields[2], 3);
  r.longitude = parse_number<double>(fields[3], 4);
  if (fields.size() > 4 && !fields[4].empty()) {
    r.speed = parse_number<double>(fields[4], 5);
  }
  if (fields.size() > 5 && !fields[5].empty()) {
    r.heading = parse_number<double>(fields[5], 6);
  }

  if (r.latitude < -90.0 || r.latitude > 90.0) {
    throw ValidationError(3, fmt::format("latitude {} out of range [-90, 90]", r.latitude));
  }
  if (r.longitude < -180.0 || r.longitude > 180.0) {
    throw ValidationError(4,
                          fmt::format("longitude {} out of range [-180, 180]", r.longitude));
  }
  if (r.speed && *r.speed < 0.0) {
    throw ValidationError(5, fmt::format("negative speed {}", *r.speed));
  }
  if (r.heading && (*r.heading < 0.0 || *r.heading >= 360.0)) {
    throw ValidationError(6, fmt::format("heading {} out of range [0, 360)", *r.heading));
  }
  return r;
}

TraceSet TraceSet::from_records(std::vector<TraceRecord> records, int day_count) {
  std::stable_sort(records.begin(), records.end(), [](const auto& a, const auto& b) {
    if (a.vehicle_id != b.vehicle_id) {
      return a.vehicle_id < b.vehicle_id;
    }
    return a.timestamp < b.timestamp;
  });

  TraceSet set;
  for (auto& r : records) {
    if (set.tracks_.empty() || set.tracks_.back().vehicle_id != r.vehicle_id) {
      set.tracks_.push_back(VehicleTrack{std::move(r.vehicle_id), {}});
    }
    auto& fixes = set.tracks_.back().fixes;
    if (!fixes.empty() && fixes.back().timestamp == r.timestamp) {
      continue;  // duplicate timestamp: keep the first occurrence
    }
    fixes.push_back(Fix{r.timestamp, r.latitude, r.longitude, r.speed, r.heading});
  }
  set.finish(day_count);
  return set;
}

TraceSet TraceSet::from_tracks(std::vector<VehicleTrack> tracks, int day_count) {
  for (std::size_t i = 0; i < tracks.size(); ++i) {
    if (tracks[i].fixes.empty()) {
      throw ArgumentError(fmt::format("track '{}' has no fixes", tracks[i].vehicle_id));
    }
    if (i > 0 && !(tracks[i - 1].vehicle_id < tracks[i].vehicle_id)) {
      throw ArgumentError("tracks must be sorted by unique vehicle_id");
    }
    const auto& fixes = tracks[i].fixes;
    for (std::size_t j = 1; j < fixes.size(); ++j) {
      if (fixes[j].timestamp <= fixes[j - 1].timestamp) {
        throw ArgumentError(
            fmt::format("track '{}' is not strictly time-ordered", tracks[i].vehicle_id));
      }
    }
  }
  TraceSet set;
  set.tracks_ = std::move(tracks);
  set.finish(day_count);
  return set;
}

void TraceSet::finish(int day_count) {
  record_count_ = 0;
  first_ = std::numeric_limits<Seconds>::max();
  last_ = std::numeric_limits<Seconds>::min();
  for (const auto& t : tracks_) {
    record_count_ += t.fixes.size();
    if (!t.fixes.empty()) {
      first_ = std::min(first_, t.fixes.front().timestamp);
      last_ = std::max(last_, t.fixes.back().timestamp);
    }
  }
  if (record_count_ == 0) {
    first_ = last_ = 0;
    day_count_ = std::max(day_count, 1);
    return;
  }
  const int spanned = days_spanned(first_, last_);
  if (day_count == 0) {
    day_count_ = spanned;
  } else if (day_count < spanned) {
    throw ArgumentError(fmt::format("records span {} days, more than day_count {}", spanned,
                                    day_count));
  } else {
    day_count_ = day_count;
  }
}

std::vector<TraceRecord> TraceSet::records() const {
  std::vector<TraceRecord> out;
  out.reserve(record_count_);
  for (const auto& t : tracks_) {
    for (const auto& f : t.fixes) {
      out.push_back(TraceRecord{t.vehicle_id, f.timestamp, f.latitude, f.longitude, f.speed,
                                f.heading});
    }
  }
  return out;
}

LoadReport read_trace(std::istream& in) {
  LoadReport report;
  std::vector<TraceRecord> records;
  std::string line;
  std::size_t line_no = 0;
  bool seen_content = false;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = trim(line);
    if (body.empty()) {
      continue;
    }
    if (!seen_content) {
      seen_content = true;
      if (body.substr(0, body.find(',')) == "vehicle_id") {
        continue;
      }
    }
    try {
      records.push_back(parse_record(body));
    } catch (const Error& e) {
      ++report.skipped_rows;
      if (report.warnings.size() < kMaxWarnings) {
        report.warnings.push_back(fmt::format("line {}: {}", line_no, e.what()));
      }
    }
  }
  if (in.bad()) {
    throw IoError("read failure");
  }
  if (records.empty()) {
    throw EmptyInputError(
        fmt::format("no valid trace records ({} rows skipped)", report.skipped_rows));
  }
  report.trace = TraceSet::from_records(std::move(records));
  return report;
}

LoadReport load_trace(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError(fmt::format("cannot open trace file '{}'", path.string()));
  }
  return read_trace(in);
}

TraceSet replicate_trace(const TraceSet& trace, int k) {
  if (k < 1) {
    throw ArgumentError(fmt::format("replication factor must be >= 1, got {}", k));
  }
  if (k == 1) {
    return trace;
  }
  if (trace.day_count() != 1) {
    throw ArgumentError(
        fmt::format("only a one-day trace can be replicated (trace spans {} days)",
                    trace.day_count()));
  }
  std::vector<VehicleTrack> tracks;
  tracks.reserve(trace.vehicle_count());
  for (const auto& t : trace.tracks()) {
    VehicleTrack copy{t.vehicle_id, {}};
    copy.fixes.reserve(t.fixes.size() * static_cast<std::size_t>(k));
    for (int day = 0; day < k; ++day) {
      for (auto f : t.fixes) {
        f.timestamp += day * kSecondsPerDay;
        copy.fixes.push_back(f);
      }
    }
    tracks.push_back(std::move(copy));
  }
  return TraceSet::from_tracks(std::move(tracks), k);
}

void write_trace_csv(const TraceSet& trace, std::ostream& out) {
  out << "vehicle_id,timestamp,latitude,longitude,speed,heading\n";
  for (const auto& t : trace.tracks()) {
    for (const auto& f : t.fixes) {
      out << t.vehicle_id << ',' << f.timestamp << ',';
      write_double(out, f.latitude);
      out << ',';
      write_double(out, f.longitude);
      if (f.speed || f.heading) {
        out << ',';
        if (f.speed) {
          write_double(out, *f.speed);
        }
      }
      if (f.heading) {
        out << ',';
        write_double(out, *f.heading);
      }
      out << '\n';
    }
  }
}

void write_trace_csv(const TraceSet& trace, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw IoError(fmt::format("cannot open '{}' for writing", path.string()));
  }
  write_trace_csv(trace, out);
  if (!out) {
    throw IoError(fmt::format("write to '{}' failed", path.string()));
  }
}

}  // namespace lcb
