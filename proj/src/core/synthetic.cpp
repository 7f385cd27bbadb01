#include "lcbsim/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "lcbsim/error.hpp"
#include "text_util.hpp"

namespace lcb {

using detail::split;
using detail::to_bool;
using detail::to_number;
using detail::trim;

DwellDistribution DwellDistribution::parse(std::string_view text) {
  const auto parts = split(text, ':');
  auto num = [&](std::size_t i) {
    const auto v = to_number<double>(parts[i]);
    if (!v || *v < 0.0) {
      throw ConfigError(fmt::format("bad dwell distribution '{}'", text));
    }
    return *v;
  };
  if (parts[0] == "const" && parts.size() == 2) {
    return {Kind::Constant, num(1), 0.0};
  }
  if (parts[0] == "uniform" && parts.size() == 3) {
    DwellDistribution d{Kind::Uniform, num(1), num(2)};
    if (d.b < d.a) {
      throw ConfigError(fmt::format("uniform dwell with high < low in '{}'", text));
    }
    return d;
  }
  if (parts[0] == "exp" && parts.size() == 2) {
    return {Kind::Exponential, num(1), 0.0};
  }
  throw ConfigError(
      fmt::format("bad dwell distribution '{}' (const:V, uniform:LO:HI or exp:MEAN)", text));
}

std::string DwellDistribution::to_string() const {
  switch (kind) {
    case Kind::Constant:
      return fmt::format("const:{}", a);
    case Kind::Uniform:
      return fmt::format("uniform:{}:{}", a, b);
    case Kind::Exponential:
      return fmt::format("exp:{}", a);
  }
  return "unknown";
}

Seconds DwellDistribution::sample(Rng& rng) const {
  switch (kind) {
    case Kind::Constant:
      return std::llround(a);
    case Kind::Uniform:
      return rng.uniform_int(std::llround(a), std::llround(b));
    case Kind::Exponential:
      return std::llround(rng.exponential(a));
  }
  return 0;
}

Seconds SyntheticTraceSpec::horizon() const {
  Seconds total = 0;
  for (const auto& r : regimes) {
    total += r.duration;
  }
  return total;
}

SyntheticTraceSpec parse_synthetic_spec(std::string_view text) {
  SyntheticTraceSpec spec;
  std::string flat(text);
  std::replace(flat.begin(), flat.end(), '\n', ',');
  for (auto item : split(flat, ',')) {
    if (const auto hash = item.find('#'); hash != std::string_view::npos) {
      item = trim(item.substr(0, hash));
    }
    if (item.empty()) {
      continue;
    }
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(fmt::format("synthetic spec: expected key=value, got '{}'", item));
    }
    const auto key = detail::normalize_key(item.substr(0, eq));
    const auto value = trim(item.substr(eq + 1));
    auto bad = [&]() {
      return ConfigError(fmt::format("synthetic spec: bad value '{}' for '{}'", value, key));
    };
    auto integer = [&]() {
      const auto v = to_number<std::int64_t>(value);
      if (!v) {
        throw bad();
      }
      return *v;
    };
    auto real = [&]() {
      const auto v = to_number<double>(value);
      if (!v) {
        throw bad();
      }
      return *v;
    };

    if (key == "vehicles") {
      const auto v = integer();
      if (v < 0) {
        throw bad();
      }
      spec.vehicles = static_cast<std::size_t>(v);
    } else if (key == "grid") {
      const auto x = value.find('x');
      const auto cols = x == std::string_view::npos ? std::nullopt
                                                    : to_number<int>(value.substr(0, x));
      const auto rows = x == std::string_view::npos ? std::nullopt
                                                    : to_number<int>(value.substr(x + 1));
      if (!cols || !rows) {
        throw bad();
      }
      spec.grid_cols = *cols;
      spec.grid_rows = *rows;
    } else if (key == "origin") {
      const auto parts = split(value, ':');
      const auto lat = parts.size() == 2 ? to_number<double>(parts[0]) : std::nullopt;
      const auto lon = parts.size() == 2 ? to_number<double>(parts[1]) : std::nullopt;
      if (!lat || !lon) {
        throw bad();
      }
      spec.origin_latitude = *lat;
      spec.origin_longitude = *lon;
    } else if (key == "regimes") {
      spec.regimes.clear();
      for (auto part : split(value, '|')) {
        const auto at = part.find('@');
        const auto dur = at == std::string_view::npos ? std::nullopt
                                                      : to_number<Seconds>(part.substr(0, at));
        if (!dur) {
          throw bad();
        }
        spec.regimes.push_back(Regime{*dur, DwellDistribution::parse(part.substr(at + 1))});
      }
    } else if (key == "dwell") {
      // Shorthand for a single one-day regime.
      spec.regimes = {Regime{kSecondsPerDay, DwellDistribution::parse(value)}};
    } else if (key == "sample-period") {
      spec.sample_period = integer();
    } else if (key == "travel") {
      const auto parts = split(value, ':');
      const auto lo = parts.size() == 2 ? to_number<Seconds>(parts[0]) : std::nullopt;
      const auto hi = parts.size() == 2 ? to_number<Seconds>(parts[1]) : std::nullopt;
      if (!lo || !hi) {
        throw bad();
      }
      spec.travel_min = *lo;
      spec.travel_max = *hi;
    } else if (key == "zipf") {
      spec.zipf = real();
    } else if (key == "revisits") {
      const auto b = to_bool(value);
      if (!b) {
        throw bad();
      }
      spec.revisits = *b;
    } else if (key == "stagger") {
      spec.stagger = integer();
    } else if (key == "start") {
      spec.start_time = integer();
    } else if (key == "seed") {
      const auto v = to_number<std::uint64_t>(value);
      if (!v) {
        throw bad();
      }
      spec.seed = *v;
    } else {
      throw ConfigError(fmt::format("synthetic spec: unknown key '{}'", key));
    }
  }
  return spec;
}

std::string to_string(const SyntheticTraceSpec& spec) {
  std::string regimes;
  for (const auto& r : spec.regimes) {
    if (!regimes.empty()) {
      regimes += '|';
    }
    regimes += fmt::format("{}@{}", r.duration, r.dwell.to_string());
  }
  return fmt::format(
      "vehicles={},grid={}x{},origin={}:{},regimes={},sample-period={},travel={}:{},zipf={},"
      "revisits={},stagger={},start={},seed={}",
      spec.vehicles, spec.grid_cols, spec.grid_rows, spec.origin_latitude,
      spec.origin_longitude, regimes, spec.sample_period, spec.travel_min, spec.travel_max,
      spec.zipf, spec.revisits ? "true" : "false", spec.stagger, spec.start_time, spec.seed);
}

namespace {

void validate(const SyntheticTraceSpec& spec) {
  if (spec.vehicles == 0) {
    throw ArgumentError("synthetic spec needs at least one vehicle");
  }
  if (spec.grid_cols < 1 || spec.grid_rows < 1) {
    throw ArgumentError("synthetic grid must be at least 1x1");
  }
  if (spec.revisits && spec.grid_cols * spec.grid_rows < 2) {
    throw ArgumentError("a revisiting fleet needs at least two grid cells");
  }
  if (spec.regimes.empty()) {
    throw ArgumentError("synthetic spec needs at least one regime");
  }
  for (const auto& r : spec.regimes) {
    if (r.duration <= 0) {
      throw ArgumentError("regime durations must be positive");
    }
  }
  if (spec.sample_period <= 0) {
    throw ArgumentError("sample period must be positive");
  }
  if (spec.travel_min < 1 || spec.travel_max < spec.travel_min) {
    throw ArgumentError("travel range must satisfy 1 <= min <= max");
  }
  if (spec.stagger < 0 || spec.zipf < 0.0) {
    throw ArgumentError("stagger and zipf must be non-negative");
  }
}

struct GridCell {
  ZoneKey key;
  CellBounds bounds;
};

std::vector<GridCell> build_grid(const SyntheticTraceSpec& spec) {
  const double dlat = cell_lat_degrees(kZonePrecision);
  const double dlon = cell_lon_degrees(kZonePrecision);
  const auto origin = geohash_cell_bounds(
      geohash_encode(spec.origin_latitude, spec.origin_longitude, kZonePrecision));
  std::vector<GridCell> cells;
  for (int r = 0; r < spec.grid_rows; ++r) {
    for (int c = 0; c < spec.grid_cols; ++c) {
      const double lat = origin.center_latitude() + r * dlat;
      const double lon = origin.center_longitude() + c * dlon;
      if (lat > 90.0 || lon > 180.0) {
        throw ArgumentError("synthetic grid extends past the coordinate range");
      }
      auto hash = geohash_encode(lat, lon, kZonePrecision);
      cells.push_back(GridCell{ZoneKey::from_geohash(hash), geohash_cell_bounds(hash)});
    }
  }
  return cells;
}

const DwellDistribution& regime_at(const SyntheticTraceSpec& spec, Seconds offset) {
  Seconds end = 0;
  for (const auto& r : spec.regimes) {
    end += r.duration;
    if (offset < end) {
      return r.dwell;
    }
  }
  return spec.regimes.back().dwell;
}

// Weighted draw; weights of excluded cells must already be zero.
std::size_t draw_cell(Rng& rng, const std::vector<double>& cumulative) {
  const double u = rng.uniform01() * cumulative.back();
  const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
  return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()),
                               cumulative.size() - 1);
}

}  // namespace

std::vector<ZoneKey> synthetic_zone_grid(const SyntheticTraceSpec& spec) {
  validate(spec);
  std::vector<ZoneKey> keys;
  for (auto& c : build_grid(spec)) {
    keys.push_back(std::move(c.key));
  }
  std::sort(keys.begin(), keys.end());
  return keys;
}

TraceSet generate_synthetic(const SyntheticTraceSpec& spec) {
  validate(spec);
  const auto cells = build_grid(spec);
  const auto horizon = spec.horizon();
  const Seconds last_allowed = spec.start_time + horizon - 1;

  // Popularity: Zipf weight by rank over a seeded permutation of the grid.
  Rng layout(substream_seed(spec.seed, "synthetic-layout"));
  std::vector<std::size_t> rank(cells.size());
  std::iota(rank.begin(), rank.end(), std::size_t{0});
  for (std::size_t i = rank.size(); i > 1; --i) {
    std::swap(rank[i - 1], rank[static_cast<std::size_t>(layout.uniform_int(0, static_cast<std::int64_t>(i) - 1))]);
  }
  std::vector<double> weight(cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) {
    weight[rank[i]] = 1.0 / std::pow(static_cast<double>(i + 1), spec.zipf);
  }

  const int id_width = static_cast<int>(fmt::format("{}", spec.vehicles).size());
  const auto vehicle_seed = substream_seed(spec.seed, "synthetic-vehicles");

  std::vector<VehicleTrack> tracks;
  tracks.reserve(spec.vehicles);
  std::vector<double> w(weight.size());
  std::vector<double> cumulative(weight.size());
  for (std::size_t v = 0; v < spec.vehicles; ++v) {
    Rng rng(splitmix64(vehicle_seed ^ v));
    VehicleTrack track{fmt::format("V{:0{}}", v, id_width), {}};
    w = weight;
    Seconds t = spec.start_time + (spec.stagger > 0 ? rng.uniform_int(0, spec.stagger - 1) : 0);
    std::size_t current = cells.size();
    while (true) {
      // Exclude the current cell (consecutive dwells must differ) and, without
      // revisits, every visited cell.
      const double saved = current < cells.size() ? w[current] : 0.0;
      if (current < cells.size()) {
        w[current] = 0.0;
      }
      std::partial_sum(w.begin(), w.end(), cumulative.begin());
      if (cumulative.back() <= 0.0) {
        break;
      }
      const auto next = draw_cell(rng, cumulative);
      if (current < cells.size() && spec.revisits) {
        w[current] = saved;
      }
      const Seconds dwell = std::max<Seconds>(0, regime_at(spec, t - spec.start_time).sample(rng));
      if (t + dwell > last_allowed) {
        break;
      }
      const auto& box = cells[next].bounds;
      const double mlat = 0.05 * (box.lat_max - box.lat_min);
      const double mlon = 0.05 * (box.lon_max - box.lon_min);
      auto emit = [&](Seconds at) {
        const double speed = std::round(rng.uniform(0.0, 15.0) * 10.0) / 10.0;
        const double heading = static_cast<double>(rng.uniform_int(0, 359));
        track.fixes.push_back(Fix{at, rng.uniform(box.lat_min + mlat, box.lat_max - mlat),
                                  rng.uniform(box.lon_min + mlon, box.lon_max - mlon), speed,
                                  heading});
      };
      for (Seconds at = t; at < t + dwell; at += spec.sample_period) {
        emit(at);
      }
      emit(t + dwell);
      current = next;
      t += dwell + rng.uniform_int(spec.travel_min, spec.travel_max);
      if (t > last_allowed) {
        break;
      }
    }
    if (!track.fixes.empty()) {
      tracks.push_back(std::move(track));
    }
  }
  if (tracks.empty()) {
    throw ArgumentError("synthetic spec produced no records");
  }
  const int days = static_cast<int>((horizon + kSecondsPerDay - 1) / kSecondsPerDay);
  return TraceSet::from_tracks(std::move(tracks), days);
}

}  // namespace lcb
