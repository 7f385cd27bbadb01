#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "lcbsim/geozone.hpp"
#include "lcbsim/rng.hpp"
#include "lcbsim/trace.hpp"

namespace lcb {

struct DwellDistribution {
  enum class Kind { Constant, Uniform, Exponential };
  Kind kind = Kind::Constant;
  double a = 0.0;  // constant value, uniform low, or exponential mean
  double b = 0.0;  // uniform high

  // "const:V", "uniform:LO:HI" or "exp:MEAN", seconds.
  static DwellDistribution parse(std::string_view text);
  std::string to_string() const;
  Seconds sample(Rng& rng) const;
};

// A time window of the schedule and the dwell-time law inside it.
struct Regime {
  Seconds duration = kSecondsPerDay;
  DwellDistribution dwell;
};

// Stand-in for a real taxi trace: vehicles hop between cells of a grid of
// 7-character geohash zones, dwelling for times drawn from the regime in
// effect at entry. Zone popularity follows a Zipf law over a seeded
// permutation of the grid.
struct SyntheticTraceSpec {
  std::size_t vehicles = 200;
  int grid_cols = 10;
  int grid_rows = 10;
  double origin_latitude = 31.2304;
  double origin_longitude = 121.4737;
  std::vector<Regime> regimes = {
      Regime{kSecondsPerDay, DwellDistribution{DwellDistribution::Kind::Uniform, 60, 900}}};
  Seconds sample_period = 60;
  Seconds travel_min = 5;
  Seconds travel_max = 60;
  double zipf = 1.0;
  bool revisits = true;   // false: a vehicle enters each zone at most once
  Seconds stagger = 0;    // vehicle start offsets uniform in [0, stagger)
  Seconds start_time = 1'181'001'600;
  std::uint64_t seed = 1;

  Seconds horizon() const;
};

// Comma- or newline-separated key=value pairs; '#' starts a comment.
// Regimes are written as DURATION@DIST joined by '|', e.g.
// "regimes=86400@uniform:600:1800|86400@uniform:20:300".
// Throws ConfigError on unknown keys or bad values.
SyntheticTraceSpec parse_synthetic_spec(std::string_view text);
std::string to_string(const SyntheticTraceSpec& spec);

// Every grid cell, sorted by geohash.
std::vector<ZoneKey> synthetic_zone_grid(const SyntheticTraceSpec& spec);

// Deterministic for a given spec. Throws ArgumentError for degenerate specs.
TraceSet generate_synthetic(const SyntheticTraceSpec& spec);

}  // namespace lcb
