#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "lcbsim/events.hpp"
#include "lcbsim/selection.hpp"

namespace gen {

// Small seeded generator for property tests.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : e_(seed) {}

  std::int64_t integer(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(e_() % static_cast<std::uint64_t>(hi - lo + 1));
  }
  double real(double lo, double hi) {
    return lo + (hi - lo) * static_cast<double>(e_() >> 11) * 0x1.0p-53;
  }
  bool coin() { return (e_() & 1u) != 0; }

  std::vector<lcb::Seconds> values(std::size_t n, lcb::Seconds lo, lcb::Seconds hi) {
    std::vector<lcb::Seconds> v(n);
    for (auto& x : v) {
      x = integer(lo, hi);
    }
    // duplicates matter for percentile ties
    if (n > 2 && coin()) {
      v[n / 2] = v[0];
    }
    return v;
  }

  // Random arrival stream over [start, end) with repeated vehicles.
  std::vector<lcb::ArrivalEvent> arrivals(std::size_t n, std::uint32_t vehicles, lcb::Seconds start,
                                          lcb::Seconds end, lcb::Seconds max_s) {
    std::vector<lcb::ArrivalEvent> out(n);
    for (auto& e : out) {
      e.vehicle = static_cast<std::uint32_t>(integer(0, vehicles - 1));
      e.entry_time = integer(start, end - 1);
      e.estimate = integer(0, max_s);
      e.exit_time = e.entry_time + e.estimate;
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
      return a.entry_time != b.entry_time ? a.entry_time < b.entry_time : a.vehicle < b.vehicle;
    });
    return out;
  }

  std::mt19937_64& engine() { return e_; }

 private:
  std::mt19937_64 e_;
};

// Exhaustive nearest-rank oracle: the smallest value v in the list such that
// at least x% of the list is <= v.
inline lcb::Seconds percentile_oracle(std::vector<lcb::Seconds> v, int x) {
  std::sort(v.begin(), v.end());
  const auto n = static_cast<std::int64_t>(v.size());
  for (std::int64_t r = 1; r <= n; ++r) {
    if (100 * r >= static_cast<std::int64_t>(x) * n) {
      return v[static_cast<std::size_t>(r - 1)];
    }
  }
  return v.back();
}

}  // namespace gen
