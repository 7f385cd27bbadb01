#include "lcbsim/geozone.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include <fmt/format.h>

#include "lcbsim/error.hpp"

namespace lcb {
namespace {

void check_precision(int precision) {
  if (precision < 1 || precision > kMaxGeohashPrecision) {
    throw ArgumentError(
        fmt::format("geohash precision must be in [1, {}], got {}", kMaxGeohashPrecision,
                    precision));
  }
}

int alphabet_index(char c) {
  const auto pos = kGeohashAlphabet.find(c);
  return pos == std::string_view::npos ? -1 : static_cast<int>(pos);
}

double meters_per_degree() { return kEarthRadiusMeters * std::numbers::pi / 180.0; }

}  // namespace

std::uint64_t geohash_bits(double latitude, double longitude, int precision) {
  check_precision(precision);
  if (!(latitude >= -90.0 && latitude <= 90.0)) {
    throw ArgumentError(fmt::format("latitude {} out of range [-90, 90]", latitude));
  }
  if (!(longitude >= -180.0 && longitude <= 180.0)) {
    throw ArgumentError(fmt::format("longitude {} out of range [-180, 180]", longitude));
  }
  double lat_lo = -90.0, lat_hi = 90.0;
  double lon_lo = -180.0, lon_hi = 180.0;
  std::uint64_t bits = 0;
  const int total = 5 * precision;
  for (int i = 0; i < total; ++i) {
    bits <<= 1;
    if (i % 2 == 0) {
      const double mid = 0.5 * (lon_lo + lon_hi);
      if (longitude >= mid) {
        bits |= 1;
        lon_lo = mid;
      } else {
        lon_hi = mid;
      }
    } else {
      const double mid = 0.5 * (lat_lo + lat_hi);
      if (latitude >= mid) {
        bits |= 1;
        lat_lo = mid;
      } else {
        lat_hi = mid;
      }
    }
  }
  return bits;
}

std::string geohash_from_bits(std::uint64_t bits, int precision) {
  check_precision(precision);
  std::string out(static_cast<std::size_t>(precision), '0');
  for (int i = precision - 1; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = kGeohashAlphabet[bits & 0x1f];
    bits >>= 5;
  }
  return out;
}

std::string geohash_encode(double latitude, double longitude, int precision) {
  return geohash_from_bits(geohash_bits(latitude, longitude, precision), precision);
}

bool is_valid_geohash(std::string_view geohash) {
  if (geohash.empty() || geohash.size() > static_cast<std::size_t>(kMaxGeohashPrecision)) {
    return false;
  }
  return std::all_of(geohash.begin(), geohash.end(),
                     [](char c) { return alphabet_index(c) >= 0; });
}

CellBounds geohash_cell_bounds(std::string_view geohash) {
  if (!is_valid_geohash(geohash)) {
    throw ArgumentError(fmt::format("invalid geohash '{}'", geohash));
  }
  CellBounds b{-90.0, 90.0, -180.0, 180.0};
  bool lon_bit = true;
  for (char c : geohash) {
    const int value = alphabet_index(c);
    for (int shift = 4; shift >= 0; --shift) {
      const bool one = ((value >> shift) & 1) != 0;
      if (lon_bit) {
        const double mid = 0.5 * (b.lon_min + b.lon_max);
        (one ? b.lon_min : b.lon_max) = mid;
      } else {
        const double mid = 0.5 * (b.lat_min + b.lat_max);
        (one ? b.lat_min : b.lat_max) = mid;
      }
      lon_bit = !lon_bit;
    }
  }
  return b;
}

bool CellBounds::contains(double latitude, double longitude) const {
  const bool lat_ok = latitude >= lat_min && (latitude < lat_max || (lat_max == 90.0 && latitude == 90.0));
  const bool lon_ok =
      longitude >= lon_min && (longitude < lon_max || (lon_max == 180.0 && longitude == 180.0));
  return lat_ok && lon_ok;
}

double cell_lat_degrees(int precision) {
  check_precision(precision);
  const int lat_bits = (5 * precision) / 2;
  return 180.0 / std::ldexp(1.0, lat_bits);
}

double cell_lon_degrees(int precision) {
  check_precision(precision);
  const int lon_bits = (5 * precision + 1) / 2;
  return 360.0 / std::ldexp(1.0, lon_bits);
}

double cell_height_meters(int precision) {
  return cell_lat_degrees(precision) * meters_per_degree();
}

double cell_width_meters(int precision, double at_latitude) {
  return cell_lon_degrees(precision) * meters_per_degree() *
         std::cos(at_latitude * std::numbers::pi / 180.0);
}

std::uint64_t fnv1a_64(std::string_view bytes) {
  std::uint64_t hash = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 1099511628211ULL;
  }
  return hash;
}

std::uint64_t zone_numeric_id(std::string_view geohash) {
  if (geohash.size() != static_cast<std::size_t>(kZonePrecision) || !is_valid_geohash(geohash)) {
    throw ArgumentError(fmt::format("zone key must be a valid {}-character geohash, got '{}'",
                                    kZonePrecision, geohash));
  }
  return fnv1a_64(geohash);
}

ZoneKey ZoneKey::from_geohash(std::string geohash) {
  const auto id = zone_numeric_id(geohash);
  return ZoneKey{std::move(geohash), id};
}

std::string_view to_string(TrafficClass c) {
  switch (c) {
    case TrafficClass::Light:
      return "light";
    case TrafficClass::Medium:
      return "medium";
    case TrafficClass::High:
      return "high";
  }
  return "unknown";
}

std::vector<ZoneStats> filter_inactive_zones(std::vector<ZoneStats> stats) {
  std::erase_if(stats, [](const ZoneStats& z) { return z.vehicle_count <= 0; });
  return stats;
}

TrafficClass classify_traffic(std::int64_t vehicle_count, double mean, double stddev) {
  const auto n = static_cast<double>(vehicle_count);
  if (n < mean) {
    return TrafficClass::Light;
  }
  if (n > stddev) {
    return TrafficClass::High;
  }
  return TrafficClass::Medium;
}

ClassificationSummary classify_zones(std::span<ZoneStats> zones) {
  ClassificationSummary summary;
  if (zones.empty()) {
    return summary;
  }
  double sum = 0.0;
  for (const auto& z : zones) {
    sum += static_cast<double>(z.vehicle_count);
  }
  summary.mean = sum / static_cast<double>(zones.size());
  double sq = 0.0;
  for (const auto& z : zones) {
    const double d = static_cast<double>(z.vehicle_count) - summary.mean;
    sq += d * d;
  }
  summary.stddev = std::sqrt(sq / static_cast<double>(zones.size()));
  summary.medium_band_empty = summary.stddev < summary.mean;
  for (auto& z : zones) {
    z.traffic_class = classify_traffic(z.vehicle_count, summary.mean, summary.stddev);
  }
  return summary;
}

void write_zone_table_csv(std::span<const ZoneStats> zones, std::ostream& out) {
  out << "geohash,numeric_id,n_z,class\n";
  for (const auto& z : zones) {
    out << z.zone.geohash << ',' << z.zone.numeric_id << ',' << z.vehicle_count << ','
        << to_string(z.traffic_class) << '\n';
  }
}

}  // namespace lcb
