#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lcb {

inline constexpr std::string_view kGeohashAlphabet = "0123456789bcdefghjkmnpqrstuvwxyz";
inline constexpr int kZonePrecision = 7;
inline constexpr int kMaxGeohashPrecision = 12;

// Mean Earth radius used for cell-size conversions.
inline constexpr double kEarthRadiusMeters = 6'371'008.8;

// Standard geohash: longitude bit first, 5 bits per character; a coordinate
// exactly on a bisection midpoint goes to the upper half. Throws
// ArgumentError for out-of-range coordinates or precision outside 1..12.
std::string geohash_encode(double latitude, double longitude, int precision = kZonePrecision);

// Same bits as geohash_encode, packed into the low 5*precision bits.
std::uint64_t geohash_bits(double latitude, double longitude, int precision = kZonePrecision);
std::string geohash_from_bits(std::uint64_t bits, int precision = kZonePrecision);

// Half-open rectangle [lat_min, lat_max) x [lon_min, lon_max); the upper
// edge is closed where it coincides with +90 / +180.
struct CellBounds {
  double lat_min = 0.0;
  double lat_max = 0.0;
  double lon_min = 0.0;
  double lon_max = 0.0;

  bool contains(double latitude, double longitude) const;
  double center_latitude() const { return 0.5 * (lat_min + lat_max); }
  double center_longitude() const { return 0.5 * (lon_min + lon_max); }
};

CellBounds geohash_cell_bounds(std::string_view geohash);

bool is_valid_geohash(std::string_view geohash);

// Angular cell extent for a precision, from the bit budget.
double cell_lat_degrees(int precision);
double cell_lon_degrees(int precision);
// Ground size in meters; width shrinks with cos(latitude).
double cell_height_meters(int precision);
double cell_width_meters(int precision, double at_latitude = 0.0);

// FNV-1a 64-bit over the raw bytes.
std::uint64_t fnv1a_64(std::string_view bytes);

// FNV-1a of a valid 7-character geohash; ArgumentError otherwise.
std::uint64_t zone_numeric_id(std::string_view geohash);

struct ZoneKey {
  std::string geohash;
  std::uint64_t numeric_id = 0;

  static ZoneKey from_geohash(std::string geohash);

  bool operator==(const ZoneKey& other) const { return geohash == other.geohash; }
  std::strong_ordering operator<=>(const ZoneKey& other) const {
    return geohash <=> other.geohash;
  }
};

enum class TrafficClass { Light, Medium, High };

inline constexpr TrafficClass kTrafficClasses[] = {TrafficClass::Light, TrafficClass::Medium,
                                                   TrafficClass::High};

std::string_view to_string(TrafficClass c);

struct ZoneStats {
  ZoneKey zone;
  std::int64_t vehicle_count = 0;  // N_z
  TrafficClass traffic_class = TrafficClass::Light;
};

std::vector<ZoneStats> filter_inactive_zones(std::vector<ZoneStats> stats);

// Light if n < mean, Medium if mean <= n <= std, High if n > std. When
// std < mean the Medium band is empty; the rule is still applied literally.
TrafficClass classify_traffic(std::int64_t vehicle_count, double mean, double stddev);

struct ClassificationSummary {
  double mean = 0.0;
  double stddev = 0.0;  // population standard deviation
  bool medium_band_empty = false;
};

// Mean/std over the given zones (expected: active zones only), then assigns
// traffic_class to every zone in place.
ClassificationSummary classify_zones(std::span<ZoneStats> zones);

// geohash,numeric_id,n_z,class
void write_zone_table_csv(std::span<const ZoneStats> zones, std::ostream& out);

}  // namespace lcb
