#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "lcbsim/error.hpp"
#include "lcbsim/geozone.hpp"

using namespace lcb;

namespace {

struct Vector {
  double lat;
  double lon;
  int precision;
  const char* hash;
};

// Reference encoder output for fixed points.
constexpr Vector kVectors[] = {
    {57.64911, 10.40744, 7, "u4pruyd"},
    {0.0, 0.0, 7, "s000000"},
    {31.2304, 121.4737, 7, "wtw3sjq"},
    {-31.674869, -125.624467, 11, "34qev3g09b2"},
    {-81.218101, 115.59449, 2, "n9"},
    {-24.149133, -159.031987, 9, "27wyt5u3n"},
    {-51.297267, -148.976185, 7, "0wyh1vw"},
    {-77.339995, -147.261458, 7, "0dr20bx"},
    {-79.271931, 23.550239, 4, "h9bt"},
    {23.48654, 29.862286, 1, "s"},
    {13.86311, -37.174365, 4, "e4mw"},
    {-81.524434, 128.976952, 5, "nce8n"},
    {-14.5388, 14.638782, 10, "km6mm179k7"},
    {-34.434968, 113.742264, 3, "q9b"},
    {-71.370583, 25.61934, 4, "he61"},
};

// FNV-1a offset basis and prime, byte at a time.
std::uint64_t fnv_oracle(const std::string& s) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace

TEST_CASE("geohash vectors") {
  for (const auto& v : kVectors) {
    CAPTURE(v.hash);
    CHECK(geohash_encode(v.lat, v.lon, v.precision) == v.hash);
  }
}

TEST_CASE("geohash bits pack and unpack") {
  const auto bits = geohash_bits(57.64911, 10.40744, 7);
  CHECK(geohash_from_bits(bits, 7) == "u4pruyd");
  CHECK(bits < (1ULL << 35));
}

TEST_CASE("geohash midpoint goes to the upper half") {
  // lon 0 and lat 0 are the first midpoints: both bits are 1 -> 's'.
  CHECK(geohash_encode(0.0, 0.0, 1) == "s");
  CHECK(geohash_encode(-1e-9, -1e-9, 1) == "7");
  CHECK(geohash_encode(90.0, 180.0, 3) == "zzz");
  CHECK(geohash_encode(-90.0, -180.0, 3) == "000");
}

TEST_CASE("geohash argument errors") {
  CHECK_THROWS_AS(geohash_encode(91, 0, 7), ArgumentError);
  CHECK_THROWS_AS(geohash_encode(0, -181, 7), ArgumentError);
  CHECK_THROWS_AS(geohash_encode(0, 0, 0), ArgumentError);
  CHECK_THROWS_AS(geohash_encode(0, 0, 13), ArgumentError);
  CHECK_THROWS_AS(geohash_encode(NAN, 0, 7), ArgumentError);
  CHECK_THROWS_AS(geohash_cell_bounds("abc"), ArgumentError);  // 'a' not in alphabet
  CHECK_FALSE(is_valid_geohash(""));
  CHECK_FALSE(is_valid_geohash("u4pruyi"));
  CHECK(is_valid_geohash("u4pruyd"));
}

TEST_CASE("cell bounds contain their point") {
  CHECK(geohash_cell_bounds("s000000").contains(0.0, 0.0));
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> lat(-90.0, 90.0);
  std::uniform_real_distribution<double> lon(-180.0, 180.0);
  for (int i = 0; i < 1000; ++i) {
    const double a = lat(gen);
    const double o = lon(gen);
    const auto h = geohash_encode(a, o, 7);
    const auto b = geohash_cell_bounds(h);
    CHECK(b.contains(a, o));
    CHECK(geohash_encode(b.center_latitude(), b.center_longitude(), 7) == h);
  }
  CHECK(geohash_cell_bounds(geohash_encode(90.0, 180.0, 7)).contains(90.0, 180.0));
}

TEST_CASE("7-character cell size") {
  CHECK(cell_lat_degrees(7) == doctest::Approx(180.0 / (1 << 17)).epsilon(1e-15));
  CHECK(cell_lon_degrees(7) == doctest::Approx(360.0 / (1 << 18)).epsilon(1e-15));
  CHECK(cell_height_meters(7) == doctest::Approx(152.7032).epsilon(1e-6));
  CHECK(cell_width_meters(7, 0.0) == doctest::Approx(152.7032).epsilon(1e-6));
  CHECK(std::abs(cell_height_meters(7) - 153.0) < 1.0);
  CHECK(std::abs(cell_width_meters(7) - 153.0) < 1.0);
  CHECK(cell_width_meters(7, 60.0) == doctest::Approx(152.7032 / 2).epsilon(1e-6));
  const auto b = geohash_cell_bounds("u4pruyd");
  CHECK(b.lat_max - b.lat_min == doctest::Approx(cell_lat_degrees(7)));
  CHECK(b.lon_max - b.lon_min == doctest::Approx(cell_lon_degrees(7)));
}

TEST_CASE("zone numeric id") {
  CHECK(zone_numeric_id("s000000") == 15992686405924083826ULL);
  CHECK(zone_numeric_id("s000000") == fnv_oracle("s000000"));
  CHECK(zone_numeric_id("u4pruyd") == 16060392325121701200ULL);
  CHECK(zone_numeric_id("u4pruye") == 16060393424633329411ULL);
  CHECK(zone_numeric_id("u4pruyd") != zone_numeric_id("u4pruye"));
  CHECK(fnv1a_64("") == 14695981039346656037ULL);
  CHECK_THROWS_AS(zone_numeric_id("u4pruy"), ArgumentError);
  CHECK_THROWS_AS(zone_numeric_id("u4pruyda"), ArgumentError);
  const auto k = ZoneKey::from_geohash("wtw3sjq");
  CHECK(k.numeric_id == fnv_oracle("wtw3sjq"));
}

namespace {
std::vector<ZoneStats> stats_of(std::initializer_list<std::pair<const char*, std::int64_t>> xs) {
  std::vector<ZoneStats> out;
  for (const auto& [g, n] : xs) {
    out.push_back({ZoneKey::from_geohash(g), n, TrafficClass::Light});
  }
  return out;
}
}  // namespace

TEST_CASE("filter_inactive_zones") {
  auto f = filter_inactive_zones(stats_of({{"s000000", 5}, {"s000001", 0}, {"s000002", 2}}));
  REQUIRE(f.size() == 2);
  CHECK(f[0].zone.geohash == "s000000");
  CHECK(f[1].zone.geohash == "s000002");
  CHECK(filter_inactive_zones(stats_of({{"s000000", 1}, {"s000001", 3}})).size() == 2);
  CHECK(filter_inactive_zones(stats_of({{"s000000", 0}, {"s000001", 0}})).empty());
}

TEST_CASE("classify_traffic") {
  CHECK(classify_traffic(20, 35, 50) == TrafficClass::Light);
  CHECK(classify_traffic(40, 35, 50) == TrafficClass::Medium);
  CHECK(classify_traffic(60, 35, 50) == TrafficClass::High);
  CHECK(classify_traffic(35, 35, 50) == TrafficClass::Medium);
  CHECK(classify_traffic(50, 35, 50) == TrafficClass::Medium);
  // std below mean: no medium band
  CHECK(classify_traffic(30, 35, 20) == TrafficClass::Light);
  CHECK(classify_traffic(35, 35, 20) == TrafficClass::High);
}

TEST_CASE("classify_zones uses population statistics") {
  auto z = stats_of({{"s000000", 1}, {"s000001", 1}, {"s000002", 1}, {"s000003", 1}, {"s000004", 96}});
  const auto s = classify_zones(z);
  CHECK(s.mean == doctest::Approx(20.0));
  CHECK(s.stddev == doctest::Approx(38.0));
  CHECK_FALSE(s.medium_band_empty);
  CHECK(z[0].traffic_class == TrafficClass::Light);
  CHECK(z[4].traffic_class == TrafficClass::High);

  auto flat = stats_of({{"s000000", 10}, {"s000001", 12}});
  CHECK(classify_zones(flat).medium_band_empty);
}
