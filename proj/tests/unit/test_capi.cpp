#include <doctest.h>

#include <cmath>
#include <cstring>
#include <string>

#include "lcbsim/lcbsim.h"

TEST_CASE("c api: geohash and ids") {
  char buf[16];
  CHECK(lcb_geohash_encode(57.64911, 10.40744, 7, buf, sizeof buf) == LCB_OK);
  CHECK(std::string(buf) == "u4pruyd");
  CHECK(lcb_geohash_encode(57.64911, 10.40744, 7, buf, 4) == LCB_ERR_ARGUMENT);
  CHECK(lcb_geohash_encode(99, 0, 7, buf, sizeof buf) == LCB_ERR_ARGUMENT);
  CHECK(std::strlen(lcb_last_error()) > 0);
  uint64_t id = 0;
  CHECK(lcb_zone_numeric_id("s000000", &id) == LCB_OK);
  CHECK(id == 15992686405924083826ULL);
  CHECK(lcb_zone_numeric_id("short", &id) == LCB_ERR_ARGUMENT);
  CHECK(lcb_zone_numeric_id(nullptr, &id) == LCB_ERR_ARGUMENT);
}

TEST_CASE("c api: configuration errors") {
  lcb_config* cfg = nullptr;
  REQUIRE(lcb_config_create(&cfg) == LCB_OK);
  CHECK(lcb_config_set(cfg, "nonsense", "1") == LCB_ERR_CONFIG);
  CHECK(lcb_config_validate(cfg) == LCB_ERR_CONFIG);
  CHECK(lcb_config_set(cfg, "synthetic", "vehicles=10,grid=3x3") == LCB_OK);
  CHECK(lcb_config_set(cfg, "interval-d", "0") == LCB_OK);
  CHECK(lcb_config_validate(cfg) == LCB_ERR_CONFIG);
  lcb_result* res = nullptr;
  CHECK(lcb_run(cfg, &res) == LCB_ERR_CONFIG);
  CHECK(res == nullptr);
  size_t needed = 0;
  CHECK(lcb_config_get(cfg, "interval-d", nullptr, 0, &needed) == LCB_OK);
  CHECK(needed == 1);
  CHECK(lcb_config_get(cfg, "out", nullptr, 0, &needed) == LCB_ERR_ARGUMENT);
  lcb_config_destroy(cfg);
  CHECK(std::string(lcb_status_string(LCB_ERR_CONFIG)) == "invalid configuration");
}

TEST_CASE("c api: run and read back") {
  lcb_config* cfg = nullptr;
  REQUIRE(lcb_config_create(&cfg) == LCB_OK);
  REQUIRE(lcb_config_set(cfg, "synthetic", "vehicles=40,grid=4x4") == LCB_OK);
  REQUIRE(lcb_config_set(cfg, "budget", "5") == LCB_OK);
  lcb_result* res = nullptr;
  REQUIRE(lcb_run(cfg, &res) == LCB_OK);
  size_t zones = 0;
  size_t budgets = 0;
  CHECK(lcb_result_zone_count(res, &zones) == LCB_OK);
  CHECK(lcb_result_budget_count(res, &budgets) == LCB_OK);
  CHECK(zones > 0);
  CHECK(budgets == 1);
  int64_t budget = 0;
  double fraction = 0;
  CHECK(lcb_result_budget(res, 0, &budget, &fraction) == LCB_OK);
  CHECK(budget == 5);
  CHECK(std::isnan(fraction));
  lcb_zone_info info;
  CHECK(lcb_result_zone(res, 0, &info) == LCB_OK);
  CHECK(std::strlen(info.geohash) == 7);
  CHECK(info.arrivals > 0);
  lcb_outcome o;
  CHECK(lcb_result_outcome(res, 0, 0, LCB_SUBJECT_ENSEMBLE, &o) == LCB_OK);
  CHECK(o.selections <= 5);
  CHECK(lcb_result_outcome(res, 0, 0, 42, &o) == LCB_ERR_ARGUMENT);
  CHECK(lcb_result_outcome(res, 3, 0, 0, &o) == LCB_ERR_ARGUMENT);
  CHECK(lcb_result_zone(res, zones, &info) == LCB_ERR_ARGUMENT);
  double avg = 0;
  size_t n = 0;
  CHECK(lcb_result_class_average(res, 0, LCB_CLASS_ALL, LCB_SUBJECT_TBO0, LCB_ACCOUNTING_CREDITED,
                                 &avg, nullptr, &n) == LCB_OK);
  CHECK(n == zones);
  CHECK(avg > 0);
  CHECK(lcb_result_write_reports(res, "/proc/forbidden/dir") == LCB_ERR_IO);
  lcb_result_destroy(res);
  lcb_config_destroy(cfg);
}

TEST_CASE("c api: missing trace is a runtime failure") {
  lcb_config* cfg = nullptr;
  REQUIRE(lcb_config_create(&cfg) == LCB_OK);
  REQUIRE(lcb_config_set(cfg, "trace", "/nonexistent/trace.csv") == LCB_OK);
  lcb_result* res = nullptr;
  CHECK(lcb_run(cfg, &res) == LCB_ERR_IO);
  lcb_config_destroy(cfg);
}
