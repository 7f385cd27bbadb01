#ifndef LCBSIM_H
#define LCBSIM_H

/* C interface to the simulator. Every call returns an lcb_status; on
 * failure lcb_last_error() describes the problem (per thread). */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(LCBSIM_BUILDING_LIBRARY)
#define LCB_API __declspec(dllexport)
#else
#define LCB_API __declspec(dllimport)
#endif
#else
#define LCB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum lcb_status {
  LCB_OK = 0,
  LCB_ERR_ARGUMENT = 1,
  LCB_ERR_CONFIG = 2,
  LCB_ERR_IO = 3,
  LCB_ERR_PARSE = 4,
  LCB_ERR_EMPTY_INPUT = 5,
  LCB_ERR_RUNTIME = 6
} lcb_status;

typedef enum lcb_accounting { LCB_ACCOUNTING_CREDITED = 0, LCB_ACCOUNTING_TRUNCATED = 1 } lcb_accounting;

typedef enum lcb_traffic_class {
  LCB_CLASS_LIGHT = 0,
  LCB_CLASS_MEDIUM = 1,
  LCB_CLASS_HIGH = 2,
  LCB_CLASS_ALL = 3
} lcb_traffic_class;

typedef struct lcb_config lcb_config;
typedef struct lcb_result lcb_result;

/* Subjects: 0..8 are TBO-10..TBO-90, LCB_SUBJECT_TBO0 the offline
 * baseline, LCB_SUBJECT_ENSEMBLE the switching ensemble. */
#define LCB_SUBJECT_TBO0 9
#define LCB_SUBJECT_ENSEMBLE 10

typedef struct lcb_outcome {
  int64_t credited_s;
  int64_t served_s;
  int64_t selections;
  int64_t broker_switches;
} lcb_outcome;

typedef struct lcb_zone_info {
  char geohash[8];
  uint64_t numeric_id;
  int64_t vehicle_count;
  int64_t arrivals;
  lcb_traffic_class traffic_class;
  int initial_active;
  int64_t active_switches;
} lcb_zone_info;

LCB_API const char* lcb_version(void);
LCB_API const char* lcb_last_error(void);
LCB_API const char* lcb_status_string(lcb_status status);

LCB_API lcb_status lcb_config_create(lcb_config** out);
LCB_API void lcb_config_destroy(lcb_config* config);
/* key uses CLI flag names without dashes, e.g. "interval-d". */
LCB_API lcb_status lcb_config_set(lcb_config* config, const char* key, const char* value);
LCB_API lcb_status lcb_config_load_file(lcb_config* config, const char* path);
LCB_API lcb_status lcb_config_validate(const lcb_config* config);
/* Copies the rendered configuration into buf (NUL-terminated, truncated to
 * size). *needed receives the full length excluding the NUL. */
LCB_API lcb_status lcb_config_render(const lcb_config* config, char* buf, size_t size, size_t* needed);
/* Reads one setting back in rendered form. LCB_ERR_ARGUMENT if unset. */
LCB_API lcb_status lcb_config_get(const lcb_config* config, const char* key, char* buf, size_t size,
                                  size_t* needed);

LCB_API lcb_status lcb_run(const lcb_config* config, lcb_result** out);
LCB_API void lcb_result_destroy(lcb_result* result);
LCB_API lcb_status lcb_result_write_reports(const lcb_result* result, const char* dir);

LCB_API lcb_status lcb_result_budget_count(const lcb_result* result, size_t* out);
LCB_API lcb_status lcb_result_budget(const lcb_result* result, size_t budget_index, int64_t* budget,
                                     double* fraction);
LCB_API lcb_status lcb_result_zone_count(const lcb_result* result, size_t* out);
LCB_API lcb_status lcb_result_zone(const lcb_result* result, size_t zone_index, lcb_zone_info* out);
LCB_API lcb_status lcb_result_outcome(const lcb_result* result, size_t budget_index, size_t zone_index,
                                      int subject, lcb_outcome* out);
/* Mean service (seconds) over zones of a class; *zones = 0 when the class
 * is empty, in which case *avg_service is NaN. */
LCB_API lcb_status lcb_result_class_average(const lcb_result* result, size_t budget_index,
                                            lcb_traffic_class cls, int subject, lcb_accounting accounting,
                                            double* avg_service, double* avg_selections, size_t* zones);
LCB_API lcb_status lcb_result_warning_count(const lcb_result* result, size_t* out);
LCB_API const char* lcb_result_warning(const lcb_result* result, size_t index);
LCB_API lcb_status lcb_result_mean_vehicles(const lcb_result* result, double* mean, double* stddev);

LCB_API lcb_status lcb_geohash_encode(double latitude, double longitude, int precision, char* out,
                                      size_t size);
LCB_API lcb_status lcb_zone_numeric_id(const char* geohash, uint64_t* out);
/* Writes the synthetic trace for `spec` as CSV to path ("-" for stdout),
 * exactly as lcb_run would generate it with run seed `seed`. */
LCB_API lcb_status lcb_generate_synthetic_csv(const char* spec, uint64_t seed, const char* path);

#ifdef __cplusplus
}
#endif

#endif
