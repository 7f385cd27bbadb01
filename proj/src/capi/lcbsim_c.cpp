#include "lcbsim/lcbsim.h"

#include <cmath>
#include <cstring>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <new>
#include <string>

#include "lcbsim/error.hpp"
#include "lcbsim/experiment.hpp"
#include "lcbsim/geozone.hpp"
#include "lcbsim/synthetic.hpp"
#include "lcbsim/trace.hpp"

struct lcb_config {
  lcb::ExperimentConfig config;
};

struct lcb_result {
  lcb::ExperimentResult result;
};

namespace {

thread_local std::string g_last_error;

lcb_status status_of(lcb::ErrorKind kind) {
  switch (kind) {
    case lcb::ErrorKind::Argument:
    case lcb::ErrorKind::Validation:
      return LCB_ERR_ARGUMENT;
    case lcb::ErrorKind::Config:
      return LCB_ERR_CONFIG;
    case lcb::ErrorKind::Io:
      return LCB_ERR_IO;
    case lcb::ErrorKind::Parse:
      return LCB_ERR_PARSE;
    case lcb::ErrorKind::EmptyInput:
      return LCB_ERR_EMPTY_INPUT;
  }
  return LCB_ERR_RUNTIME;
}

template <typename Fn>
lcb_status guarded(Fn&& fn) {
  try {
    g_last_error.clear();
    fn();
    return LCB_OK;
  } catch (const lcb::Error& e) {
    g_last_error = e.what();
    return status_of(e.kind());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return LCB_ERR_RUNTIME;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return LCB_ERR_RUNTIME;
  } catch (...) {
    g_last_error = "unknown error";
    return LCB_ERR_RUNTIME;
  }
}

lcb_status null_argument(const char* what) {
  g_last_error = std::string(what) + " is null";
  return LCB_ERR_ARGUMENT;
}

lcb::Subject subject_of(int subject) {
  if (subject == LCB_SUBJECT_ENSEMBLE) {
    return lcb::Subject::ensemble();
  }
  if (subject == LCB_SUBJECT_TBO0) {
    return lcb::Subject::tbo0();
  }
  if (subject >= 0 && subject < static_cast<int>(lcb::kAlgorithmCount)) {
    return lcb::Subject::fixed(subject);
  }
  throw lcb::ArgumentError("subject out of range: " + std::to_string(subject));
}

void copy_out(const std::string& text, char* buf, size_t size, size_t* needed) {
  if (needed) {
    *needed = text.size();
  }
  if (buf && size > 0) {
    const auto n = std::min(size - 1, text.size());
    std::memcpy(buf, text.data(), n);
    buf[n] = '\0';
  }
}

const lcb::BudgetOutcomes& run_at(const lcb_result* r, std::size_t i) {
  if (i >= r->result.runs.size()) {
    throw lcb::ArgumentError("budget index out of range");
  }
  return r->result.runs[i];
}

}  // namespace

extern "C" {

const char* lcb_version(void) { return "0.1.0"; }

const char* lcb_last_error(void) { return g_last_error.c_str(); }

const char* lcb_status_string(lcb_status status) {
  switch (status) {
    case LCB_OK:
      return "ok";
    case LCB_ERR_ARGUMENT:
      return "invalid argument";
    case LCB_ERR_CONFIG:
      return "invalid configuration";
    case LCB_ERR_IO:
      return "i/o error";
    case LCB_ERR_PARSE:
      return "parse error";
    case LCB_ERR_EMPTY_INPUT:
      return "empty input";
    case LCB_ERR_RUNTIME:
      return "runtime error";
  }
  return "unknown status";
}

lcb_status lcb_config_create(lcb_config** out) {
  if (!out) {
    return null_argument("out");
  }
  return guarded([&] { *out = new lcb_config{}; });
}

void lcb_config_destroy(lcb_config* config) { delete config; }

lcb_status lcb_config_set(lcb_config* config, const char* key, const char* value) {
  if (!config || !key || !value) {
    return null_argument("config, key or value");
  }
  return guarded([&] { lcb::apply_setting(config->config, key, value); });
}

lcb_status lcb_config_load_file(lcb_config* config, const char* path) {
  if (!config || !path) {
    return null_argument("config or path");
  }
  return guarded([&] { lcb::apply_config_file(config->config, path); });
}

lcb_status lcb_config_validate(const lcb_config* config) {
  if (!config) {
    return null_argument("config");
  }
  return guarded([&] { lcb::validate(config->config); });
}

lcb_status lcb_config_render(const lcb_config* config, char* buf, size_t size, size_t* needed) {
  if (!config) {
    return null_argument("config");
  }
  return guarded([&] {
    copy_out(lcb::render_config(config->config), buf, size, needed);
  });
}

lcb_status lcb_config_get(const lcb_config* config, const char* key, char* buf, size_t size,
                          size_t* needed) {
  if (!config || !key) {
    return null_argument("config or key");
  }
  return guarded([&] {
    const auto value = lcb::config_value(config->config, key);
    if (!value) {
      throw lcb::ArgumentError(std::string("setting not set: ") + key);
    }
    copy_out(*value, buf, size, needed);
  });
}

lcb_status lcb_run(const lcb_config* config, lcb_result** out) {
  if (!config || !out) {
    return null_argument("config or out");
  }
  *out = nullptr;
  return guarded([&] {
    auto r = std::make_unique<lcb_result>();
    r->result = lcb::run_experiment(config->config);
    *out = r.release();
  });
}

void lcb_result_destroy(lcb_result* result) { delete result; }

lcb_status lcb_result_write_reports(const lcb_result* result, const char* dir) {
  if (!result || !dir) {
    return null_argument("result or dir");
  }
  return guarded([&] { lcb::write_reports(result->result, dir); });
}

lcb_status lcb_result_budget_count(const lcb_result* result, size_t* out) {
  if (!result || !out) {
    return null_argument("result or out");
  }
  *out = result->result.runs.size();
  return LCB_OK;
}

lcb_status lcb_result_budget(const lcb_result* result, size_t budget_index, int64_t* budget,
                             double* fraction) {
  if (!result) {
    return null_argument("result");
  }
  return guarded([&] {
    const auto& run = run_at(result, budget_index);
    if (budget) {
      *budget = run.budget;
    }
    if (fraction) {
      *fraction = run.budget_fraction;
    }
  });
}

lcb_status lcb_result_zone_count(const lcb_result* result, size_t* out) {
  if (!result || !out) {
    return null_argument("result or out");
  }
  *out = result->result.zones.size();
  return LCB_OK;
}

lcb_status lcb_result_zone(const lcb_result* result, size_t zone_index, lcb_zone_info* out) {
  if (!result || !out) {
    return null_argument("result or out");
  }
  return guarded([&] {
    const auto& r = result->result;
    if (zone_index >= r.zones.size()) {
      throw lcb::ArgumentError("zone index out of range");
    }
    const auto& z = r.zones[zone_index];
    *out = lcb_zone_info{};
    std::memcpy(out->geohash, z.zone.geohash.data(),
                std::min(z.zone.geohash.size(), sizeof(out->geohash) - 1));
    out->numeric_id = z.zone.numeric_id;
    out->vehicle_count = z.vehicle_count;
    out->traffic_class = static_cast<lcb_traffic_class>(z.traffic_class);
    out->arrivals = static_cast<int64_t>(r.streams.zones[zone_index].events.size());
    if (!r.runs.empty()) {
      out->initial_active = r.runs.front().zones[zone_index].initial_active;
      out->active_switches = r.runs.front().zones[zone_index].active_switches;
    }
  });
}

lcb_status lcb_result_outcome(const lcb_result* result, size_t budget_index, size_t zone_index,
                              int subject, lcb_outcome* out) {
  if (!result || !out) {
    return null_argument("result or out");
  }
  return guarded([&] {
    const auto& run = run_at(result, budget_index);
    if (zone_index >= run.zones.size()) {
      throw lcb::ArgumentError("zone index out of range");
    }
    const auto& p = subject_of(subject).of(run.zones[zone_index]);
    *out = lcb_outcome{p.credited, p.served, p.selections, p.broker_switches};
  });
}

lcb_status lcb_result_class_average(const lcb_result* result, size_t budget_index,
                                    lcb_traffic_class cls, int subject, lcb_accounting accounting,
                                    double* avg_service, double* avg_selections, size_t* zones) {
  if (!result) {
    return null_argument("result");
  }
  return guarded([&] {
    const auto& run = run_at(result, budget_index);
    const auto acc =
        accounting == LCB_ACCOUNTING_TRUNCATED ? lcb::Accounting::Truncated : lcb::Accounting::Credited;
    const auto subj = subject_of(subject);
    std::optional<lcb::ClassAverages> avg;
    if (cls == LCB_CLASS_ALL) {
      avg = lcb::averages_all(run.zones, subj, acc);
    } else if (cls >= LCB_CLASS_LIGHT && cls <= LCB_CLASS_HIGH) {
      avg = lcb::averages_by_class(run.zones, static_cast<lcb::TrafficClass>(cls), subj, acc);
    } else {
      throw lcb::ArgumentError("traffic class out of range");
    }
    const double nan = std::numeric_limits<double>::quiet_NaN();
    if (avg_service) {
      *avg_service = avg ? avg->avg_service : nan;
    }
    if (avg_selections) {
      *avg_selections = avg ? avg->avg_selections : nan;
    }
    if (zones) {
      *zones = avg ? avg->zones : 0;
    }
  });
}

lcb_status lcb_result_warning_count(const lcb_result* result, size_t* out) {
  if (!result || !out) {
    return null_argument("result or out");
  }
  *out = result->result.warnings.size();
  return LCB_OK;
}

const char* lcb_result_warning(const lcb_result* result, size_t index) {
  if (!result || index >= result->result.warnings.size()) {
    return nullptr;
  }
  return result->result.warnings[index].c_str();
}

lcb_status lcb_result_mean_vehicles(const lcb_result* result, double* mean, double* stddev) {
  if (!result) {
    return null_argument("result");
  }
  if (mean) {
    *mean = result->result.classification.mean;
  }
  if (stddev) {
    *stddev = result->result.classification.stddev;
  }
  return LCB_OK;
}

lcb_status lcb_geohash_encode(double latitude, double longitude, int precision, char* out,
                              size_t size) {
  if (!out) {
    return null_argument("out");
  }
  return guarded([&] {
    const auto hash = lcb::geohash_encode(latitude, longitude, precision);
    if (size < hash.size() + 1) {
      throw lcb::ArgumentError("output buffer too small");
    }
    std::memcpy(out, hash.c_str(), hash.size() + 1);
  });
}

lcb_status lcb_zone_numeric_id(const char* geohash, uint64_t* out) {
  if (!geohash || !out) {
    return null_argument("geohash or out");
  }
  return guarded([&] { *out = lcb::zone_numeric_id(geohash); });
}

lcb_status lcb_generate_synthetic_csv(const char* spec, uint64_t seed, const char* path) {
  if (!spec || !path) {
    return null_argument("spec or path");
  }
  return guarded([&] {
    const auto parsed = lcb::resolve_synthetic_spec(lcb::parse_synthetic_spec(spec), seed);
    const auto trace = lcb::generate_synthetic(parsed);
    if (std::string_view(path) == "-") {
      lcb::write_trace_csv(trace, std::cout);
    } else {
      lcb::write_trace_csv(trace, std::filesystem::path(path));
    }
  });
}

}  // extern "C"
