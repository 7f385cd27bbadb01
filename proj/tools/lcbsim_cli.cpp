// lcbsim: run the broker-selection simulation over a GPS trace or a
// synthetic trace and write the CSV reports.

#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "lcbsim/lcbsim.h"

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;

int exit_code(lcb_status s) { return s == LCB_ERR_CONFIG ? kExitConfig : kExitRuntime; }

int fail(lcb_status s, const char* what) {
  std::fprintf(stderr, "lcbsim: %s: %s\n", what, lcb_last_error());
  return exit_code(s);
}

struct ConfigHandle {
  lcb_config* p = nullptr;
  ~ConfigHandle() { lcb_config_destroy(p); }
};

struct ResultHandle {
  lcb_result* p = nullptr;
  ~ResultHandle() { lcb_result_destroy(p); }
};

std::optional<std::string> setting(const lcb_config* config, const char* key) {
  size_t needed = 0;
  if (lcb_config_get(config, key, nullptr, 0, &needed) != LCB_OK) {
    return std::nullopt;
  }
  std::string value(needed + 1, '\0');
  lcb_config_get(config, key, value.data(), value.size(), &needed);
  value.resize(needed);
  return value;
}

std::string hours(double seconds) {
  if (std::isnan(seconds)) {
    return "NA";
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", seconds / 3600.0);
  return buf;
}

void print_summary(const lcb_result* r) {
  size_t zones = 0;
  size_t budgets = 0;
  double mean = 0;
  double stddev = 0;
  lcb_result_zone_count(r, &zones);
  lcb_result_budget_count(r, &budgets);
  lcb_result_mean_vehicles(r, &mean, &stddev);
  std::printf("active zones: %zu  (N_z mean %.2f, std %.2f)\n", zones, mean, stddev);

  static const std::pair<lcb_traffic_class, const char*> classes[] = {
      {LCB_CLASS_LIGHT, "light"}, {LCB_CLASS_MEDIUM, "medium"}, {LCB_CLASS_HIGH, "high"},
      {LCB_CLASS_ALL, "all"}};
  for (size_t b = 0; b < budgets; ++b) {
    int64_t budget = 0;
    lcb_result_budget(r, b, &budget, nullptr);
    std::printf("\nbudget %lld: mean credited service per zone [h]\n",
                static_cast<long long>(budget));
    std::printf("%-7s %6s %9s %9s %9s %9s\n", "class", "zones", "ensemble", "best-tbo", "worst-tbo",
                "tbo-0");
    for (const auto& [cls, name] : classes) {
      double ens = NAN;
      size_t n = 0;
      lcb_result_class_average(r, b, cls, LCB_SUBJECT_ENSEMBLE, LCB_ACCOUNTING_CREDITED, &ens,
                               nullptr, &n);
      double best = NAN;
      double worst = NAN;
      for (int i = 0; i < 9; ++i) {
        double v = NAN;
        lcb_result_class_average(r, b, cls, i, LCB_ACCOUNTING_CREDITED, &v, nullptr, nullptr);
        if (!std::isnan(v)) {
          best = std::isnan(best) ? v : std::max(best, v);
          worst = std::isnan(worst) ? v : std::min(worst, v);
        }
      }
      double t0 = NAN;
      lcb_result_class_average(r, b, cls, LCB_SUBJECT_TBO0, LCB_ACCOUNTING_CREDITED, &t0, nullptr,
                               nullptr);
      std::printf("%-7s %6zu %9s %9s %9s %9s\n", name, n, hours(ens).c_str(), hours(best).c_str(),
                  hours(worst).c_str(), hours(t0).c_str());
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Local community broker selection simulator"};
  app.set_version_flag("--version", std::string(lcb_version()));

  std::optional<std::string> config_file;
  std::optional<std::string> dump_synthetic;
  std::vector<std::pair<std::string, std::string>> settings;

  // Flags map one-to-one onto config keys; the config file is applied
  // first and flags override it.
  auto add = [&](const std::string& flag, const std::string& key, const std::string& help) {
    app.add_option_function<std::string>(
        flag, [&settings, key](const std::string& v) { settings.emplace_back(key, v); }, help);
  };
  add("--trace", "trace", "GPS trace CSV (vehicle_id,timestamp,lat,lon[,speed,heading])");
  add("--synthetic", "synthetic", "synthetic trace spec, inline or a file path");
  add("--days", "days", "replicate a one-day trace K times");
  add("--interval-d", "interval-d", "ensemble interval length in seconds");
  add("--budget-fraction", "budget-fraction", "budget as fraction(s) of the budget base");
  add("--budget", "budget", "absolute per-zone budget(s)");
  add("--budget-base", "budget-base", "reference for fractional budgets, a number or 'mean'");
  add("--seed", "seed", "run seed");
  add("--accounting", "accounting", "credited|truncated, used for comparison rows");
  add("--gap-timeout", "gap-timeout", "split dwells at sample gaps longer than this (s)");
  add("--noise", "noise", "relative amplitude of estimate noise, 0 = clairvoyant");
  add("--threads", "threads", "worker threads, 0 = hardware concurrency");
  add("--export-debug", "export-debug", "also write arrivals, decisions and zone table");
  add("--out", "out", "output directory");
  app.add_option("--config", config_file, "flat key = value config file");
  app.add_option("--dump-synthetic", dump_synthetic,
                 "write the synthetic trace CSV to PATH ('-' for stdout) and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  ConfigHandle config;
  if (auto s = lcb_config_create(&config.p); s != LCB_OK) {
    return fail(s, "init");
  }
  if (config_file) {
    if (auto s = lcb_config_load_file(config.p, config_file->c_str()); s != LCB_OK) {
      return fail(s, "config");
    }
  }
  for (const auto& [key, value] : settings) {
    if (auto s = lcb_config_set(config.p, key.c_str(), value.c_str()); s != LCB_OK) {
      return fail(s, "config");
    }
  }

  if (dump_synthetic) {
    const auto spec = setting(config.p, "synthetic");
    if (!spec) {
      std::fprintf(stderr, "lcbsim: --dump-synthetic needs --synthetic\n");
      return kExitConfig;
    }
    const auto seed = setting(config.p, "seed").value_or("1");
    const auto s = lcb_generate_synthetic_csv(spec->c_str(), std::stoull(seed),
                                              dump_synthetic->c_str());
    return s == LCB_OK ? 0 : fail(s, "synthetic");
  }

  if (auto s = lcb_config_validate(config.p); s != LCB_OK) {
    return fail(s, "config");
  }
  const auto out_dir = setting(config.p, "out").value_or("lcbsim_out");

  ResultHandle result;
  if (auto s = lcb_run(config.p, &result.p); s != LCB_OK) {
    return fail(s, "run");
  }
  size_t warnings = 0;
  lcb_result_warning_count(result.p, &warnings);
  for (size_t i = 0; i < warnings; ++i) {
    std::fprintf(stderr, "lcbsim: warning: %s\n", lcb_result_warning(result.p, i));
  }
  if (auto s = lcb_result_write_reports(result.p, out_dir.c_str()); s != LCB_OK) {
    return fail(s, "write");
  }
  print_summary(result.p);
  std::printf("\nreports written to %s\n", out_dir.c_str());
  return 0;
}
