#include "lcbsim/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include <fmt/format.h>

#include "lcbsim/error.hpp"
#include "text_util.hpp"

namespace lcb {

using detail::split;
using detail::to_bool;
using detail::to_number;
using detail::trim;

namespace {

template <typename T>
T number_or_throw(std::string_view key, std::string_view value) {
  const auto v = to_number<T>(value);
  if (!v) {
    throw ConfigError(fmt::format("{}: cannot parse '{}'", key, value));
  }
  return *v;
}

std::string join_doubles(const std::vector<double>& values) {
  std::string out;
  for (double v : values) {
    out += (out.empty() ? "" : ",") + fmt::format("{}", v);
  }
  return out;
}

}  // namespace

void apply_setting(ExperimentConfig& config, std::string_view raw_key, std::string_view raw_value) {
  const auto key = detail::normalize_key(raw_key);
  const auto value = trim(raw_value);

  if (key == "trace") {
    config.trace_path = std::filesystem::path(std::string(value));
  } else if (key == "synthetic") {
    // A readable file holds the spec; anything else is an inline spec.
    std::error_code ec;
    const std::filesystem::path p{std::string(value)};
    if (!value.empty() && std::filesystem::is_regular_file(p, ec)) {
      std::ifstream in(p);
      std::stringstream buffer;
      buffer << in.rdbuf();
      config.synthetic = parse_synthetic_spec(buffer.str());
    } else {
      config.synthetic = parse_synthetic_spec(value);
    }
  } else if (key == "days") {
    config.days = number_or_throw<int>(key, value);
  } else if (key == "interval-d") {
    config.interval_d = number_or_throw<Seconds>(key, value);
  } else if (key == "budget-fraction") {
    config.budget_fractions.clear();
    for (auto part : split(value, ',')) {
      config.budget_fractions.push_back(number_or_throw<double>(key, part));
    }
    config.budgets.clear();
  } else if (key == "budget") {
    config.budgets.clear();
    for (auto part : split(value, ',')) {
      config.budgets.push_back(number_or_throw<std::int64_t>(key, part));
    }
  } else if (key == "budget-base") {
    if (value == "mean") {
      config.budget_base.reset();
    } else {
      config.budget_base = number_or_throw<double>(key, value);
    }
  } else if (key == "seed") {
    config.seed = number_or_throw<std::uint64_t>(key, value);
  } else if (key == "accounting") {
    if (value == "credited") {
      config.accounting = Accounting::Credited;
    } else if (value == "truncated") {
      config.accounting = Accounting::Truncated;
    } else {
      throw ConfigError(fmt::format("accounting: expected credited|truncated, got '{}'", value));
    }
  } else if (key == "gap-timeout") {
    config.gap_timeout = number_or_throw<Seconds>(key, value);
  } else if (key == "noise") {
    config.noise = number_or_throw<double>(key, value);
  } else if (key == "threads") {
    config.threads = number_or_throw<int>(key, value);
  } else if (key == "export-debug") {
    const auto b = to_bool(value);
    if (!b) {
      throw ConfigError(fmt::format("export-debug: expected a boolean, got '{}'", value));
    }
    config.export_debug = *b;
  } else if (key == "out") {
    config.output_dir = std::filesystem::path(std::string(value));
  } else {
    throw ConfigError(fmt::format("unknown setting '{}'", raw_key));
  }
}

void apply_config_text(ExperimentConfig& config, std::string_view text) {
  std::size_t line_no = 0;
  for (auto line : split(text, '\n')) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = trim(line.substr(0, hash));
    }
    if (line.empty()) {
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(fmt::format("config line {}: expected key = value", line_no));
    }
    apply_setting(config, line.substr(0, eq), line.substr(eq + 1));
  }
}

void apply_config_file(ExperimentConfig& config, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError(fmt::format("cannot read config file '{}'", path.string()));
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  apply_config_text(config, buffer.str());
}

void validate(const ExperimentConfig& config) {
  if (config.trace_path.has_value() == config.synthetic.has_value()) {
    throw ConfigError("exactly one of trace or synthetic must be given");
  }
  if (config.days < 1) {
    throw ConfigError(fmt::format("days must be >= 1, got {}", config.days));
  }
  if (config.interval_d <= 0) {
    throw ConfigError(fmt::format("interval-d must be > 0, got {}", config.interval_d));
  }
  if (config.budgets.empty() && config.budget_fractions.empty()) {
    throw ConfigError("no budget setting");
  }
  for (double f : config.budget_fractions) {
    if (f < 0.0) {
      throw ConfigError(fmt::format("budget-fraction must be >= 0, got {}", f));
    }
  }
  for (auto b : config.budgets) {
    if (b < 0) {
      throw ConfigError(fmt::format("budget must be >= 0, got {}", b));
    }
  }
  if (config.budget_base && *config.budget_base < 0.0) {
    throw ConfigError("budget-base must be >= 0");
  }
  if (config.gap_timeout <= 0) {
    throw ConfigError(fmt::format("gap-timeout must be > 0, got {}", config.gap_timeout));
  }
  if (config.noise < 0.0 || config.noise >= 1.0) {
    throw ConfigError(fmt::format("noise must be in [0, 1), got {}", config.noise));
  }
  if (config.threads < 0) {
    throw ConfigError("threads must be >= 0");
  }
}

SyntheticTraceSpec resolve_synthetic_spec(const SyntheticTraceSpec& spec, std::uint64_t run_seed) {
  auto out = spec;
  out.seed = substream_seed(run_seed, fmt::format("synthetic/{}", spec.seed));
  return out;
}

std::string render_config(const ExperimentConfig& config) {
  std::string out;
  if (config.trace_path) {
    out += fmt::format("trace={}\n", config.trace_path->string());
  }
  if (config.synthetic) {
    out += fmt::format("synthetic={}\n", to_string(*config.synthetic));
  }
  out += fmt::format("days={}\n", config.days);
  out += fmt::format("interval-d={}\n", config.interval_d);
  if (config.budgets.empty()) {
    out += fmt::format("budget-fraction={}\n", join_doubles(config.budget_fractions));
  } else {
    std::string list;
    for (auto b : config.budgets) {
      list += (list.empty() ? "" : ",") + std::to_string(b);
    }
    out += fmt::format("budget={}\n", list);
  }
  out += fmt::format("budget-base={}\n",
                     config.budget_base ? fmt::format("{}", *config.budget_base) : "mean");
  out += fmt::format("seed={}\n", config.seed);
  out += fmt::format("accounting={}\n", to_string(config.accounting));
  out += fmt::format("gap-timeout={}\n", config.gap_timeout);
  out += fmt::format("noise={}\n", config.noise);
  out += fmt::format("export-debug={}\n", config.export_debug ? "true" : "false");
  return out;
}

std::optional<std::string> config_value(const ExperimentConfig& config, std::string_view raw_key) {
  const auto key = detail::normalize_key(raw_key);
  if (key == "out") {
    if (!config.output_dir) {
      return std::nullopt;
    }
    return config.output_dir->string();
  }
  if (key == "threads") {
    return std::to_string(config.threads);
  }
  const auto rendered = render_config(config);
  for (auto line : split(rendered, '\n')) {
    const auto eq = line.find('=');
    if (eq != std::string_view::npos && line.substr(0, eq) == key) {
      return std::string(line.substr(eq + 1));
    }
  }
  return std::nullopt;
}

namespace {

// Runs fn(i) for i in [0, n) on `threads` workers; results land in caller
// slots indexed by i, so output order never depends on scheduling.
template <typename Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
  const auto workers = static_cast<std::size_t>(std::max(1, threads));
  if (workers == 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) {
      fn(i);
    }
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto body = [&]() {
    while (true) {
      const auto i = next.fetch_add(1);
      if (i >= n) {
        return;
      }
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) {
          failure = std::current_exception();
        }
        next.store(n);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < std::min(workers, n); ++w) {
    pool.emplace_back(body);
  }
  for (auto& t : pool) {
    t.join();
  }
  if (failure) {
    std::rethrow_exception(failure);
  }
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config) {
  validate(config);
  ExperimentResult result;
  result.config = config;

  TraceSet trace;
  std::vector<ZoneKey> universe;
  if (config.trace_path) {
    auto report = load_trace(*config.trace_path);
    result.skipped_rows = report.skipped_rows;
    if (report.skipped_rows > 0) {
      result.warnings.push_back(
          fmt::format("skipped {} malformed trace rows", report.skipped_rows));
      for (auto& w : report.warnings) {
        result.warnings.push_back(std::move(w));
      }
    }
    trace = std::move(report.trace);
  } else {
    const auto spec = resolve_synthetic_spec(*config.synthetic, config.seed);
    trace = generate_synthetic(spec);
    universe = synthetic_zone_grid(spec);
  }
  result.trace_records = trace.record_count() * static_cast<std::size_t>(config.days);
  result.trace_vehicles = trace.vehicle_count();

  ArrivalOptions options;
  options.gap_timeout = config.gap_timeout;
  options.replication = config.days;
  options.noise = EstimatorNoise{config.noise, substream_seed(config.seed, "estimator-noise")};
  auto streams = build_arrival_streams(trace, std::nullopt, options);

  // Zone table over the universe (observed zones plus any grid cell that
  // never saw traffic), then drop inactive zones.
  auto stats = zone_activity(streams);
  for (const auto& key : universe) {
    if (!streams.find(key)) {
      stats.push_back(ZoneStats{key, 0, TrafficClass::Light});
    }
  }
  std::sort(stats.begin(), stats.end(),
            [](const ZoneStats& a, const ZoneStats& b) { return a.zone < b.zone; });
  result.universe_zones = stats.size();
  stats = filter_inactive_zones(std::move(stats));
  result.classification = classify_zones(stats);
  if (result.classification.medium_band_empty) {
    result.warnings.push_back(fmt::format(
        "standard deviation of N_z ({:.3f}) is below its mean ({:.3f}); the medium traffic band "
        "is empty",
        result.classification.stddev, result.classification.mean));
  }
  std::vector<ZoneKey> active;
  active.reserve(stats.size());
  for (const auto& s : stats) {
    active.push_back(s.zone);
  }
  if (active.size() != streams.zones.size()) {
    streams = build_arrival_streams(trace, std::span<const ZoneKey>(active), options);
  }
  result.zones = std::move(stats);
  result.thresholds = build_threshold_table(streams);

  struct BudgetSetting {
    double fraction;
    std::int64_t budget;
  };
  std::vector<BudgetSetting> settings;
  if (!config.budgets.empty()) {
    for (auto b : config.budgets) {
      settings.push_back({std::numeric_limits<double>::quiet_NaN(), b});
    }
  } else {
    const double base = config.budget_base.value_or(result.classification.mean);
    for (double f : config.budget_fractions) {
      settings.push_back({f, static_cast<std::int64_t>(std::floor(f * base + 1e-9))});
    }
  }

  const int threads = config.threads > 0
                          ? config.threads
                          : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  const auto zone_count = streams.zones.size();
  std::vector<std::vector<IntervalRecord>> zone_intervals(zone_count);
  if (config.export_debug) {
    result.decision_logs.resize(zone_count);
  }

  for (std::size_t b = 0; b < settings.size(); ++b) {
    BudgetOutcomes run{settings[b].fraction, settings[b].budget, {}};
    run.zones.resize(zone_count);
    const bool first = b == 0;
    parallel_for(zone_count, threads, [&](std::size_t z) {
      const auto& arrivals = streams.zones[z];
      SimulationOptions sim;
      sim.seed = config.seed;
      sim.budget = settings[b].budget;
      sim.interval = config.interval_d;
      sim.run_start = streams.run_start;
      sim.run_end = streams.run_end;
      sim.keep_decision_log = first;
      auto zr = simulate_zone(arrivals, result.thresholds.zones[z], sim);

      auto& out = run.zones[z];
      out.zone = arrivals.zone;
      out.traffic_class = result.zones[z].traffic_class;
      out.vehicle_count = result.zones[z].vehicle_count;
      out.arrivals = static_cast<std::int64_t>(arrivals.events.size());
      out.budget = settings[b].budget;
      out.ensemble = zr.ensemble;
      out.fixed = zr.fixed;
      out.tbo0 = zr.tbo0;
      out.initial_active = zr.initial_active;
      out.active_switches = zr.active_switches;

      if (first) {
        auto series = interval_winner_series(arrivals.zone, zr.log, config.interval_d,
                                             streams.run_start, streams.run_end);
        for (std::size_t j = 0; j < series.size() && j < zr.active_per_interval.size(); ++j) {
          series[j].active = zr.active_per_interval[j];
        }
        zone_intervals[z] = std::move(series);
        if (config.export_debug) {
          result.decision_logs[z] = std::move(zr.log);
        }
      }
    });
    result.runs.push_back(std::move(run));
  }
  for (auto& series : zone_intervals) {
    result.intervals.insert(result.intervals.end(), std::make_move_iterator(series.begin()),
                            std::make_move_iterator(series.end()));
  }
  result.streams = std::move(streams);
  return result;
}

namespace {

std::ofstream open_report(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError(fmt::format("cannot open '{}' for writing", path.string()));
  }
  return out;
}

void close_report(std::ofstream& out, const std::filesystem::path& path) {
  out.close();
  if (!out) {
    throw IoError(fmt::format("write to '{}' failed", path.string()));
  }
}

}  // namespace

void write_reports(const ExperimentResult& result, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw IoError(fmt::format("cannot create output directory '{}': {}", dir.string(),
                              ec.message()));
  }
  auto write = [&](const char* name, auto&& body) {
    const auto path = dir / name;
    auto out = open_report(path);
    body(out);
    close_report(out, path);
  };

  write("zones.csv", [&](std::ostream& out) { write_zones_csv(result.runs, out); });
  write("intervals.csv", [&](std::ostream& out) { write_intervals_csv(result.intervals, out); });
  write("summary.csv", [&](std::ostream& out) {
    write_summary_csv(result.runs, result.config.accounting, out);
  });
  write("run_manifest.txt", [&](std::ostream& out) {
    out << render_config(result.config);
    out << "run-start=" << result.streams.run_start << '\n';
    out << "run-end=" << result.streams.run_end << '\n';
    out << "intervals="
        << interval_count(result.streams.run_start, result.streams.run_end,
                          result.config.interval_d)
        << '\n';
    out << "vehicles=" << result.trace_vehicles << '\n';
    out << "records=" << result.trace_records << '\n';
    out << "skipped-rows=" << result.skipped_rows << '\n';
    out << "arrivals=" << result.streams.total_events() << '\n';
    out << "zones-universe=" << result.universe_zones << '\n';
    out << "zones-active=" << result.zones.size() << '\n';
    out << "n-z-mean=" << format_fixed(result.classification.mean, 3) << '\n';
    out << "n-z-std=" << format_fixed(result.classification.stddev, 3) << '\n';
    for (auto c : kTrafficClasses) {
      const auto n = std::count_if(result.zones.begin(), result.zones.end(),
                                   [c](const ZoneStats& z) { return z.traffic_class == c; });
      out << "zones-" << to_string(c) << '=' << n << '\n';
    }
    for (const auto& run : result.runs) {
      out << "budget-setting=" << format_fixed(run.budget_fraction, 4) << ':' << run.budget
          << '\n';
    }
    for (const auto& w : result.warnings) {
      out << "warning=" << w << '\n';
    }
  });

  if (result.config.export_debug) {
    write("arrivals.csv", [&](std::ostream& out) { write_arrivals_csv(result.streams, out); });
    write("zone_table.csv", [&](std::ostream& out) { write_zone_table_csv(result.zones, out); });
    write("decisions.csv", [&](std::ostream& out) {
      for (std::size_t z = 0; z < result.decision_logs.size(); ++z) {
        write_decision_log_csv(result.streams.zones[z].zone, result.decision_logs[z],
                               result.streams.vehicle_ids, out, z == 0);
      }
      if (result.decision_logs.empty()) {
        out << "zone,time,vehicle_id,s,verdict_mask,active,committed,budget_remaining\n";
      }
    });
  }
}

}  // namespace lcb
