#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lcbsim/events.hpp"
#include "lcbsim/metrics.hpp"
#include "lcbsim/selection.hpp"
#include "lcbsim/synthetic.hpp"

namespace lcb {

inline constexpr Seconds kDefaultInterval = 21'600;  // 6 h
inline constexpr double kDefaultBudgetBase = 35.0;

struct ExperimentConfig {
  std::optional<std::filesystem::path> trace_path;
  std::optional<SyntheticTraceSpec> synthetic;
  int days = 1;
  Seconds interval_d = kDefaultInterval;
  std::vector<double> budget_fractions = {1.0};
  std::vector<std::int64_t> budgets;  // absolute; overrides fractions when set
  // Reference for fractional budgets: budget = floor(fraction * base).
  // nullopt means the run's own mean N_z.
  std::optional<double> budget_base = kDefaultBudgetBase;
  std::uint64_t seed = 1;
  Accounting accounting = Accounting::Credited;
  Seconds gap_timeout = kDefaultGapTimeout;
  double noise = 0.0;
  int threads = 0;  // 0: hardware concurrency
  bool export_debug = false;
  std::optional<std::filesystem::path> output_dir;
};

// Applies one key=value setting. Keys match the CLI flag names
// ("interval-d", "budget-fraction", ...); '_' and '-' are interchangeable.
// Throws ConfigError.
void apply_setting(ExperimentConfig& config, std::string_view key, std::string_view value);

// Flat "key = value" lines, '#' comments.
void apply_config_text(ExperimentConfig& config, std::string_view text);
void apply_config_file(ExperimentConfig& config, const std::filesystem::path& path);

// Throws ConfigError describing the first problem.
void validate(const ExperimentConfig& config);

// The spec actually generated for a run: its seed is derived from the run
// seed and the spec's own seed.
SyntheticTraceSpec resolve_synthetic_spec(const SyntheticTraceSpec& spec, std::uint64_t run_seed);

// Resolved configuration as "key=value" lines (the run manifest body).
std::string render_config(const ExperimentConfig& config);

// Current value of one setting in render_config form; nullopt if unset.
std::optional<std::string> config_value(const ExperimentConfig& config, std::string_view key);

struct ExperimentResult {
  ExperimentConfig config;
  ArrivalStreams streams;
  ThresholdTable thresholds;
  std::vector<ZoneStats> zones;  // active zones, aligned with streams.zones
  ClassificationSummary classification;
  std::size_t universe_zones = 0;
  std::size_t trace_records = 0;
  std::size_t trace_vehicles = 0;
  std::size_t skipped_rows = 0;
  std::vector<BudgetOutcomes> runs;       // one per budget setting
  std::vector<IntervalRecord> intervals;  // budget-independent
  // Decision logs of the first budget setting, kept only with export_debug.
  std::vector<std::vector<DecisionLogEntry>> decision_logs;
  std::vector<std::string> warnings;
};

// load/generate -> replicate -> zone -> filter -> classify -> arrivals ->
// thresholds -> ensemble and baselines per zone -> metrics.
// Validates first (ConfigError); other failures throw lcb::Error.
ExperimentResult run_experiment(const ExperimentConfig& config);

// zones.csv, intervals.csv, summary.csv, run_manifest.txt, plus
// arrivals.csv, decisions.csv and zone_table.csv with export_debug.
void write_reports(const ExperimentResult& result, const std::filesystem::path& dir);

}  // namespace lcb
