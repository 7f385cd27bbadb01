#include "lcbsim/metrics.hpp"

#include <cmath>
#include <limits>
#include <ostream>

#include <fmt/format.h>

#include "lcbsim/error.hpp"

namespace lcb {

const PathOutcome& Subject::of(const ZoneOutcome& z) const {
  switch (kind) {
    case Kind::Ensemble:
      return z.ensemble;
    case Kind::Fixed:
      return z.fixed.at(static_cast<std::size_t>(index));
    case Kind::Tbo0:
      return z.tbo0;
  }
  return z.ensemble;
}

std::string Subject::label() const {
  switch (kind) {
    case Kind::Ensemble:
      return "ensemble";
    case Kind::Fixed:
      return ensemble_algorithms()[static_cast<std::size_t>(index)].label();
    case Kind::Tbo0:
      return "TBO-0";
  }
  return "unknown";
}

namespace {

template <typename Pred>
std::optional<ClassAverages> averages_where(std::span<const ZoneOutcome> outcomes,
                                            Subject subject, Accounting accounting, Pred keep) {
  ClassAverages avg;
  double service = 0.0;
  double selections = 0.0;
  for (const auto& z : outcomes) {
    if (!keep(z)) {
      continue;
    }
    const auto& path = subject.of(z);
    service += static_cast<double>(path.service(accounting));
    selections += static_cast<double>(path.selections);
    ++avg.zones;
  }
  if (avg.zones == 0) {
    return std::nullopt;
  }
  avg.avg_service = service / static_cast<double>(avg.zones);
  avg.avg_selections = selections / static_cast<double>(avg.zones);
  return avg;
}

std::string column_prefix(const Subject& s) {
  switch (s.kind) {
    case Subject::Kind::Ensemble:
      return "ensemble";
    case Subject::Kind::Fixed:
      return fmt::format("tbo{}",
                         ensemble_algorithms()[static_cast<std::size_t>(s.index)].percentile_x);
    case Subject::Kind::Tbo0:
      return "tbo0";
  }
  return "unknown";
}

std::vector<Subject> all_subjects() {
  std::vector<Subject> subjects{Subject::ensemble()};
  for (int i = 0; i < static_cast<int>(kAlgorithmCount); ++i) {
    subjects.push_back(Subject::fixed(i));
  }
  subjects.push_back(Subject::tbo0());
  return subjects;
}

}  // namespace

std::optional<ClassAverages> averages_by_class(std::span<const ZoneOutcome> outcomes,
                                               TrafficClass cls, Subject subject,
                                               Accounting accounting) {
  return averages_where(outcomes, subject, accounting,
                        [cls](const ZoneOutcome& z) { return z.traffic_class == cls; });
}

std::optional<ClassAverages> averages_all(std::span<const ZoneOutcome> outcomes,
                                          Subject subject, Accounting accounting) {
  return averages_where(outcomes, subject, accounting, [](const ZoneOutcome&) { return true; });
}

std::array<std::int64_t, kAlgorithmCount> best_algorithm_zone_counts(
    std::span<const ZoneOutcome> outcomes, Accounting accounting) {
  std::array<std::int64_t, kAlgorithmCount> counts{};
  for (const auto& z : outcomes) {
    Seconds best = std::numeric_limits<Seconds>::min();
    for (const auto& f : z.fixed) {
      best = std::max(best, f.service(accounting));
    }
    for (std::size_t i = 0; i < kAlgorithmCount; ++i) {
      if (z.fixed[i].service(accounting) == best) {
        ++counts[i];
      }
    }
  }
  return counts;
}

std::vector<IntervalRecord> interval_winner_series(const ZoneKey& zone,
                                                   std::span<const DecisionLogEntry> log,
                                                   Seconds d, Seconds run_start,
                                                   Seconds run_end) {
  const auto n = interval_count(run_start, run_end, d);
  std::vector<IntervalRecord> series(static_cast<std::size_t>(n));
  for (std::int64_t j = 0; j < n; ++j) {
    auto& r = series[static_cast<std::size_t>(j)];
    r.zone = zone;
    r.interval = j;
    r.start = run_start + j * d;
  }
  for (const auto& e : log) {
    if (e.time < run_start || e.time >= run_end) {
      throw ArgumentError(fmt::format("log entry at {} outside run [{}, {})", e.time, run_start,
                                      run_end));
    }
    auto& r = series[static_cast<std::size_t>((e.time - run_start) / d)];
    for (std::size_t i = 0; i < kAlgorithmCount; ++i) {
      if ((e.verdict_mask >> i) & 1u) {
        r.cumulative[i] += e.s;
      }
    }
  }
  for (auto& r : series) {
    r.winner = argmax_lowest(r.cumulative);
  }
  return series;
}

double percent_delta(double ensemble, double baseline) {
  if (baseline == 0.0) {
    if (ensemble == 0.0) {
      return 0.0;
    }
    return ensemble > 0.0 ? std::numeric_limits<double>::infinity()
                          : -std::numeric_limits<double>::infinity();
  }
  return (ensemble - baseline) / baseline * 100.0;
}

std::vector<ComparisonRow> comparison_table(std::span<const BudgetOutcomes> runs,
                                            TrafficClass cls, Subject baseline,
                                            Accounting accounting) {
  std::vector<ComparisonRow> rows;
  for (const auto& run : runs) {
    ComparisonRow row{run.budget, run.budget_fraction, std::nullopt, std::nullopt};
    const auto ens = averages_by_class(run.zones, cls, Subject::ensemble(), accounting);
    const auto base = averages_by_class(run.zones, cls, baseline, accounting);
    if (ens && base) {
      row.service_delta_pct = percent_delta(ens->avg_service, base->avg_service);
      row.selections_delta_pct = percent_delta(ens->avg_selections, base->avg_selections);
    }
    rows.push_back(row);
  }
  return rows;
}

std::string format_fixed(double value, int decimals) {
  if (std::isnan(value)) {
    return "NA";
  }
  if (std::isinf(value)) {
    return value > 0 ? "inf" : "-inf";
  }
  // Avoid "-0.0" so equal runs print identically.
  auto text = fmt::format("{:.{}f}", value, decimals);
  if (text.find_first_not_of("-0.") == std::string::npos && text.front() == '-') {
    text.erase(0, 1);
  }
  return text;
}

std::string format_fixed(const std::optional<double>& value, int decimals) {
  return value ? format_fixed(*value, decimals) : "NA";
}

void write_zones_csv(std::span<const BudgetOutcomes> runs, std::ostream& out) {
  const auto subjects = all_subjects();
  out << "budget_fraction,budget,geohash,numeric_id,n_z,class,arrivals,initial_active,"
         "active_switches,ensemble_broker_switches";
  for (const auto& s : subjects) {
    const auto p = column_prefix(s);
    out << ',' << p << "_credited_s," << p << "_truncated_s," << p << "_selections";
  }
  out << '\n';
  for (const auto& run : runs) {
    const auto fraction = format_fixed(run.budget_fraction, 4);
    for (const auto& z : run.zones) {
      out << fraction << ',' << run.budget << ',' << z.zone.geohash << ',' << z.zone.numeric_id
          << ',' << z.vehicle_count << ',' << to_string(z.traffic_class) << ',' << z.arrivals
          << ',' << ensemble_algorithms()[static_cast<std::size_t>(z.initial_active)].label()
          << ',' << z.active_switches << ',' << z.ensemble.broker_switches;
      for (const auto& s : subjects) {
        const auto& path = s.of(z);
        out << ',' << path.credited << ',' << path.served << ',' << path.selections;
      }
      out << '\n';
    }
  }
}

void write_intervals_csv(std::span<const IntervalRecord> records, std::ostream& out) {
  out << "geohash,interval,start";
  for (const auto& a : ensemble_algorithms()) {
    out << ",tbo" << a.percentile_x << "_s";
  }
  out << ",winner,active\n";
  for (const auto& r : records) {
    out << r.zone.geohash << ',' << r.interval << ',' << r.start;
    for (auto c : r.cumulative) {
      out << ',' << c;
    }
    out << ',' << ensemble_algorithms()[static_cast<std::size_t>(r.winner)].label() << ','
        << (r.active >= 0 ? ensemble_algorithms()[static_cast<std::size_t>(r.active)].label()
                          : std::string("NA"))
        << '\n';
  }
}

void write_summary_csv(std::span<const BudgetOutcomes> runs, Accounting accounting,
                       std::ostream& out) {
  out << "record,budget_fraction,budget,traffic_class,subject,accounting,zones,"
         "avg_service_credited_s,avg_service_truncated_s,avg_selections,"
         "service_delta_pct,selections_delta_pct\n";
  const auto subjects = all_subjects();
  const auto acc = to_string(accounting);

  struct ClassFilter {
    std::string_view name;
    std::optional<TrafficClass> cls;
  };
  std::vector<ClassFilter> filters;
  for (auto c : kTrafficClasses) {
    filters.push_back({to_string(c), c});
  }
  filters.push_back({"all", std::nullopt});

  for (const auto& run : runs) {
    const auto fraction = format_fixed(run.budget_fraction, 4);
    std::vector<ZoneOutcome> subset;
    for (const auto& f : filters) {
      subset.clear();
      for (const auto& z : run.zones) {
        if (!f.cls || z.traffic_class == *f.cls) {
          subset.push_back(z);
        }
      }
      for (const auto& s : subjects) {
        const auto credited = averages_all(subset, s, Accounting::Credited);
        const auto truncated = averages_all(subset, s, Accounting::Truncated);
        out << "average," << fraction << ',' << run.budget << ',' << f.name << ',' << s.label()
            << ',' << acc << ',' << subset.size() << ','
            << format_fixed(credited ? std::optional(credited->avg_service) : std::nullopt, 3)
            << ','
            << format_fixed(truncated ? std::optional(truncated->avg_service) : std::nullopt, 3)
            << ','
            << format_fixed(credited ? std::optional(credited->avg_selections) : std::nullopt,
                            3)
            << ",,\n";
      }
      const auto ens = averages_all(subset, Subject::ensemble(), accounting);
      for (const auto& s : subjects) {
        if (s.kind == Subject::Kind::Ensemble) {
          continue;
        }
        const auto base = averages_all(subset, s, accounting);
        std::optional<double> service_delta;
        std::optional<double> selections_delta;
        if (ens && base) {
          service_delta = percent_delta(ens->avg_service, base->avg_service);
          selections_delta = percent_delta(ens->avg_selections, base->avg_selections);
        }
        out << "comparison," << fraction << ',' << run.budget << ',' << f.name << ','
            << s.label() << ',' << acc << ',' << subset.size() << ",,,,"
            << format_fixed(service_delta, 1) << ',' << format_fixed(selections_delta, 1)
            << '\n';
      }
      const auto best = best_algorithm_zone_counts(subset, accounting);
      for (std::size_t i = 0; i < kAlgorithmCount; ++i) {
        out << "best_zone_count," << fraction << ',' << run.budget << ',' << f.name << ','
            << ensemble_algorithms()[i].label() << ',' << acc << ',' << best[i] << ",,,,,\n";
      }
    }
  }
}

}  // namespace lcb
