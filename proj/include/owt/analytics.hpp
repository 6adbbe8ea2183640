// Corpus analyses on labeled series: acquisition cadence, deployment
// durations (first foundation to first turbine), maintenance gaps between
// turbine sightings, and a grid-search calibrator for classifier thresholds.
#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "owt/classifier.hpp"
#include "owt/core.hpp"
#include "owt/metrics.hpp"

namespace owt {

struct SeriesStats {
  std::string box_id;
  std::size_t event_count = 0;
  std::optional<double> median_interval_days;  // absent for single-event series
};

namespace detail {

inline std::optional<double> median_gap(const std::vector<Date>& dates) {
  if (dates.size() < 2) return std::nullopt;
  std::vector<int> gaps;
  gaps.reserve(dates.size() - 1);
  for (std::size_t i = 1; i < dates.size(); ++i) gaps.push_back(dates[i].days - dates[i - 1].days);
  std::sort(gaps.begin(), gaps.end());
  std::size_t n = gaps.size();
  if (n % 2 == 1) return static_cast<double>(gaps[n / 2]);
  return (gaps[n / 2 - 1] + gaps[n / 2]) / 2.0;
}

}  // namespace detail

// Median day-gap between consecutive events. Same-day ascending/descending
// pairs contribute a zero gap.
inline SeriesStats series_stats(const TimeSeries& series) {
  if (series.events.empty()) throw Error(Errc::EmptyInput, "series_stats: no events");
  std::vector<Date> dates;
  dates.reserve(series.events.size());
  for (const auto& e : series.events) dates.push_back(e.img_date);
  return SeriesStats{series.box_id, series.events.size(), detail::median_gap(dates)};
}

inline SeriesStats series_stats(const LabeledTimeSeries& series) {
  if (series.events.empty()) throw Error(Errc::EmptyInput, "series_stats: no events");
  std::vector<Date> dates;
  dates.reserve(series.events.size());
  for (const auto& e : series.events) dates.push_back(e.date);
  return SeriesStats{series.box_id, series.events.size(), detail::median_gap(dates)};
}

struct DeploymentRecord {
  std::string box_id;
  std::optional<Date> first_foundation_date;
  std::optional<Date> first_turbine_date;
  std::optional<int> duration_days;
  std::string region;
  std::string reason;  // set when duration is absent
};

// Days from the first TurbineFoundation event to the first DeployedTurbine
// event. Absent with a reason code when either anchor is missing or the
// foundation only shows up after the turbine.
inline DeploymentRecord deployment_duration(const LabeledTimeSeries& series,
                                            std::string region = "") {
  DeploymentRecord r;
  r.box_id = series.box_id;
  r.region = std::move(region);
  for (const LabeledEvent& e : series.events) {
    if (e.label == EventLabel::TurbineFoundation && !r.first_foundation_date)
      r.first_foundation_date = e.date;
    if (e.label == EventLabel::DeployedTurbine && !r.first_turbine_date)
      r.first_turbine_date = e.date;
  }
  if (!r.first_turbine_date) {
    r.reason = "no-turbine";
  } else if (!r.first_foundation_date) {
    r.reason = "no-foundation";
  } else if (r.first_foundation_date->days > r.first_turbine_date->days) {
    r.reason = "no-foundation-before-turbine";
  } else {
    r.duration_days = r.first_turbine_date->days - r.first_foundation_date->days;
  }
  return r;
}

struct MaintenanceGap {
  std::string box_id;
  Date gap_start;  // last DeployedTurbine sighting before the gap
  Date gap_end;    // first DeployedTurbine sighting after it
  int span_days = 0;
  std::size_t interior_events = 0;
  std::array<std::size_t, kLabelCount> interior_counts{};  // by EventLabel
};

// Stretches between two DeployedTurbine sightings with no turbine in between
// and at least one other event, spanning at least min_gap_days. Trailing or
// leading non-turbine stretches are open-ended and never reported.
inline std::vector<MaintenanceGap> maintenance_gaps(const LabeledTimeSeries& series,
                                                    int min_gap_days = 30) {
  std::vector<MaintenanceGap> gaps;
  std::optional<std::size_t> prev_t;
  for (std::size_t i = 0; i < series.events.size(); ++i) {
    if (series.events[i].label != EventLabel::DeployedTurbine) continue;
    if (prev_t && i > *prev_t + 1) {
      MaintenanceGap g;
      g.box_id = series.box_id;
      g.gap_start = series.events[*prev_t].date;
      g.gap_end = series.events[i].date;
      g.span_days = g.gap_end.days - g.gap_start.days;
      for (std::size_t j = *prev_t + 1; j < i; ++j) {
        g.interior_counts[static_cast<std::size_t>(series.events[j].label)] += 1;
        g.interior_events += 1;
      }
      if (g.span_days >= min_gap_days) gaps.push_back(std::move(g));
    }
    prev_t = i;
  }
  return gaps;
}

// ---- Threshold calibration ----

struct BenchmarkPair {
  TimeSeries series;
  std::vector<EventLabel> truth;  // aligned with series.events
};

struct CalibrationEntry {
  std::size_t index = 0;          // position in the expanded grid
  nlohmann::json params;          // the overrides applied for this entry
  double macro_f1 = 0.0;
  double auc_collapsed = 0.0;
};

struct CalibrationResult {
  ClassifierConfig best;
  std::size_t best_index = 0;
  std::vector<CalibrationEntry> table;  // grid order
};

namespace detail {

inline void apply_param(ClassifierConfig& c, const std::string& name, double v) {
  if (name == "water_mean_max") c.water_mean_max = v;
  else if (name == "water_std_max") c.water_std_max = v;
  else if (name == "weak_centre_prominence") c.weak_centre_prominence = v;
  else if (name == "broad_peak_width_min") c.broad_peak_width_min = v;
  else if (name == "high_range_min") c.high_range_min = v;
  else if (name == "mooring_mean_min") c.mooring_mean_min = v;
  else if (name == "mooring_std_max") c.mooring_std_max = v;
  else if (name == "turbine_centre_prominence_min") c.turbine_centre_prominence_min = v;
  else if (name == "turbine_side_prominence_min") c.turbine_side_prominence_min = v;
  else if (name == "turbine_amplitude_min") c.turbine_amplitude_min = v;
  else if (name == "foundation_centre_prominence_min") c.foundation_centre_prominence_min = v;
  else if (name == "vessel_offset_min") c.vessel_offset_min = static_cast<int>(v);
  else if (name == "relaxed_factor") c.relaxed_factor = v;
  else if (name == "smoothing_window") c.smoothing_window = static_cast<int>(v);
  else if (name == "convergence_max_iters") c.convergence_max_iters = static_cast<int>(v);
  else if (name == "features.sigma") c.features.sigma = v;
  else if (name == "features.min_distance") c.features.min_distance = static_cast<int>(v);
  else if (name == "features.min_prominence") c.features.min_prominence = v;
  else throw Error(Errc::InvalidArgument, "calibrate: unknown parameter " + name);
}

inline CalibrationEntry score_config(std::size_t index, const ClassifierConfig& cfg,
                                     const nlohmann::json& params,
                                     const std::vector<BenchmarkPair>& benchmark) {
  ConfusionMatrix pooled;
  std::vector<SequencePair> pairs;
  pairs.reserve(benchmark.size());
  FeatureScratch scratch;
  for (const BenchmarkPair& bp : benchmark) {
    LabeledTimeSeries out = classify_series(bp.series, cfg, nullptr, &scratch);
    std::vector<EventLabel> pred = out.labels();
    pooled += confusion(bp.truth, pred);
    pairs.push_back(SequencePair{bp.series.box_id, bp.truth, std::move(pred)});
  }
  CalibrationEntry e;
  e.index = index;
  e.params = params;
  e.macro_f1 = prf(pooled).macro.f1;
  e.auc_collapsed = editsim_report(pairs).auc_collapsed;
  return e;
}

}  // namespace detail

// Exhaustive grid search. grid_spec maps parameter names to candidate value
// arrays; the cartesian product is scored against the benchmark, maximizing
// pooled macro F1 with collapsed-sequence AUC and then grid order breaking
// ties. jobs > 1 splits grid points across threads; results are identical
// for any worker count.
inline CalibrationResult calibrate(const std::vector<BenchmarkPair>& benchmark,
                                   const ClassifierConfig& base, const nlohmann::json& grid_spec,
                                   int jobs = 1) {
  if (benchmark.empty()) throw Error(Errc::EmptyInput, "calibrate: empty benchmark");
  if (!grid_spec.is_object()) throw Error(Errc::InvalidArgument, "calibrate: grid must be an object");

  std::vector<std::string> names;
  std::vector<std::vector<double>> values;
  for (const auto& [key, val] : grid_spec.items()) {
    if (!val.is_array() || val.empty())
      throw Error(Errc::EmptyGrid, "calibrate: parameter " + key + " has no values");
    names.push_back(key);
    values.push_back(val.get<std::vector<double>>());
  }
  std::size_t total = 1;
  for (const auto& v : values) total *= v.size();
  if (total == 0) throw Error(Errc::EmptyGrid, "calibrate: grid expands to nothing");

  // Expand configs up front so workers share nothing but read-only state.
  std::vector<ClassifierConfig> configs(total, base);
  std::vector<nlohmann::json> params(total, nlohmann::json::object());
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rem = idx;
    for (std::size_t f = 0; f < names.size(); ++f) {
      std::size_t vi = rem % values[f].size();
      rem /= values[f].size();
      detail::apply_param(configs[idx], names[f], values[f][vi]);
      params[idx][names[f]] = values[f][vi];
    }
    configs[idx].validate();
  }

  std::vector<CalibrationEntry> table(total);
  auto work = [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i)
      table[i] = detail::score_config(i, configs[i], params[i], benchmark);
  };
  int workers = std::max(1, jobs);
  if (workers == 1 || total == 1) {
    work(0, total);
  } else {
    std::vector<std::thread> threads;
    std::size_t chunk = (total + workers - 1) / static_cast<std::size_t>(workers);
    for (std::size_t lo = 0; lo < total; lo += chunk)
      threads.emplace_back(work, lo, std::min(lo + chunk, total));
    for (auto& t : threads) t.join();
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i < total; ++i) {
    const CalibrationEntry& a = table[i];
    const CalibrationEntry& b = table[best];
    if (a.macro_f1 > b.macro_f1 ||
        (a.macro_f1 == b.macro_f1 && a.auc_collapsed > b.auc_collapsed))
      best = i;
  }
  return CalibrationResult{configs[best], best, std::move(table)};
}

}  // namespace owt
