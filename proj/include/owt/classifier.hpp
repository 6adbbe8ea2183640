// Two-stage rule classifier. Stage 1 labels each profile from its features
// alone; stage 2 revisits the sequence with neighbourhood smoothing, relaxed
// re-tests of Unclear events, segment-order repair, and whole-series platform
// detection.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "owt/core.hpp"
#include "owt/features.hpp"

namespace owt {

struct ClassifierConfig {
  FeatureConfig features;

  double water_mean_max = -18.0;
  double water_std_max = 1.5;
  double weak_centre_prominence = 3.0;
  double broad_peak_width_min = 8.0;
  double high_range_min = 18.0;
  double mooring_mean_min = -10.0;
  double mooring_std_max = 2.0;
  double turbine_centre_prominence_min = 8.0;
  double turbine_side_prominence_min = 4.0;
  double turbine_amplitude_min = -8.0;
  double foundation_centre_prominence_min = 5.0;
  int vessel_offset_min = 5;
  double relaxed_factor = 0.75;
  int smoothing_window = 5;
  int convergence_max_iters = 50;

  void validate() const {
    auto finite = [](double v) { return std::isfinite(v); };
    if (!finite(water_mean_max) || !finite(water_std_max) || !finite(weak_centre_prominence) ||
        !finite(broad_peak_width_min) || !finite(high_range_min) || !finite(mooring_mean_min) ||
        !finite(mooring_std_max) || !finite(turbine_centre_prominence_min) ||
        !finite(turbine_side_prominence_min) || !finite(turbine_amplitude_min) ||
        !finite(foundation_centre_prominence_min))
      throw Error(Errc::InvalidArgument, "classifier config: thresholds must be finite");
    if (!(relaxed_factor > 0.0 && relaxed_factor <= 1.0))
      throw Error(Errc::InvalidArgument, "classifier config: relaxed_factor must be in (0,1]");
    if (smoothing_window < 3 || smoothing_window % 2 == 0)
      throw Error(Errc::InvalidArgument, "classifier config: smoothing_window must be odd and >= 3");
    if (vessel_offset_min < 0)
      throw Error(Errc::InvalidArgument, "classifier config: vessel_offset_min must be >= 0");
    if (convergence_max_iters < 1)
      throw Error(Errc::InvalidArgument, "classifier config: convergence_max_iters must be >= 1");
    if (features.sigma <= 0.0 || features.min_distance < 1 || features.min_prominence < 0.0)
      throw Error(Errc::InvalidArgument, "classifier config: bad feature settings");
  }

  nlohmann::json to_json() const {
    return nlohmann::json{
        {"water_mean_max", water_mean_max},
        {"water_std_max", water_std_max},
        {"weak_centre_prominence", weak_centre_prominence},
        {"broad_peak_width_min", broad_peak_width_min},
        {"high_range_min", high_range_min},
        {"mooring_mean_min", mooring_mean_min},
        {"mooring_std_max", mooring_std_max},
        {"turbine_centre_prominence_min", turbine_centre_prominence_min},
        {"turbine_side_prominence_min", turbine_side_prominence_min},
        {"turbine_amplitude_min", turbine_amplitude_min},
        {"foundation_centre_prominence_min", foundation_centre_prominence_min},
        {"vessel_offset_min", vessel_offset_min},
        {"relaxed_factor", relaxed_factor},
        {"smoothing_window", smoothing_window},
        {"convergence_max_iters", convergence_max_iters},
        {"features",
         {{"sigma", features.sigma},
          {"min_distance", features.min_distance},
          {"min_prominence", features.min_prominence}}}};
  }

  static ClassifierConfig from_json(const nlohmann::json& j) {
    ClassifierConfig c;
    auto get = [&j](const char* key, auto& field) {
      if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
    };
    get("water_mean_max", c.water_mean_max);
    get("water_std_max", c.water_std_max);
    get("weak_centre_prominence", c.weak_centre_prominence);
    get("broad_peak_width_min", c.broad_peak_width_min);
    get("high_range_min", c.high_range_min);
    get("mooring_mean_min", c.mooring_mean_min);
    get("mooring_std_max", c.mooring_std_max);
    get("turbine_centre_prominence_min", c.turbine_centre_prominence_min);
    get("turbine_side_prominence_min", c.turbine_side_prominence_min);
    get("turbine_amplitude_min", c.turbine_amplitude_min);
    get("foundation_centre_prominence_min", c.foundation_centre_prominence_min);
    get("vessel_offset_min", c.vessel_offset_min);
    get("relaxed_factor", c.relaxed_factor);
    get("smoothing_window", c.smoothing_window);
    get("convergence_max_iters", c.convergence_max_iters);
    if (j.contains("features")) {
      const auto& f = j.at("features");
      if (f.contains("sigma")) c.features.sigma = f.at("sigma").get<double>();
      if (f.contains("min_distance")) c.features.min_distance = f.at("min_distance").get<int>();
      if (f.contains("min_prominence"))
        c.features.min_prominence = f.at("min_prominence").get<double>();
    }
    c.validate();
    return c;
  }
};

inline ClassifierConfig load_classifier_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, "cannot open config file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::InvalidArgument, "config parse error in " + path + ": " + e.what());
  }
  return ClassifierConfig::from_json(j);
}

inline void save_classifier_config(const ClassifierConfig& cfg, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(Errc::IoError, "cannot write config file: " + path);
  out << cfg.to_json().dump(2) << "\n";
  if (!out) throw Error(Errc::IoError, "write failed: " + path);
}

namespace detail {

// Loosen a lower-bound threshold (value must be >= t): scale toward zero for
// positive thresholds, away from zero for negative ones.
inline double relax_lower(double t, double rf) { return t >= 0.0 ? t * rf : t / rf; }
// Loosen an upper-bound threshold (value must be <= t): the opposite motion.
inline double relax_upper(double t, double rf) { return t >= 0.0 ? t / rf : t * rf; }

inline bool mooring_rule(const ProfileFeatures& f, double width_min, double range_min,
                         double std_max, double mean_min) {
  for (const Peak& p : f.peaks)
    if (p.width >= width_min) return true;
  if (f.range >= range_min) return true;
  return f.stddev <= std_max && f.mean >= mean_min;
}

inline bool foundation_rule(const ProfileFeatures& f, double prom_min) {
  return f.centre_peak && f.centre_peak->prominence >= prom_min;
}

// The neighbour of the centre peak on the non-layover side: previous index
// for descending passes, next index for ascending ones.
inline std::optional<Peak> off_side_peak(const ProfileFeatures& f, OrbitDirection orbit) {
  if (!f.centre_peak) return std::nullopt;
  auto it = std::find_if(f.peaks.begin(), f.peaks.end(), [&](const Peak& p) {
    return p.index == f.centre_peak->index;
  });
  if (it == f.peaks.end()) return std::nullopt;
  if (orbit == OrbitDirection::Descending)
    return it == f.peaks.begin() ? std::nullopt : std::optional<Peak>(*(it - 1));
  return (it + 1) == f.peaks.end() ? std::nullopt : std::optional<Peak>(*(it + 1));
}

}  // namespace detail

// Stage 1: first matching rule wins.
inline EventLabel classify_stage1(const ProfileFeatures& f, OrbitDirection orbit,
                                  const ClassifierConfig& cfg) {
  // 1. Water: dim flat profile, or nothing peak-like at all.
  bool all_weak = true;
  for (const Peak& p : f.peaks)
    if (p.prominence >= cfg.weak_centre_prominence) all_weak = false;
  bool weak_centre = !f.centre_peak || f.centre_peak->prominence < cfg.weak_centre_prominence;
  if ((f.mean <= cfg.water_mean_max && f.stddev <= cfg.water_std_max) || f.peaks.empty() ||
      (weak_centre && all_weak))
    return EventLabel::Water;

  // 2. Mooring / active construction: broad peaks or a bright noisy scene.
  if (detail::mooring_rule(f, cfg.broad_peak_width_min, cfg.high_range_min, cfg.mooring_std_max,
                           cfg.mooring_mean_min))
    return EventLabel::MooringConstruction;

  // 3. Deployed turbine: centre peak plus layover echo on the orbit side.
  if (f.centre_peak && f.side_peak &&
      f.centre_peak->prominence >= cfg.turbine_centre_prominence_min &&
      f.side_peak->prominence >= cfg.turbine_side_prominence_min &&
      f.centre_peak->amplitude >= cfg.turbine_amplitude_min &&
      f.side_peak->amplitude >= cfg.turbine_amplitude_min)
    return EventLabel::DeployedTurbine;

  // 4. Vessel: one strong peak well away from centre, nothing else.
  if (f.peaks.size() == 1 && !f.side_peak &&
      f.peaks[0].prominence >= cfg.foundation_centre_prominence_min) {
    double centre_pos = (static_cast<double>(f.len) - 1.0) / 2.0;
    if (std::abs(f.peaks[0].index - centre_pos) >= static_cast<double>(cfg.vessel_offset_min))
      return EventLabel::Vessel;
  }

  // 5. Unclear: the echo sits on the wrong side for this orbit.
  if (auto off = detail::off_side_peak(f, orbit); off && f.centre_peak &&
      off->prominence > f.centre_peak->prominence)
    return EventLabel::Unclear;

  // 6. Turbine foundation: prominent centre peak without the layover pair.
  if (detail::foundation_rule(f, cfg.foundation_centre_prominence_min))
    return EventLabel::TurbineFoundation;

  return EventLabel::Unclear;
}

namespace detail {

// Nearest non-transient label strictly left of i, no further than half_window
// away. Returns kLabelCount-as-none via optional.
inline std::optional<EventLabel> effective_left(const std::vector<EventLabel>& labels,
                                                std::size_t i, int half_window) {
  for (int d = 1; d <= half_window; ++d) {
    long j = static_cast<long>(i) - d;
    if (j < 0) break;
    EventLabel l = labels[static_cast<std::size_t>(j)];
    if (!is_transient(l)) return l;
  }
  return std::nullopt;
}

inline std::optional<EventLabel> effective_right(const std::vector<EventLabel>& labels,
                                                 std::size_t i, int half_window) {
  for (int d = 1; d <= half_window; ++d) {
    std::size_t j = i + static_cast<std::size_t>(d);
    if (j >= labels.size()) break;
    EventLabel l = labels[j];
    if (!is_transient(l)) return l;
  }
  return std::nullopt;
}

}  // namespace detail

// Neighbourhood smoothing. Two sub-passes, each computed against a snapshot
// of its input so results do not cascade within a pass:
//   (a) a non-water event whose effective neighbours are both Water turns
//       into Water;
//   (b) an event whose effective neighbours agree with each other but not
//       with it takes the neighbour label.
// Effective neighbours skip transient labels (Unclear, Vessel, Mooring) but
// never look further than half the window. Vessel events are never changed.
inline std::vector<EventLabel> smooth_labels(const std::vector<EventLabel>& labels,
                                             const ClassifierConfig& cfg) {
  int half = cfg.smoothing_window / 2;
  std::vector<EventLabel> a = labels;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == EventLabel::Water || labels[i] == EventLabel::Vessel) continue;
    auto l = detail::effective_left(labels, i, half);
    auto r = detail::effective_right(labels, i, half);
    if (l && r && *l == EventLabel::Water && *r == EventLabel::Water) a[i] = EventLabel::Water;
  }
  std::vector<EventLabel> b = a;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == EventLabel::Vessel) continue;
    auto l = detail::effective_left(a, i, half);
    auto r = detail::effective_right(a, i, half);
    if (l && r && *l == *r && *l != a[i]) b[i] = *l;
  }
  return b;
}

// Retest Unclear events against the Mooring and Foundation rules with
// loosened thresholds. When both fire, a present centre peak points to
// Foundation, otherwise Mooring.
inline std::vector<EventLabel> reevaluate_unclear(const std::vector<EventLabel>& labels,
                                                  const std::vector<ProfileFeatures>& features,
                                                  const ClassifierConfig& cfg) {
  if (labels.size() != features.size())
    throw Error(Errc::LengthMismatch, "reevaluate_unclear: labels vs features");
  double rf = cfg.relaxed_factor;
  std::vector<EventLabel> out = labels;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != EventLabel::Unclear) continue;
    const ProfileFeatures& f = features[i];
    bool moor = detail::mooring_rule(f, detail::relax_lower(cfg.broad_peak_width_min, rf),
                                     detail::relax_lower(cfg.high_range_min, rf),
                                     detail::relax_upper(cfg.mooring_std_max, rf),
                                     detail::relax_lower(cfg.mooring_mean_min, rf));
    bool found = detail::foundation_rule(
        f, detail::relax_lower(cfg.foundation_centre_prominence_min, rf));
    if (moor && found)
      out[i] = f.centre_peak ? EventLabel::TurbineFoundation : EventLabel::MooringConstruction;
    else if (found)
      out[i] = EventLabel::TurbineFoundation;
    else if (moor)
      out[i] = EventLabel::MooringConstruction;
  }
  return out;
}

// A lone Water event between turbine-related context is a dropout; it takes
// the label of the right (later) side, since deployment moves forward.
inline std::vector<EventLabel> fix_isolated_water(const std::vector<EventLabel>& labels,
                                                  int window) {
  if (window < 3 || window % 2 == 0)
    throw Error(Errc::InvalidArgument, "fix_isolated_water: window must be odd and >= 3");
  int half = window / 2;
  std::vector<EventLabel> out = labels;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != EventLabel::Water) continue;
    bool isolated = (i == 0 || labels[i - 1] != EventLabel::Water) &&
                    (i + 1 >= labels.size() || labels[i + 1] != EventLabel::Water);
    if (!isolated) continue;
    auto l = detail::effective_left(labels, i, half);
    auto r = detail::effective_right(labels, i, half);
    if (l && r && is_turbine_related(*l) && is_turbine_related(*r)) out[i] = *r;
  }
  return out;
}

struct Segment {
  EventLabel label = EventLabel::Water;
  int start_index = 0;  // first member event, inclusive
  int end_index = 0;    // last member event, inclusive
  int length = 0;       // member events only; transparent events in the span excluded
};

// Runs of equal labels. With skip_transparent, Mooring and Vessel events are
// invisible to run construction (they stay in place and belong to no run).
inline std::vector<Segment> build_segments(const std::vector<EventLabel>& labels,
                                           bool skip_transparent) {
  auto transparent = [&](EventLabel l) {
    return skip_transparent &&
           (l == EventLabel::MooringConstruction || l == EventLabel::Vessel);
  };
  std::vector<Segment> segs;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (transparent(labels[i])) continue;
    if (!segs.empty() && segs.back().label == labels[i]) {
      segs.back().end_index = static_cast<int>(i);
      segs.back().length += 1;
    } else {
      segs.push_back(Segment{labels[i], static_cast<int>(i), static_cast<int>(i), 1});
    }
  }
  return segs;
}

struct RefineResult {
  std::vector<EventLabel> labels;
  bool converged = true;
  int iterations = 0;
};

// Deployment is monotone: foundations precede turbines. A Foundation segment
// directly after a DeployedTurbine segment (Mooring/Vessel transparent) is a
// conflict; the shorter of the two takes the longer one's label, equal
// lengths resolve against the later segment. One conflict is repaired per
// iteration, then segments are rebuilt, until a scan finds none.
inline RefineResult refine_segments(const std::vector<EventLabel>& labels, int max_iters = 50) {
  RefineResult res;
  res.labels = labels;
  for (int iter = 0; iter < max_iters; ++iter) {
    std::vector<Segment> segs = build_segments(res.labels, true);
    bool changed = false;
    for (std::size_t k = 0; k + 1 < segs.size(); ++k) {
      const Segment& a = segs[k];
      const Segment& b = segs[k + 1];
      if (a.label != EventLabel::DeployedTurbine || b.label != EventLabel::TurbineFoundation)
        continue;
      const Segment& loser = (b.length <= a.length) ? b : a;
      EventLabel winner_label = (b.length <= a.length) ? a.label : b.label;
      for (int i = loser.start_index; i <= loser.end_index; ++i) {
        EventLabel& l = res.labels[static_cast<std::size_t>(i)];
        if (l == loser.label) l = winner_label;
      }
      changed = true;
      break;
    }
    res.iterations = iter + 1;
    if (!changed) {
      res.converged = true;
      return res;
    }
  }
  res.converged = false;
  return res;
}

// Whole-series platform detection. Needs event dates for the persistence
// windows: 365 days for a series that never shows a turbine (rule a), 180
// days past the last turbine otherwise (rule b).
inline std::vector<EventLabel> refine_platform(const std::vector<Date>& dates,
                                               const std::vector<EventLabel>& labels) {
  if (dates.size() != labels.size())
    throw Error(Errc::LengthMismatch, "refine_platform: dates vs labels");
  std::vector<EventLabel> out = labels;
  if (labels.empty()) return out;

  bool has_turbine = false;
  for (EventLabel l : labels)
    if (l == EventLabel::DeployedTurbine) has_turbine = true;

  if (!has_turbine) {
    // Rule a: foundation-dominated series whose foundation state holds to the
    // end for at least a year.
    std::size_t counts[kLabelCount] = {};
    for (EventLabel l : labels) counts[static_cast<std::size_t>(l)]++;
    std::size_t f_count = counts[static_cast<std::size_t>(EventLabel::TurbineFoundation)];
    if (f_count == 0) return out;
    bool plurality = true;
    for (EventLabel l : kAllLabels) {
      if (l == EventLabel::Water || l == EventLabel::TurbineFoundation) continue;
      if (counts[static_cast<std::size_t>(l)] >= f_count) plurality = false;
    }
    if (!plurality) return out;

    // Trailing stretch: maximal suffix with no Water event and at least one
    // Foundation event.
    std::size_t start = labels.size();
    for (std::size_t i = labels.size(); i-- > 0;) {
      if (labels[i] == EventLabel::Water) break;
      start = i;
    }
    std::size_t first_f = labels.size();
    for (std::size_t i = start; i < labels.size(); ++i) {
      if (labels[i] == EventLabel::TurbineFoundation) {
        first_f = i;
        break;
      }
    }
    if (first_f == labels.size()) return out;
    if (dates.back().days - dates[first_f].days >= 365) {
      for (std::size_t i = first_f; i < labels.size(); ++i)
        if (out[i] == EventLabel::TurbineFoundation) out[i] = EventLabel::Platform;
    }
    return out;
  }

  // Rule b: foundations reappearing half a year after the last turbine.
  Date last_t{};
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == EventLabel::DeployedTurbine) last_t = dates[i];
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (out[i] == EventLabel::TurbineFoundation && dates[i].days - last_t.days >= 180)
      out[i] = EventLabel::Platform;
  return out;
}

struct ClassifyDiagnostics {
  bool converged = true;
  int refine_iterations = 0;
};

// Full pipeline over one series. The smoothing pass runs again after the
// Unclear retest so recovered labels propagate.
inline LabeledTimeSeries classify_series(const TimeSeries& series, const ClassifierConfig& cfg,
                                         ClassifyDiagnostics* diag = nullptr,
                                         FeatureScratch* scratch = nullptr) {
  cfg.validate();
  std::vector<ProfileFeatures> features;
  features.reserve(series.events.size());
  std::vector<EventLabel> labels;
  labels.reserve(series.events.size());
  std::vector<Date> dates;
  dates.reserve(series.events.size());
  for (const BackscatterProfile& p : series.events) {
    features.push_back(compute_features(p, cfg.features, scratch));
    labels.push_back(classify_stage1(features.back(), p.orbit_direction, cfg));
    dates.push_back(p.img_date);
  }

  labels = smooth_labels(labels, cfg);
  labels = reevaluate_unclear(labels, features, cfg);
  labels = smooth_labels(labels, cfg);
  labels = fix_isolated_water(labels, cfg.smoothing_window);
  RefineResult ref = refine_segments(labels, cfg.convergence_max_iters);
  labels = refine_platform(dates, ref.labels);
  if (diag) {
    diag->converged = ref.converged;
    diag->refine_iterations = ref.iterations;
  }

  LabeledTimeSeries out;
  out.box_id = series.box_id;
  out.stage = LabelStage::Final;
  out.events.reserve(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i)
    out.events.push_back(LabeledEvent{series.events[i].img_date,
                                      series.events[i].orbit_direction, labels[i]});
  return out;
}

}  // namespace owt
