// Evaluation: confusion-matrix scores over aligned event labels, Levenshtein
// edit similarity over label sequences (raw and run-length collapsed) with a
// threshold curve and its AUC, and spatial matching of detections against
// surveyed locations.
#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "owt/batchplan.hpp"
#include "owt/core.hpp"

namespace owt {

// Rows are ground truth, columns are predictions, both in EventLabel order:
// Water, TurbineFoundation, DeployedTurbine, Platform, MooringConstruction,
// Vessel, Unclear.
struct ConfusionMatrix {
  std::array<std::array<std::int64_t, kLabelCount>, kLabelCount> counts{};

  std::int64_t& at(EventLabel truth, EventLabel pred) {
    return counts[static_cast<std::size_t>(truth)][static_cast<std::size_t>(pred)];
  }
  std::int64_t at(EventLabel truth, EventLabel pred) const {
    return counts[static_cast<std::size_t>(truth)][static_cast<std::size_t>(pred)];
  }
  std::int64_t total() const {
    std::int64_t t = 0;
    for (const auto& row : counts)
      for (std::int64_t v : row) t += v;
    return t;
  }
  ConfusionMatrix& operator+=(const ConfusionMatrix& other) {
    for (std::size_t i = 0; i < kLabelCount; ++i)
      for (std::size_t j = 0; j < kLabelCount; ++j) counts[i][j] += other.counts[i][j];
    return *this;
  }
};

inline ConfusionMatrix confusion(const std::vector<EventLabel>& truth,
                                 const std::vector<EventLabel>& pred) {
  if (truth.size() != pred.size())
    throw Error(Errc::LengthMismatch, "confusion: truth and prediction lengths differ");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < truth.size(); ++i) cm.at(truth[i], pred[i]) += 1;
  return cm;
}

struct ClassScore {
  std::int64_t tp = 0, fp = 0, fn = 0;
  // absent when the denominator is zero (class never predicted / never true)
  std::optional<double> precision, recall, f1;
};

struct MacroScore {
  double precision = 0.0, recall = 0.0, f1 = 0.0;
  // classes left out of each mean because the score was undefined
  int excluded_precision = 0, excluded_recall = 0, excluded_f1 = 0;
};

struct MicroScore {
  double precision = 0.0, recall = 0.0, f1 = 0.0;
};

struct EvalReport {
  std::array<ClassScore, kLabelCount> per_class;
  MacroScore macro;                  // over all seven classes
  MacroScore macro_wft;              // Water, TurbineFoundation, DeployedTurbine
  MacroScore macro_pmv;              // Platform, MooringConstruction, Vessel
  MicroScore micro;                  // pooled counts
  std::int64_t total_events = 0;
};

namespace detail {

inline MacroScore macro_over(const std::array<ClassScore, kLabelCount>& scores,
                             const std::vector<EventLabel>& classes) {
  MacroScore m;
  double ps = 0, rs = 0, fs = 0;
  int pn = 0, rn = 0, fn = 0;
  for (EventLabel c : classes) {
    const ClassScore& s = scores[static_cast<std::size_t>(c)];
    if (s.precision) { ps += *s.precision; ++pn; } else { ++m.excluded_precision; }
    if (s.recall) { rs += *s.recall; ++rn; } else { ++m.excluded_recall; }
    if (s.f1) { fs += *s.f1; ++fn; } else { ++m.excluded_f1; }
  }
  m.precision = pn ? ps / pn : 0.0;
  m.recall = rn ? rs / rn : 0.0;
  m.f1 = fn ? fs / fn : 0.0;
  return m;
}

}  // namespace detail

// Per-class scores from the matrix. Precision is undefined when the class is
// never predicted, recall when it is never true; undefined scores are left
// absent and excluded from macro means (the exclusion counts are reported).
inline EvalReport prf(const ConfusionMatrix& cm) {
  EvalReport r;
  std::int64_t pool_tp = 0, pool_fp = 0, pool_fn = 0;
  for (std::size_t c = 0; c < kLabelCount; ++c) {
    ClassScore& s = r.per_class[c];
    s.tp = cm.counts[c][c];
    for (std::size_t t = 0; t < kLabelCount; ++t)
      if (t != c) s.fp += cm.counts[t][c];
    for (std::size_t p = 0; p < kLabelCount; ++p)
      if (p != c) s.fn += cm.counts[c][p];
    if (s.tp + s.fp > 0) s.precision = static_cast<double>(s.tp) / static_cast<double>(s.tp + s.fp);
    if (s.tp + s.fn > 0) s.recall = static_cast<double>(s.tp) / static_cast<double>(s.tp + s.fn);
    if (s.precision && s.recall)
      s.f1 = (*s.precision + *s.recall > 0.0)
                 ? 2.0 * *s.precision * *s.recall / (*s.precision + *s.recall)
                 : 0.0;
    pool_tp += s.tp;
    pool_fp += s.fp;
    pool_fn += s.fn;
  }
  std::vector<EventLabel> all(kAllLabels.begin(), kAllLabels.end());
  r.macro = detail::macro_over(r.per_class, all);
  r.macro_wft = detail::macro_over(
      r.per_class,
      {EventLabel::Water, EventLabel::TurbineFoundation, EventLabel::DeployedTurbine});
  r.macro_pmv = detail::macro_over(
      r.per_class, {EventLabel::Platform, EventLabel::MooringConstruction, EventLabel::Vessel});
  r.micro.precision = (pool_tp + pool_fp) ? static_cast<double>(pool_tp) / (pool_tp + pool_fp) : 0.0;
  r.micro.recall = (pool_tp + pool_fn) ? static_cast<double>(pool_tp) / (pool_tp + pool_fn) : 0.0;
  r.micro.f1 = (r.micro.precision + r.micro.recall > 0.0)
                   ? 2.0 * r.micro.precision * r.micro.recall /
                         (r.micro.precision + r.micro.recall)
                   : 0.0;
  r.total_events = cm.total();
  return r;
}

// Unit-cost Levenshtein similarity: 1 - d/max(|a|,|b|); two empty sequences
// score 1.
inline double edit_similarity(const std::vector<EventLabel>& a, const std::vector<EventLabel>& b) {
  if (a.empty() && b.empty()) return 1.0;
  std::size_t n = a.size(), m = b.size();
  std::vector<std::size_t> prev(m + 1), cur(m + 1);
  for (std::size_t j = 0; j <= m; ++j) prev[j] = j;
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= m; ++j) {
      std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  double d = static_cast<double>(prev[m]);
  return 1.0 - d / static_cast<double>(std::max(n, m));
}

// Run-length collapse: every maximal run of one label becomes a single token.
inline std::vector<EventLabel> collapse(const std::vector<EventLabel>& seq) {
  std::vector<EventLabel> out;
  for (EventLabel l : seq)
    if (out.empty() || out.back() != l) out.push_back(l);
  return out;
}

inline constexpr int kThresholdGridSize = 21;  // q = 0.00, 0.05, ..., 1.00

enum class AucRule { Trapezoid, LeftRiemann };

struct SeriesScores {
  std::string id;
  double full = 0.0;
  double collapsed = 0.0;
};

struct EditSimReport {
  std::vector<SeriesScores> per_series;
  std::array<double, kThresholdGridSize> thresholds{};
  std::array<double, kThresholdGridSize> fraction_full{};
  std::array<double, kThresholdGridSize> fraction_collapsed{};
  double auc_full = 0.0;
  double auc_collapsed = 0.0;
  AucRule auc_rule = AucRule::Trapezoid;
};

struct SequencePair {
  std::string id;
  std::vector<EventLabel> truth;
  std::vector<EventLabel> pred;
};

namespace detail {

inline double integrate_curve(const std::array<double, kThresholdGridSize>& f, AucRule rule) {
  double auc = 0.0;
  for (int i = 0; i + 1 < kThresholdGridSize; ++i) {
    double w = 0.05;
    auc += rule == AucRule::Trapezoid ? 0.5 * (f[i] + f[i + 1]) * w : f[i] * w;
  }
  return auc;
}

}  // namespace detail

// Scores every pair in both variants (raw alignment and collapsed), then the
// fraction of series at or above each threshold and the area under that
// curve. Raw sequences must have equal lengths per pair; collapsed ones may
// differ, that is the point of the variant.
inline EditSimReport editsim_report(const std::vector<SequencePair>& pairs,
                                    AucRule rule = AucRule::Trapezoid) {
  if (pairs.empty()) throw Error(Errc::EmptyInput, "editsim_report: no sequence pairs");
  EditSimReport r;
  r.auc_rule = rule;
  r.per_series.reserve(pairs.size());
  for (const SequencePair& p : pairs) {
    if (p.truth.size() != p.pred.size())
      throw Error(Errc::LengthMismatch,
                  "editsim_report: unaligned pair" + (p.id.empty() ? "" : " for " + p.id));
    SeriesScores s;
    s.id = p.id;
    s.full = edit_similarity(p.truth, p.pred);
    s.collapsed = edit_similarity(collapse(p.truth), collapse(p.pred));
    r.per_series.push_back(std::move(s));
  }
  double n = static_cast<double>(r.per_series.size());
  for (int i = 0; i < kThresholdGridSize; ++i) {
    double q = 0.05 * i;
    r.thresholds[i] = q;
    std::size_t nf = 0, nc = 0;
    for (const SeriesScores& s : r.per_series) {
      if (s.full >= q) ++nf;
      if (s.collapsed >= q) ++nc;
    }
    r.fraction_full[i] = nf / n;
    r.fraction_collapsed[i] = nc / n;
  }
  r.auc_full = detail::integrate_curve(r.fraction_full, rule);
  r.auc_collapsed = detail::integrate_curve(r.fraction_collapsed, rule);
  return r;
}

struct MatchedPair {
  std::string det_id;
  std::string truth_id;
  double distance_m = 0.0;
};

struct MatchResult {
  std::vector<MatchedPair> matches;   // ascending (distance, det id, truth id)
  std::vector<std::string> fp_dets;   // sorted ids
  std::vector<std::string> fn_truths; // sorted ids
};

// Greedy nearest-first matching within the radius. Candidates are ordered by
// (distance, detection id, truth id) so the result does not depend on input
// order; each detection and each truth point is used at most once.
inline MatchResult match_detections(const std::vector<DetectionPoint>& dets,
                                    const std::vector<DetectionPoint>& truth,
                                    double radius_m = 100.0) {
  for (const auto& d : dets)
    if (!d.valid()) throw Error(Errc::InvalidArgument, "match_detections: bad detection " + d.id);
  for (const auto& t : truth)
    if (!t.valid()) throw Error(Errc::InvalidArgument, "match_detections: bad truth point " + t.id);

  struct Cand {
    double dist;
    std::size_t det, truth;
  };
  std::vector<Cand> cands;
  for (std::size_t i = 0; i < dets.size(); ++i) {
    for (std::size_t j = 0; j < truth.size(); ++j) {
      double d = haversine_km(dets[i], truth[j]) * 1000.0;
      if (d <= radius_m) cands.push_back(Cand{d, i, j});
    }
  }
  std::sort(cands.begin(), cands.end(), [&](const Cand& a, const Cand& b) {
    if (a.dist != b.dist) return a.dist < b.dist;
    if (dets[a.det].id != dets[b.det].id) return dets[a.det].id < dets[b.det].id;
    return truth[a.truth].id < truth[b.truth].id;
  });

  std::vector<bool> det_used(dets.size(), false), truth_used(truth.size(), false);
  MatchResult r;
  for (const Cand& c : cands) {
    if (det_used[c.det] || truth_used[c.truth]) continue;
    det_used[c.det] = truth_used[c.truth] = true;
    r.matches.push_back(MatchedPair{dets[c.det].id, truth[c.truth].id, c.dist});
  }
  for (std::size_t i = 0; i < dets.size(); ++i)
    if (!det_used[i]) r.fp_dets.push_back(dets[i].id);
  for (std::size_t j = 0; j < truth.size(); ++j)
    if (!truth_used[j]) r.fn_truths.push_back(truth[j].id);
  std::sort(r.fp_dets.begin(), r.fp_dets.end());
  std::sort(r.fn_truths.begin(), r.fn_truths.end());
  return r;
}

struct SiteScore {
  std::string site;
  std::int64_t tp = 0, fp = 0, fn = 0;
  double precision = 0.0, recall = 0.0, f1 = 0.0;  // 0/0 counts as 0 here
};

struct SiteReport {
  std::vector<SiteScore> sites;
  MicroScore macro;  // mean of per-site scores
  MicroScore micro;  // pooled counts
};

namespace detail {

inline void score_counts(std::int64_t tp, std::int64_t fp, std::int64_t fn, double& p, double& r,
                         double& f1) {
  p = (tp + fp) ? static_cast<double>(tp) / (tp + fp) : 0.0;
  r = (tp + fn) ? static_cast<double>(tp) / (tp + fn) : 0.0;
  f1 = (p + r > 0.0) ? 2.0 * p * r / (p + r) : 0.0;
}

}  // namespace detail

// Detection scores per site plus macro (mean of site scores, empty ratios
// scored as zero) and micro (counts pooled first). Rejects an input with no
// detections and no truth points anywhere.
inline SiteReport site_report(const std::vector<std::pair<std::string, MatchResult>>& per_site) {
  if (per_site.empty()) throw Error(Errc::EmptyInput, "site_report: no sites");
  SiteReport rep;
  std::int64_t pool_tp = 0, pool_fp = 0, pool_fn = 0;
  double sp = 0, sr = 0, sf = 0;
  for (const auto& [site, mr] : per_site) {
    SiteScore s;
    s.site = site;
    s.tp = static_cast<std::int64_t>(mr.matches.size());
    s.fp = static_cast<std::int64_t>(mr.fp_dets.size());
    s.fn = static_cast<std::int64_t>(mr.fn_truths.size());
    detail::score_counts(s.tp, s.fp, s.fn, s.precision, s.recall, s.f1);
    pool_tp += s.tp;
    pool_fp += s.fp;
    pool_fn += s.fn;
    sp += s.precision;
    sr += s.recall;
    sf += s.f1;
    rep.sites.push_back(std::move(s));
  }
  if (pool_tp + pool_fp + pool_fn == 0)
    throw Error(Errc::EmptyInput, "site_report: all sites empty");
  double n = static_cast<double>(per_site.size());
  rep.macro.precision = sp / n;
  rep.macro.recall = sr / n;
  rep.macro.f1 = sf / n;
  detail::score_counts(pool_tp, pool_fp, pool_fn, rep.micro.precision, rep.micro.recall,
                       rep.micro.f1);
  return rep;
}

// ---- JSON views (stable shapes for CLI reports) ----

inline nlohmann::json to_json(const ConfusionMatrix& cm) {
  nlohmann::json rows = nlohmann::json::object();
  for (EventLabel t : kAllLabels) {
    nlohmann::json row = nlohmann::json::object();
    for (EventLabel p : kAllLabels) row[label_name(p)] = cm.at(t, p);
    rows[label_name(t)] = row;
  }
  return rows;
}

inline nlohmann::json to_json(const MacroScore& m) {
  return {{"precision", m.precision},
          {"recall", m.recall},
          {"f1", m.f1},
          {"excluded_precision", m.excluded_precision},
          {"excluded_recall", m.excluded_recall},
          {"excluded_f1", m.excluded_f1}};
}

inline nlohmann::json to_json(const MicroScore& m) {
  return {{"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}};
}

inline nlohmann::json to_json(const EvalReport& r) {
  nlohmann::json per_class = nlohmann::json::object();
  for (EventLabel c : kAllLabels) {
    const ClassScore& s = r.per_class[static_cast<std::size_t>(c)];
    nlohmann::json e{{"tp", s.tp}, {"fp", s.fp}, {"fn", s.fn}};
    e["precision"] = s.precision ? nlohmann::json(*s.precision) : nlohmann::json();
    e["recall"] = s.recall ? nlohmann::json(*s.recall) : nlohmann::json();
    e["f1"] = s.f1 ? nlohmann::json(*s.f1) : nlohmann::json();
    per_class[label_name(c)] = e;
  }
  return {{"per_class", per_class},
          {"macro", to_json(r.macro)},
          {"macro_wft", to_json(r.macro_wft)},
          {"macro_pmv", to_json(r.macro_pmv)},
          {"micro", to_json(r.micro)},
          {"total_events", r.total_events}};
}

inline nlohmann::json to_json(const EditSimReport& r) {
  nlohmann::json series = nlohmann::json::array();
  for (const SeriesScores& s : r.per_series)
    series.push_back({{"id", s.id}, {"full", s.full}, {"collapsed", s.collapsed}});
  return {{"per_series", series},
          {"thresholds", r.thresholds},
          {"fraction_full", r.fraction_full},
          {"fraction_collapsed", r.fraction_collapsed},
          {"auc_full", r.auc_full},
          {"auc_collapsed", r.auc_collapsed},
          {"auc_rule", r.auc_rule == AucRule::Trapezoid ? "trapezoid" : "left_riemann"}};
}

inline nlohmann::json to_json(const MatchResult& mr) {
  nlohmann::json matches = nlohmann::json::array();
  for (const MatchedPair& m : mr.matches)
    matches.push_back(
        {{"det_id", m.det_id}, {"truth_id", m.truth_id}, {"distance_m", m.distance_m}});
  return {{"matches", matches}, {"fp_dets", mr.fp_dets}, {"fn_truths", mr.fn_truths}};
}

inline nlohmann::json to_json(const SiteReport& r) {
  nlohmann::json sites = nlohmann::json::array();
  for (const SiteScore& s : r.sites)
    sites.push_back({{"site", s.site},
                     {"tp", s.tp},
                     {"fp", s.fp},
                     {"fn", s.fn},
                     {"precision", s.precision},
                     {"recall", s.recall},
                     {"f1", s.f1}});
  return {{"sites", sites}, {"macro", to_json(r.macro)}, {"micro", to_json(r.micro)}};
}

}  // namespace owt
