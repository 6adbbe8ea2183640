#include <catch_amalgamated.hpp>

#include <algorithm>
#include <functional>
#include <string>
#include <vector>

#include "owt/metrics.hpp"
#include "owt/rng.hpp"

using namespace owt;

namespace {

std::vector<EventLabel> seq(const std::string& code) {
  std::vector<EventLabel> out;
  for (char c : code) {
    switch (c) {
      case 'W': out.push_back(EventLabel::Water); break;
      case 'F': out.push_back(EventLabel::TurbineFoundation); break;
      case 'T': out.push_back(EventLabel::DeployedTurbine); break;
      case 'P': out.push_back(EventLabel::Platform); break;
      case 'M': out.push_back(EventLabel::MooringConstruction); break;
      case 'V': out.push_back(EventLabel::Vessel); break;
      case 'U': out.push_back(EventLabel::Unclear); break;
      default: FAIL("bad label code");
    }
  }
  return out;
}

// Memoized recursive Levenshtein, the textbook definition, as the oracle for
// the iterative two-row version in the library.
int lev_oracle(const std::vector<EventLabel>& a, const std::vector<EventLabel>& b) {
  std::vector<std::vector<int>> memo(a.size() + 1, std::vector<int>(b.size() + 1, -1));
  std::function<int(std::size_t, std::size_t)> go = [&](std::size_t i, std::size_t j) -> int {
    if (i == 0) return static_cast<int>(j);
    if (j == 0) return static_cast<int>(i);
    int& m = memo[i][j];
    if (m >= 0) return m;
    int sub = go(i - 1, j - 1) + (a[i - 1] == b[j - 1] ? 0 : 1);
    m = std::min({go(i - 1, j) + 1, go(i, j - 1) + 1, sub});
    return m;
  };
  return go(a.size(), b.size());
}

double sim_oracle(const std::vector<EventLabel>& a, const std::vector<EventLabel>& b) {
  if (a.empty() && b.empty()) return 1.0;
  return 1.0 - static_cast<double>(lev_oracle(a, b)) /
                   static_cast<double>(std::max(a.size(), b.size()));
}

std::vector<EventLabel> random_seq(Rng& rng, std::size_t max_len) {
  std::vector<EventLabel> out(rng.bounded(max_len + 1));
  for (auto& l : out) l = kAllLabels[rng.bounded(kLabelCount)];
  return out;
}

}  // namespace

TEST_CASE("confusion matrix counts truth rows and prediction columns", "[metrics]") {
  auto cm = confusion(seq("WWFT"), seq("WFFT"));
  CHECK(cm.at(EventLabel::Water, EventLabel::Water) == 1);
  CHECK(cm.at(EventLabel::Water, EventLabel::TurbineFoundation) == 1);
  CHECK(cm.at(EventLabel::TurbineFoundation, EventLabel::TurbineFoundation) == 1);
  CHECK(cm.at(EventLabel::DeployedTurbine, EventLabel::DeployedTurbine) == 1);
  CHECK(cm.total() == 4);

  CHECK_THROWS_AS(confusion(seq("W"), seq("WW")), Error);

  ConfusionMatrix sum = cm;
  sum += cm;
  CHECK(sum.total() == 8);
  CHECK(sum.at(EventLabel::Water, EventLabel::TurbineFoundation) == 2);
}

TEST_CASE("per-class scores: the 9-1-1 example", "[metrics]") {
  ConfusionMatrix cm;
  cm.at(EventLabel::Water, EventLabel::Water) = 9;
  cm.at(EventLabel::Water, EventLabel::TurbineFoundation) = 1;            // FN for W
  cm.at(EventLabel::TurbineFoundation, EventLabel::Water) = 1;            // FP for W
  auto r = prf(cm);
  const auto& w = r.per_class[static_cast<std::size_t>(EventLabel::Water)];
  CHECK(w.tp == 9);
  CHECK(w.fp == 1);
  CHECK(w.fn == 1);
  REQUIRE(w.precision.has_value());
  REQUIRE(w.recall.has_value());
  REQUIRE(w.f1.has_value());
  CHECK(*w.precision == Catch::Approx(0.9));
  CHECK(*w.recall == Catch::Approx(0.9));
  CHECK(*w.f1 == Catch::Approx(0.9));
  CHECK(r.total_events == 11);
}

TEST_CASE("undefined scores stay absent and are excluded from macros", "[metrics]") {
  // Only water and foundation appear at all.
  ConfusionMatrix cm;
  cm.at(EventLabel::Water, EventLabel::Water) = 5;
  cm.at(EventLabel::TurbineFoundation, EventLabel::Water) = 2;
  auto r = prf(cm);

  const auto& f = r.per_class[static_cast<std::size_t>(EventLabel::TurbineFoundation)];
  CHECK_FALSE(f.precision.has_value());  // never predicted
  REQUIRE(f.recall.has_value());         // but it was true twice
  CHECK(*f.recall == Catch::Approx(0.0));
  CHECK_FALSE(f.f1.has_value());

  const auto& v = r.per_class[static_cast<std::size_t>(EventLabel::Vessel)];
  CHECK_FALSE(v.precision.has_value());
  CHECK_FALSE(v.recall.has_value());
  CHECK_FALSE(v.f1.has_value());

  // macro over P, M, V has nothing defined at all
  CHECK(r.macro_pmv.f1 == 0.0);
  CHECK(r.macro_pmv.excluded_f1 == 3);
  CHECK(r.macro_pmv.excluded_precision == 3);

  // seven-class macro excludes the five silent classes plus foundation's
  // undefined precision and f1
  CHECK(r.macro.excluded_precision == 6);
  CHECK(r.macro.excluded_recall == 5);
  CHECK(r.macro.excluded_f1 == 6);
}

TEST_CASE("micro scores pool counts and equal accuracy here", "[metrics]") {
  auto cm = confusion(seq("WWWWFFFTTT"), seq("WWWFFFTTTW"));
  auto r = prf(cm);
  double accuracy = 0.0;
  for (EventLabel l : kAllLabels)
    accuracy += static_cast<double>(cm.at(l, l));
  accuracy /= static_cast<double>(cm.total());
  CHECK(r.micro.precision == Catch::Approx(accuracy));
  CHECK(r.micro.recall == Catch::Approx(accuracy));
  CHECK(r.micro.f1 == Catch::Approx(accuracy));
}

TEST_CASE("edit similarity hand examples", "[metrics]") {
  CHECK(edit_similarity(seq("WFT"), seq("WFT")) == 1.0);
  CHECK(edit_similarity(seq("WWF"), seq("WWT")) == Catch::Approx(1.0 - 1.0 / 3.0));
  CHECK(edit_similarity(seq("W"), seq("WFT")) == Catch::Approx(1.0 - 2.0 / 3.0));
  CHECK(edit_similarity({}, {}) == 1.0);
  CHECK(edit_similarity({}, seq("WW")) == 0.0);
  CHECK(edit_similarity(seq("WFT"), seq("TFW")) == Catch::Approx(1.0 - 2.0 / 3.0));
}

TEST_CASE("edit similarity matches the memoized oracle", "[metrics]") {
  Rng rng(808);
  for (int trial = 0; trial < 500; ++trial) {
    auto a = random_seq(rng, 30);
    auto b = random_seq(rng, 30);
    CHECK(edit_similarity(a, b) == Catch::Approx(sim_oracle(a, b)).margin(1e-12));
  }
}

TEST_CASE("edit similarity is symmetric and bounded", "[metrics]") {
  Rng rng(809);
  for (int trial = 0; trial < 200; ++trial) {
    auto a = random_seq(rng, 25);
    auto b = random_seq(rng, 25);
    double s = edit_similarity(a, b);
    CHECK(s >= 0.0);
    CHECK(s <= 1.0);
    CHECK(edit_similarity(b, a) == Catch::Approx(s).margin(1e-12));
    CHECK(edit_similarity(a, a) == 1.0);
  }
}

TEST_CASE("run-length collapse", "[metrics]") {
  CHECK(collapse(seq("WWWFFFFT")) == seq("WFT"));
  CHECK(collapse(seq("WFWF")) == seq("WFWF"));
  CHECK(collapse({}).empty());
  // idempotent
  Rng rng(810);
  for (int trial = 0; trial < 100; ++trial) {
    auto a = random_seq(rng, 40);
    CHECK(collapse(collapse(a)) == collapse(a));
  }
}

TEST_CASE("threshold curve and AUC: the half-score example", "[metrics]") {
  // One pair scoring 0.5 in both variants: truth WF vs pred WW.
  std::vector<SequencePair> pairs = {{"s", seq("WF"), seq("WW")}};
  auto rep = editsim_report(pairs);
  REQUIRE(rep.per_series.size() == 1);
  CHECK(rep.per_series[0].full == Catch::Approx(0.5));
  CHECK(rep.per_series[0].collapsed == Catch::Approx(0.5));

  // fraction is 1 through q = 0.5 and 0 beyond
  CHECK(rep.thresholds[10] == Catch::Approx(0.5));
  CHECK(rep.fraction_full[10] == 1.0);
  CHECK(rep.fraction_full[11] == 0.0);
  CHECK(rep.fraction_full[0] == 1.0);
  CHECK(rep.fraction_full[20] == 0.0);

  // trapezoid: ten full steps (0.5), one half step (0.025)
  CHECK(rep.auc_full == Catch::Approx(0.525).margin(1e-12));
  CHECK(rep.auc_collapsed == Catch::Approx(0.525).margin(1e-12));

  auto left = editsim_report(pairs, AucRule::LeftRiemann);
  CHECK(left.auc_full == Catch::Approx(0.55).margin(1e-12));
}

TEST_CASE("sequence report rejects bad input", "[metrics]") {
  CHECK_THROWS_AS(editsim_report({}), Error);
  std::vector<SequencePair> unaligned = {{"s", seq("WF"), seq("W")}};
  CHECK_THROWS_AS(editsim_report(unaligned), Error);

  // collapsed lengths may differ: that comes from collapsing, not alignment
  std::vector<SequencePair> ok = {{"s", seq("WWFF"), seq("WFFF")}};
  auto rep = editsim_report(ok);
  CHECK(rep.per_series[0].collapsed == Catch::Approx(1.0));  // both collapse to WF
}

TEST_CASE("identical corpora score a rectangular curve", "[metrics]") {
  std::vector<SequencePair> pairs;
  for (int i = 0; i < 5; ++i)
    pairs.push_back({"s" + std::to_string(i), seq("WWFFTT"), seq("WWFFTT")});
  auto rep = editsim_report(pairs);
  for (int i = 0; i < kThresholdGridSize; ++i) CHECK(rep.fraction_full[i] == 1.0);
  CHECK(rep.auc_full == Catch::Approx(1.0));
}

TEST_CASE("detection matching: basics and the radius", "[metrics]") {
  // ~55.6 m per 0.0005 deg of latitude
  std::vector<DetectionPoint> dets = {{"d1", 4.0, 52.0005}, {"d2", 4.0, 52.0025}};
  std::vector<DetectionPoint> truth = {{"t1", 4.0, 52.0}};
  auto r = match_detections(dets, truth, 100.0);
  REQUIRE(r.matches.size() == 1);
  CHECK(r.matches[0].det_id == "d1");
  CHECK(r.matches[0].truth_id == "t1");
  CHECK(r.matches[0].distance_m == Catch::Approx(55.6).margin(0.2));
  CHECK(r.fp_dets == std::vector<std::string>{"d2"});  // 278 m away, over the radius
  CHECK(r.fn_truths.empty());

  for (const auto& m : r.matches) CHECK(m.distance_m <= 100.0);
}

TEST_CASE("detection matching: equidistant ties break by id", "[metrics]") {
  // two detections symmetric about one truth point
  std::vector<DetectionPoint> dets = {{"b", 4.0, 51.9996}, {"a", 4.0, 52.0004}};
  std::vector<DetectionPoint> truth = {{"t", 4.0, 52.0}};
  auto r = match_detections(dets, truth, 100.0);
  REQUIRE(r.matches.size() == 1);
  CHECK(r.matches[0].det_id == "a");
  CHECK(r.fp_dets == std::vector<std::string>{"b"});

  // one detection symmetric between two truth points
  std::vector<DetectionPoint> det1 = {{"d", 4.0, 52.0}};
  std::vector<DetectionPoint> truth2 = {{"t2", 4.0, 52.0004}, {"t1", 4.0, 51.9996}};
  auto r2 = match_detections(det1, truth2, 100.0);
  REQUIRE(r2.matches.size() == 1);
  CHECK(r2.matches[0].truth_id == "t1");
  CHECK(r2.fn_truths == std::vector<std::string>{"t2"});
}

TEST_CASE("detection matching is greedy nearest-first", "[metrics]") {
  // d1 sits 11 m from t1 and 33 m from t2; d2 sits 22 m from t1 and far from
  // t2. Greedy takes (d1, t1) and leaves d2 and t2 unmatched.
  std::vector<DetectionPoint> dets = {{"d1", 4.0, 52.0001}, {"d2", 4.0, 51.9998}};
  std::vector<DetectionPoint> truth = {{"t1", 4.0, 52.0}, {"t2", 4.0, 52.0004}};
  auto r = match_detections(dets, truth, 100.0);
  REQUIRE(r.matches.size() == 2);
  CHECK(r.matches[0].det_id == "d1");
  CHECK(r.matches[0].truth_id == "t1");
  // d2 then has only t2 left, 67 m away: still within the radius
  CHECK(r.matches[1].det_id == "d2");
  CHECK(r.matches[1].truth_id == "t2");

  // Shrink the radius to 50 m: the second pair drops out entirely.
  auto r2 = match_detections(dets, truth, 50.0);
  REQUIRE(r2.matches.size() == 1);
  CHECK(r2.fp_dets == std::vector<std::string>{"d2"});
  CHECK(r2.fn_truths == std::vector<std::string>{"t2"});
}

TEST_CASE("detection matching ignores input order", "[metrics]") {
  Rng rng(811);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<DetectionPoint> dets, truth;
    for (int i = 0; i < 30; ++i)
      dets.push_back({"d" + std::to_string(i), 4.0 + rng.real01() * 0.01,
                      52.0 + rng.real01() * 0.01});
    for (int i = 0; i < 25; ++i)
      truth.push_back({"t" + std::to_string(i), 4.0 + rng.real01() * 0.01,
                       52.0 + rng.real01() * 0.01});
    auto base = match_detections(dets, truth, 150.0);

    auto shuffled_dets = dets;
    auto shuffled_truth = truth;
    for (std::size_t i = shuffled_dets.size(); i > 1; --i)
      std::swap(shuffled_dets[i - 1], shuffled_dets[rng.bounded(i)]);
    for (std::size_t i = shuffled_truth.size(); i > 1; --i)
      std::swap(shuffled_truth[i - 1], shuffled_truth[rng.bounded(i)]);
    auto again = match_detections(shuffled_dets, shuffled_truth, 150.0);

    REQUIRE(again.matches.size() == base.matches.size());
    for (std::size_t i = 0; i < base.matches.size(); ++i) {
      CHECK(again.matches[i].det_id == base.matches[i].det_id);
      CHECK(again.matches[i].truth_id == base.matches[i].truth_id);
    }
    CHECK(again.fp_dets == base.fp_dets);
    CHECK(again.fn_truths == base.fn_truths);
  }
}

TEST_CASE("site report: the two-site macro/micro split", "[metrics]") {
  MatchResult perfect;
  for (int i = 0; i < 10; ++i)
    perfect.matches.push_back({"d" + std::to_string(i), "t" + std::to_string(i), 5.0});
  MatchResult blind;
  for (int i = 0; i < 10; ++i) blind.fn_truths.push_back("u" + std::to_string(i));

  auto rep = site_report({{"site-a", perfect}, {"site-b", blind}});
  REQUIRE(rep.sites.size() == 2);
  CHECK(rep.sites[0].f1 == Catch::Approx(1.0));
  CHECK(rep.sites[1].f1 == 0.0);
  CHECK(rep.sites[1].precision == 0.0);  // 0/0 scored as zero

  CHECK(rep.macro.f1 == Catch::Approx(0.5));
  // pooled: tp 10, fp 0, fn 10 -> p 1, r 0.5, f1 2/3
  CHECK(rep.micro.precision == Catch::Approx(1.0));
  CHECK(rep.micro.recall == Catch::Approx(0.5));
  CHECK(rep.micro.f1 == Catch::Approx(2.0 / 3.0));

  CHECK_THROWS_AS(site_report({}), Error);
  CHECK_THROWS_AS(site_report({{"empty", MatchResult{}}}), Error);
}

TEST_CASE("JSON views carry undefined scores as null", "[metrics]") {
  ConfusionMatrix cm;
  cm.at(EventLabel::Water, EventLabel::Water) = 3;
  auto j = to_json(prf(cm));
  CHECK(j.at("per_class").at("Vessel").at("precision").is_null());
  CHECK(j.at("per_class").at("Water").at("precision").get<double>() == 1.0);
  CHECK(j.at("total_events").get<int>() == 3);

  auto jc = to_json(cm);
  CHECK(jc.at("Water").at("Water").get<int>() == 3);
  CHECK(jc.at("Water").at("Vessel").get<int>() == 0);
}
