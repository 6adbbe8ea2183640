#include <catch_amalgamated.hpp>

#include <filesystem>
#include <string>
#include <vector>

#include "owt/classifier.hpp"
#include "owt/fixtures.hpp"

using namespace owt;

namespace {

// Compact label notation for sequence tests.
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

Peak peak(int index, double amplitude, double prominence, double width = 3.0) {
  return Peak{index, amplitude, prominence, width};
}

// Hand-built feature vectors; designation is part of the input here so each
// stage-1 rule can be pinned in isolation.
ProfileFeatures feat(double mean, double stddev, double range, std::vector<Peak> peaks,
                     std::optional<Peak> centre, std::optional<Peak> side,
                     std::size_t len = 31) {
  ProfileFeatures f;
  f.len = len;
  f.mean = mean;
  f.stddev = stddev;
  f.range = range;
  f.peaks = std::move(peaks);
  f.centre_peak = centre;
  f.side_peak = side;
  return f;
}

std::vector<Date> dates_every(int n, int step_days, int start = 0) {
  std::vector<Date> out;
  for (int i = 0; i < n; ++i) out.push_back(Date{start + i * step_days});
  return out;
}

}  // namespace

TEST_CASE("config validation catches bad values", "[classifier]") {
  ClassifierConfig cfg;
  CHECK_NOTHROW(cfg.validate());

  ClassifierConfig even = cfg;
  even.smoothing_window = 4;
  CHECK_THROWS_AS(even.validate(), Error);

  ClassifierConfig rf = cfg;
  rf.relaxed_factor = 0.0;
  CHECK_THROWS_AS(rf.validate(), Error);
  rf.relaxed_factor = 1.5;
  CHECK_THROWS_AS(rf.validate(), Error);

  ClassifierConfig iters = cfg;
  iters.convergence_max_iters = 0;
  CHECK_THROWS_AS(iters.validate(), Error);
}

TEST_CASE("config JSON round trips with exact field names", "[classifier]") {
  ClassifierConfig cfg;
  cfg.water_mean_max = -17.5;
  cfg.turbine_side_prominence_min = 4.25;
  cfg.features.sigma = 1.75;
  auto j = cfg.to_json();
  for (const char* key :
       {"water_mean_max", "water_std_max", "weak_centre_prominence", "broad_peak_width_min",
        "high_range_min", "mooring_mean_min", "mooring_std_max", "turbine_centre_prominence_min",
        "turbine_side_prominence_min", "turbine_amplitude_min",
        "foundation_centre_prominence_min", "vessel_offset_min", "relaxed_factor",
        "smoothing_window", "convergence_max_iters", "features"})
    CHECK(j.contains(key));

  auto back = ClassifierConfig::from_json(j);
  CHECK(back.water_mean_max == cfg.water_mean_max);
  CHECK(back.turbine_side_prominence_min == cfg.turbine_side_prominence_min);
  CHECK(back.features.sigma == cfg.features.sigma);
  CHECK(back.smoothing_window == cfg.smoothing_window);

  // Partial documents override only what they name.
  auto partial = ClassifierConfig::from_json(nlohmann::json{{"water_std_max", 2.5}});
  CHECK(partial.water_std_max == 2.5);
  CHECK(partial.water_mean_max == -18.0);

  CHECK_THROWS_AS(ClassifierConfig::from_json(nlohmann::json{{"smoothing_window", 4}}), Error);
}

TEST_CASE("config file save and load", "[classifier]") {
  namespace fs = std::filesystem;
  fs::path p = fs::temp_directory_path() / "owt-cfg-test.json";
  ClassifierConfig cfg;
  cfg.high_range_min = 17.0;
  save_classifier_config(cfg, p.string());
  auto back = load_classifier_config(p.string());
  CHECK(back.high_range_min == 17.0);
  fs::remove(p);

  CHECK_THROWS_AS(load_classifier_config("/nonexistent/owt.json"), Error);
}

TEST_CASE("stage 1: water fires on dim flat or peakless profiles", "[classifier]") {
  ClassifierConfig cfg;
  // dim and flat
  CHECK(classify_stage1(feat(-22.0, 0.4, 2.0, {}, std::nullopt, std::nullopt),
                        OrbitDirection::Ascending, cfg) == EventLabel::Water);
  // dim and flat wins even when a peak exists
  Peak strong = peak(15, -5.0, 9.0);
  CHECK(classify_stage1(feat(-18.5, 1.2, 10.0, {strong}, strong, std::nullopt),
                        OrbitDirection::Ascending, cfg) == EventLabel::Water);
  // bright but peakless
  CHECK(classify_stage1(feat(-12.0, 3.0, 8.0, {}, std::nullopt, std::nullopt),
                        OrbitDirection::Ascending, cfg) == EventLabel::Water);
  // peaks exist but all prominences below the weak-centre threshold
  Peak weak = peak(15, -14.0, 2.5);
  CHECK(classify_stage1(feat(-16.0, 2.5, 6.0, {weak}, weak, std::nullopt),
                        OrbitDirection::Ascending, cfg) == EventLabel::Water);
}

TEST_CASE("stage 1: mooring fires on broad peaks, range, or bright-flat", "[classifier]") {
  ClassifierConfig cfg;
  Peak broad = peak(15, -6.0, 6.0, 9.0);
  CHECK(classify_stage1(feat(-14.0, 3.0, 12.0, {broad}, broad, std::nullopt),
                        OrbitDirection::Ascending, cfg) == EventLabel::MooringConstruction);

  Peak narrow = peak(15, -3.0, 6.0, 3.0);
  CHECK(classify_stage1(feat(-14.0, 3.5, 19.0, {narrow}, narrow, std::nullopt),
                        OrbitDirection::Ascending, cfg) == EventLabel::MooringConstruction);

  CHECK(classify_stage1(feat(-9.0, 1.8, 7.0, {narrow}, narrow, std::nullopt),
                        OrbitDirection::Ascending, cfg) == EventLabel::MooringConstruction);
}

TEST_CASE("stage 1: deployed turbine needs centre plus side above thresholds", "[classifier]") {
  ClassifierConfig cfg;
  Peak centre = peak(15, -5.0, 12.0);
  Peak side = peak(22, -6.5, 6.0);
  CHECK(classify_stage1(feat(-14.0, 3.5, 15.0, {centre, side}, centre, side),
                        OrbitDirection::Descending, cfg) == EventLabel::DeployedTurbine);

  // side prominence below threshold: falls through to foundation
  Peak faint_side = peak(22, -6.5, 3.0);
  CHECK(classify_stage1(feat(-14.0, 3.5, 15.0, {centre, faint_side}, centre, faint_side),
                        OrbitDirection::Descending, cfg) == EventLabel::TurbineFoundation);

  // amplitude below threshold blocks the turbine rule
  Peak dim_side = peak(22, -9.5, 6.0);
  CHECK(classify_stage1(feat(-14.0, 3.5, 15.0, {centre, dim_side}, centre, dim_side),
                        OrbitDirection::Descending, cfg) == EventLabel::TurbineFoundation);
}

TEST_CASE("stage 1: vessel needs one strong off-centre peak", "[classifier]") {
  ClassifierConfig cfg;
  Peak off = peak(5, -6.0, 7.0);
  CHECK(classify_stage1(feat(-15.0, 3.0, 14.0, {off}, off, std::nullopt),
                        OrbitDirection::Ascending, cfg) == EventLabel::Vessel);

  // too close to centre: foundation instead
  Peak near = peak(12, -6.0, 7.0);
  CHECK(classify_stage1(feat(-15.0, 3.0, 14.0, {near}, near, std::nullopt),
                        OrbitDirection::Ascending, cfg) == EventLabel::TurbineFoundation);

  // prominence below the bar and below foundation: default unclear
  Peak faint = peak(5, -10.0, 4.0);
  CHECK(classify_stage1(feat(-15.0, 3.0, 9.0, {faint}, faint, std::nullopt),
                        OrbitDirection::Ascending, cfg) == EventLabel::Unclear);
}

TEST_CASE("stage 1: stronger echo on the wrong side means unclear", "[classifier]") {
  ClassifierConfig cfg;
  Peak wrong = peak(10, -7.0, 7.0);
  Peak centre = peak(15, -6.0, 6.0);
  // Descending: the valid side is the higher index, so the peak at 10 is the
  // off side; it out-prominences the centre.
  CHECK(classify_stage1(feat(-14.0, 3.0, 14.0, {wrong, centre}, centre, std::nullopt),
                        OrbitDirection::Descending, cfg) == EventLabel::Unclear);
  // Same features on the ascending pass: 10 is now the valid side, blocked by
  // turbine thresholds (centre prominence 6 < 8), so foundation fires.
  CHECK(classify_stage1(feat(-14.0, 3.0, 14.0, {wrong, centre}, centre, wrong),
                        OrbitDirection::Ascending, cfg) == EventLabel::TurbineFoundation);
}

TEST_CASE("stage 1: foundation and the default", "[classifier]") {
  ClassifierConfig cfg;
  Peak centre = peak(15, -7.0, 8.0);
  CHECK(classify_stage1(feat(-14.0, 3.0, 14.0, {centre}, centre, std::nullopt),
                        OrbitDirection::Ascending, cfg) == EventLabel::TurbineFoundation);

  Peak faint = peak(15, -10.0, 4.0);
  CHECK(classify_stage1(feat(-15.0, 3.0, 9.0, {faint}, faint, std::nullopt),
                        OrbitDirection::Ascending, cfg) == EventLabel::Unclear);
}

TEST_CASE("stage 1 labels the synthetic signatures reliably", "[classifier]") {
  ClassifierConfig cfg;
  FeatureScratch scratch;
  auto run = [&](std::vector<double> values, OrbitDirection orbit) {
    BackscatterProfile p{"fx", Date{0}, orbit, std::move(values)};
    return classify_stage1(compute_features(p, cfg.features, &scratch), orbit, cfg);
  };

  Rng rng(101);
  int water = 0, foundation = 0, turbine = 0, vessel = 0, mooring = 0;
  for (int i = 0; i < 200; ++i) {
    OrbitDirection orbit = i % 2 ? OrbitDirection::Descending : OrbitDirection::Ascending;
    if (run(make_water_profile(rng), orbit) == EventLabel::Water) ++water;
    if (run(make_foundation_profile(rng), orbit) == EventLabel::TurbineFoundation) ++foundation;
    if (run(make_turbine_profile(rng, orbit), orbit) == EventLabel::DeployedTurbine) ++turbine;
    if (run(make_vessel_profile(rng), orbit) == EventLabel::Vessel) ++vessel;
    if (run(make_mooring_profile(rng), orbit) == EventLabel::MooringConstruction) ++mooring;
  }
  CHECK(water == 200);
  CHECK(foundation >= 198);
  CHECK(turbine >= 195);
  CHECK(vessel >= 198);
  CHECK(mooring >= 198);
}

TEST_CASE("smoothing: isolated non-water flanked by water sinks", "[classifier]") {
  ClassifierConfig cfg;
  CHECK(smooth_labels(seq("WFW"), cfg) == seq("WWW"));
  CHECK(smooth_labels(seq("WWFWW"), cfg) == seq("WWWWW"));
  // effective neighbours skip transients; pass (b) then levels the unclear
  // event too, once its visible neighbours agree
  CHECK(smooth_labels(seq("WUFVW"), cfg) == seq("WWWVW"));
}

TEST_CASE("smoothing: two agreeing neighbours outvote the middle", "[classifier]") {
  ClassifierConfig cfg;
  CHECK(smooth_labels(seq("TFT"), cfg) == seq("TTT"));
  CHECK(smooth_labels(seq("FWF"), cfg) == seq("FFF"));
  // disagreeing neighbours leave the label alone
  CHECK(smooth_labels(seq("FWT"), cfg) == seq("FWT"));
  CHECK(smooth_labels(seq("WWF"), cfg) == seq("WWF"));
}

TEST_CASE("smoothing preserves vessels", "[classifier]") {
  ClassifierConfig cfg;
  CHECK(smooth_labels(seq("TVT"), cfg) == seq("TVT"));
  CHECK(smooth_labels(seq("WVW"), cfg) == seq("WVW"));

  // Property: no vessel index is ever lost, over random sequences.
  Rng rng(55);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<EventLabel> labels(20 + rng.bounded(30));
    for (auto& l : labels) l = kAllLabels[rng.bounded(kLabelCount)];
    auto smoothed = smooth_labels(labels, cfg);
    REQUIRE(smoothed.size() == labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (labels[i] == EventLabel::Vessel) CHECK(smoothed[i] == EventLabel::Vessel);
  }
}

TEST_CASE("unclear retest applies relaxed thresholds", "[classifier]") {
  ClassifierConfig cfg;  // relaxed_factor 0.75

  // centre prominence at 0.8x the foundation threshold passes the relaxed bar
  Peak centre = peak(15, -9.0, 0.8 * cfg.foundation_centre_prominence_min);
  auto f_found = feat(-15.0, 3.0, 9.0, {centre}, centre, std::nullopt);
  CHECK(reevaluate_unclear(seq("U"), {f_found}, cfg) == seq("F"));

  // nothing to grab onto: stays unclear
  auto f_flat = feat(-20.0, 1.0, 3.0, {}, std::nullopt, std::nullopt);
  CHECK(reevaluate_unclear(seq("U"), {f_flat}, cfg) == seq("U"));

  // broad peak at 0.8x the width threshold passes the relaxed mooring bar
  Peak broad = peak(15, -11.0, 2.5, 0.8 * cfg.broad_peak_width_min);
  auto f_moor = feat(-15.0, 3.0, 9.0, {broad}, broad, std::nullopt);
  CHECK(reevaluate_unclear(seq("U"), {f_moor}, cfg) == seq("M"));

  // both rules fire and a centre peak exists: foundation wins
  Peak both = peak(15, -9.0, 4.0, 7.0);
  auto f_both = feat(-15.0, 3.0, 9.0, {both}, both, std::nullopt);
  CHECK(reevaluate_unclear(seq("U"), {f_both}, cfg) == seq("F"));

  // negative lower bound relaxes away from zero: mean -12 fails the strict
  // -10 bar but passes the relaxed -13.33 one
  auto f_bright = feat(-12.0, 1.5, 6.0, {}, std::nullopt, std::nullopt);
  CHECK(reevaluate_unclear(seq("U"), {f_bright}, cfg) == seq("M"));

  // non-unclear labels are never touched
  CHECK(reevaluate_unclear(seq("W"), {f_found}, cfg) == seq("W"));

  CHECK_THROWS_AS(reevaluate_unclear(seq("UU"), {f_flat}, cfg), Error);
}

TEST_CASE("isolated water between turbine context heals to the right", "[classifier]") {
  CHECK(fix_isolated_water(seq("FWF"), 5) == seq("FFF"));
  CHECK(fix_isolated_water(seq("FWT"), 5) == seq("FTT"));
  CHECK(fix_isolated_water(seq("WWF"), 5) == seq("WWF"));
  // transients are stepped over when looking for context
  CHECK(fix_isolated_water(seq("FVWT"), 5) == seq("FVTT"));
  // runs of two or more water events stay put
  CHECK(fix_isolated_water(seq("FWWT"), 5) == seq("FWWT"));
  // non-turbine context does not heal
  CHECK(fix_isolated_water(seq("MWM"), 5) == seq("MWM"));

  CHECK_THROWS_AS(fix_isolated_water(seq("FWF"), 4), Error);
}

TEST_CASE("segments collapse runs and can skip transparent labels", "[classifier]") {
  auto segs = build_segments(seq("FFTTTW"), false);
  REQUIRE(segs.size() == 3);
  CHECK(segs[0].label == EventLabel::TurbineFoundation);
  CHECK(segs[0].start_index == 0);
  CHECK(segs[0].end_index == 1);
  CHECK(segs[0].length == 2);
  CHECK(segs[1].length == 3);
  CHECK(segs[2].length == 1);

  // With transparency, M and V vanish and the flanking runs fuse.
  auto fused = build_segments(seq("TTMVTT"), true);
  REQUIRE(fused.size() == 1);
  CHECK(fused[0].label == EventLabel::DeployedTurbine);
  CHECK(fused[0].length == 4);
  CHECK(fused[0].start_index == 0);
  CHECK(fused[0].end_index == 5);

  auto split = build_segments(seq("TTMVFF"), true);
  REQUIRE(split.size() == 2);
  CHECK(split[1].label == EventLabel::TurbineFoundation);
  CHECK(split[1].length == 2);
}

TEST_CASE("segment refinement repairs deployment order", "[classifier]") {
  // T run shorter than flanking F context: the two foundation segments absorb it.
  std::vector<EventLabel> in = seq("FFFFFFFFFFTTFFFFFFFFFF");
  auto res = refine_segments(in);
  CHECK(res.converged);
  CHECK(res.labels == seq("FFFFFFFFFFFFFFFFFFFFFF"));

  // monotone order stays untouched
  auto mono = refine_segments(seq("FFFTTTTTTTTTT"));
  CHECK(mono.converged);
  CHECK(mono.labels == seq("FFFTTTTTTTTTT"));

  // transparent mooring event survives in place
  auto trans = refine_segments(seq("TTTTTTTTTTMFF"));
  CHECK(trans.converged);
  CHECK(trans.labels == seq("TTTTTTTTTTMTT"));

  // equal lengths: the later segment yields
  auto tie = refine_segments(seq("TTFF"));
  CHECK(tie.converged);
  CHECK(tie.labels == seq("TTTT"));

  // iteration cap reports non-convergence but still returns labels
  auto capped = refine_segments(seq("TFTFTF"), 1);
  CHECK_FALSE(capped.converged);
  CHECK(capped.labels.size() == 6);

  auto full = refine_segments(seq("TFTFTF"), 50);
  CHECK(full.converged);
  // every F follows a T, so the sequence ends up all turbine
  CHECK(full.labels == seq("TTTTTT"));
}

TEST_CASE("platform rule a: foundation-only series persisting a year", "[classifier]") {
  // 10 water then 40 foundation events, 30-day cadence: first foundation sits
  // 1170 days before the end.
  std::vector<EventLabel> labels = seq(std::string(10, 'W') + std::string(40, 'F'));
  auto dates = dates_every(50, 30);
  auto out = refine_platform(dates, labels);
  for (int i = 0; i < 10; ++i) CHECK(out[i] == EventLabel::Water);
  for (int i = 10; i < 50; ++i) CHECK(out[i] == EventLabel::Platform);

  // a short trailing stretch stays foundation
  std::vector<EventLabel> brief = seq("WWWWWWWWFF");
  auto out2 = refine_platform(dates_every(10, 30), brief);
  CHECK(out2 == brief);

  // mooring plurality blocks the rule
  std::vector<EventLabel> moorish = seq(std::string(6, 'M') + std::string(5, 'F'));
  auto out3 = refine_platform(dates_every(11, 90), moorish);
  CHECK(out3 == moorish);
}

TEST_CASE("platform rule b: foundations long after the last turbine", "[classifier]") {
  // T at days 0..120, then F at 150..420.
  std::vector<EventLabel> labels = seq("TTTTTFFFFFFFFFF");
  auto dates = dates_every(15, 30);
  auto out = refine_platform(dates, labels);
  for (int i = 0; i < 5; ++i) CHECK(out[i] == EventLabel::DeployedTurbine);
  // F at day 150..270 (gap 30..150 days) stay; day 300+ (gap >= 180) flip.
  for (int i = 5; i < 10; ++i) CHECK(out[i] == EventLabel::TurbineFoundation);
  for (int i = 10; i < 15; ++i) CHECK(out[i] == EventLabel::Platform);

  // series ending with turbine stays put
  std::vector<EventLabel> ending = seq("FFFFTTTT");
  CHECK(refine_platform(dates_every(8, 90), ending) == ending);

  CHECK_THROWS_AS(refine_platform(dates_every(3, 30), seq("WW")), Error);
}

TEST_CASE("full pipeline recovers the deployment arc", "[classifier]") {
  ClassifierConfig cfg;
  Rng rng(2001);
  FeatureScratch scratch;
  for (int trial = 0; trial < 50; ++trial) {
    auto fx = make_deployment_series(rng, "fx-" + std::to_string(trial));
    auto labeled = classify_series(fx.series, cfg, nullptr, &scratch);
    REQUIRE(labeled.events.size() == fx.series.events.size());
    CHECK(labeled.stage == LabelStage::Final);

    std::vector<EventLabel> collapsed;
    for (const auto& e : labeled.events)
      if (collapsed.empty() || collapsed.back() != e.label) collapsed.push_back(e.label);
    CHECK(collapsed == seq("WFT"));
  }
}

TEST_CASE("full pipeline: all-water series stays water", "[classifier]") {
  ClassifierConfig cfg;
  Rng rng(77);
  TimeSeries ts;
  ts.box_id = "w";
  for (int i = 0; i < 30; ++i)
    ts.events.push_back(BackscatterProfile{"w", Date{i * 6},
                                           i % 2 ? OrbitDirection::Descending
                                                 : OrbitDirection::Ascending,
                                           make_water_profile(rng)});
  auto labeled = classify_series(ts, cfg);
  for (const auto& e : labeled.events) CHECK(e.label == EventLabel::Water);
}

TEST_CASE("vessel spikes leave the collapsed arc intact", "[classifier]") {
  ClassifierConfig cfg;
  Rng rng(303);
  FeatureScratch scratch;
  DeploymentFixtureOptions opt;
  opt.vessel_rate = 0.03;
  int clean = 0;
  for (int trial = 0; trial < 50; ++trial) {
    auto fx = make_deployment_series(rng, "fx-" + std::to_string(trial), opt);
    auto labeled = classify_series(fx.series, cfg, nullptr, &scratch);

    std::vector<EventLabel> collapsed;
    for (const auto& e : labeled.events) {
      if (is_transient(e.label)) continue;
      if (collapsed.empty() || collapsed.back() != e.label) collapsed.push_back(e.label);
    }
    if (collapsed == seq("WFT")) ++clean;
  }
  CHECK(clean >= 48);
}

TEST_CASE("stage 2 is idempotent on final labels", "[classifier]") {
  ClassifierConfig cfg;
  Rng rng(404);
  FeatureScratch scratch;
  DeploymentFixtureOptions opt;
  opt.vessel_rate = 0.05;
  for (int trial = 0; trial < 20; ++trial) {
    auto fx = make_deployment_series(rng, "fx-" + std::to_string(trial), opt);
    auto labeled = classify_series(fx.series, cfg, nullptr, &scratch);

    std::vector<EventLabel> labels = labeled.labels();
    std::vector<Date> dates;
    for (const auto& e : labeled.events) dates.push_back(e.date);

    auto again = smooth_labels(labels, cfg);
    again = fix_isolated_water(again, cfg.smoothing_window);
    again = refine_segments(again, cfg.convergence_max_iters).labels;
    again = refine_platform(dates, again);
    CHECK(again == labels);
  }
}

TEST_CASE("final labels keep deployment monotone after transient removal", "[classifier]") {
  ClassifierConfig cfg;
  Rng rng(505);
  FeatureScratch scratch;
  DeploymentFixtureOptions opt;
  opt.vessel_rate = 0.04;
  for (int trial = 0; trial < 30; ++trial) {
    auto fx = make_deployment_series(rng, "fx-" + std::to_string(trial), opt);
    ClassifyDiagnostics diag;
    auto labeled = classify_series(fx.series, cfg, &diag, &scratch);
    CHECK(diag.converged);

    bool seen_turbine = false;
    for (const auto& e : labeled.events) {
      if (is_transient(e.label)) continue;
      if (e.label == EventLabel::DeployedTurbine) seen_turbine = true;
      if (seen_turbine) CHECK(e.label != EventLabel::TurbineFoundation);
    }
  }
}

TEST_CASE("water fixtures tolerate a constant brightness offset", "[classifier]") {
  ClassifierConfig cfg;
  Rng rng(606);
  TimeSeries ts;
  ts.box_id = "w";
  for (int i = 0; i < 20; ++i) {
    auto v = make_water_profile(rng);
    for (auto& x : v) x += 1.5;  // keeps the mean comfortably under -18 dB
    ts.events.push_back(BackscatterProfile{
        "w", Date{i * 6}, i % 2 ? OrbitDirection::Descending : OrbitDirection::Ascending,
        std::move(v)});
  }
  auto labeled = classify_series(ts, cfg);
  for (const auto& e : labeled.events) CHECK(e.label == EventLabel::Water);
}
