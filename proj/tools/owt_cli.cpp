// Command-line front end: ingest raw CSV exports into the partitioned store,
// plan acquisition batches, classify series, evaluate against annotations,
// run corpus analytics, calibrate thresholds, and generate synthetic
// fixtures. Every run writes a run-manifest.json beside its outputs; data
// files are deterministic for a given input + config + seed.
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "owt/owt.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// ---- logging (stderr only; level from OWT_LOG) ----

enum LogLevel { kError = 0, kWarn = 1, kInfo = 2, kDebug = 3 };

int log_level() {
  static int level = [] {
    const char* env = std::getenv("OWT_LOG");
    if (!env) return kWarn;
    std::string v = env;
    if (v == "error") return kError;
    if (v == "warn") return kWarn;
    if (v == "info") return kInfo;
    if (v == "debug") return kDebug;
    return kWarn;
  }();
  return level;
}

void logmsg(int level, const std::string& msg) {
  static const char* names[] = {"error", "warn", "info", "debug"};
  if (level <= log_level()) std::fprintf(stderr, "[%s] %s\n", names[level], msg.c_str());
}

// ---- run manifest ----

struct RunContext {
  std::string subcommand;
  std::uint64_t seed = 42;
  int jobs = 1;
  json params = json::object();
  json inputs = json::object();    // path -> fnv64 hex
  std::vector<std::string> outputs;
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
};

std::string hex64(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::uint64_t checksum_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw owt::Error(owt::Errc::IoError, "cannot open " + p.string());
  owt::FnvHasher h;
  char buf[65536];
  while (in.read(buf, sizeof buf) || in.gcount() > 0)
    h.update(std::string_view(buf, static_cast<std::size_t>(in.gcount())));
  return h.value();
}

// Files hash fully. For directories the manifest.json stands in when present
// (store manifests already embed per-partition checksums); otherwise the
// sorted name list is hashed.
void add_input(RunContext& ctx, const fs::path& p) {
  if (fs::is_directory(p)) {
    fs::path m = p / "manifest.json";
    if (fs::exists(m)) {
      ctx.inputs[p.string()] = hex64(checksum_file(m));
      return;
    }
    std::vector<std::string> names;
    for (const auto& e : fs::directory_iterator(p)) names.push_back(e.path().filename().string());
    std::sort(names.begin(), names.end());
    owt::FnvHasher h;
    for (const auto& n : names) {
      h.update(n);
      h.update(std::string_view("\0", 1));
    }
    ctx.inputs[p.string()] = hex64(h.value());
    return;
  }
  ctx.inputs[p.string()] = hex64(checksum_file(p));
}

void write_run_manifest(const RunContext& ctx, const fs::path& dir) {
  json m;
  m["subcommand"] = ctx.subcommand;
  m["artifact_version"] = owt::kVersion;
  m["seed"] = ctx.seed;
  m["jobs"] = ctx.jobs;
  m["params"] = ctx.params;
  m["inputs"] = ctx.inputs;
  m["outputs"] = ctx.outputs;
  json id{{"subcommand", ctx.subcommand}, {"params", ctx.params},
          {"seed", ctx.seed}, {"jobs", ctx.jobs}};
  m["config_hash"] = hex64(owt::fnv1a64(id.dump()));
  double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - ctx.t0)
                  .count();
  m["wall_ms"] = ms;
  std::error_code ec;
  fs::create_directories(dir, ec);
  fs::path out = dir / "run-manifest.json";
  std::ofstream f(out, std::ios::trunc);
  if (!f) throw owt::Error(owt::Errc::IoError, "cannot write " + out.string());
  f << m.dump(2) << '\n';
  logmsg(kInfo, ctx.subcommand + " finished in " + std::to_string(ms) + " ms");
}

// ---- small I/O helpers ----

std::vector<owt::DetectionPoint> read_points_csv(const fs::path& path,
                                                 std::map<std::string, std::string>* site_of) {
  std::ifstream in(path);
  if (!in) throw owt::Error(owt::Errc::IoError, "cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw owt::Error(owt::Errc::MissingHeader, path.string());
  auto header = owt::detail::split_csv_line(line);
  int col_id = -1, col_lon = -1, col_lat = -1, col_site = -1;
  for (std::size_t i = 0; i < header.size(); ++i) {
    std::string h = owt::detail::trim(header[i]);
    if (h == "id") col_id = static_cast<int>(i);
    else if (h == "lon") col_lon = static_cast<int>(i);
    else if (h == "lat") col_lat = static_cast<int>(i);
    else if (h == "site") col_site = static_cast<int>(i);
  }
  if (col_id < 0 || col_lon < 0 || col_lat < 0)
    throw owt::Error(owt::Errc::MissingHeader, path.string() + ": need id,lon,lat columns");
  std::vector<owt::DetectionPoint> pts;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (owt::detail::trim(line).empty()) continue;
    auto f = owt::detail::split_csv_line(line);
    std::size_t need = static_cast<std::size_t>(std::max({col_id, col_lon, col_lat, col_site})) + 1;
    if (f.size() < need)
      throw owt::Error(owt::Errc::MalformedRow,
                       path.string() + ":" + std::to_string(lineno) + ": too few fields");
    owt::DetectionPoint p;
    p.id = owt::detail::trim(f[static_cast<std::size_t>(col_id)]);
    try {
      p.lon = std::stod(f[static_cast<std::size_t>(col_lon)]);
      p.lat = std::stod(f[static_cast<std::size_t>(col_lat)]);
    } catch (const std::exception&) {
      throw owt::Error(owt::Errc::MalformedRow,
                       path.string() + ":" + std::to_string(lineno) + ": bad coordinate");
    }
    if (site_of) {
      std::string site = col_site >= 0 ? owt::detail::trim(f[static_cast<std::size_t>(col_site)])
                                       : std::string("all");
      (*site_of)[p.id] = site.empty() ? "all" : site;
    }
    pts.push_back(std::move(p));
  }
  return pts;
}

std::vector<owt::DetectionPoint> read_boxes_any(const fs::path& path) {
  std::string ext = path.extension().string();
  if (ext == ".json" || ext == ".geojson") {
    std::ifstream in(path);
    if (!in) throw owt::Error(owt::Errc::IoError, "cannot open " + path.string());
    json g;
    try {
      in >> g;
    } catch (const json::exception& e) {
      throw owt::Error(owt::Errc::MalformedRow, path.string() + ": " + e.what());
    }
    std::vector<owt::DetectionPoint> pts;
    if (!g.contains("features"))
      throw owt::Error(owt::Errc::InvalidArgument, path.string() + ": not a FeatureCollection");
    for (const auto& feat : g.at("features")) {
      const auto& geom = feat.at("geometry");
      if (geom.at("type") != "Point")
        throw owt::Error(owt::Errc::InvalidArgument, path.string() + ": non-point feature");
      owt::DetectionPoint p;
      if (feat.contains("id"))
        p.id = feat.at("id").is_string() ? feat.at("id").get<std::string>()
                                         : feat.at("id").dump();
      else if (feat.contains("properties") && feat.at("properties").contains("id")) {
        const auto& idv = feat.at("properties").at("id");
        p.id = idv.is_string() ? idv.get<std::string>() : idv.dump();
      } else {
        throw owt::Error(owt::Errc::EmptyKey, path.string() + ": feature without id");
      }
      p.lon = geom.at("coordinates").at(0).get<double>();
      p.lat = geom.at("coordinates").at(1).get<double>();
      pts.push_back(std::move(p));
    }
    return pts;
  }
  return read_points_csv(path, nullptr);
}

std::map<std::string, std::string> read_regions_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw owt::Error(owt::Errc::IoError, "cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw owt::Error(owt::Errc::MissingHeader, path.string());
  auto header = owt::detail::split_csv_line(line);
  int col_box = -1, col_region = -1;
  for (std::size_t i = 0; i < header.size(); ++i) {
    std::string h = owt::detail::trim(header[i]);
    if (h == "box_id") col_box = static_cast<int>(i);
    else if (h == "region") col_region = static_cast<int>(i);
  }
  if (col_box < 0 || col_region < 0)
    throw owt::Error(owt::Errc::MissingHeader, path.string() + ": need box_id,region columns");
  std::map<std::string, std::string> out;
  while (std::getline(in, line)) {
    if (owt::detail::trim(line).empty()) continue;
    auto f = owt::detail::split_csv_line(line);
    if (f.size() <= static_cast<std::size_t>(std::max(col_box, col_region))) continue;
    out[owt::detail::trim(f[static_cast<std::size_t>(col_box)])] =
        owt::detail::trim(f[static_cast<std::size_t>(col_region)]);
  }
  return out;
}

void write_text_file(const fs::path& path, const std::string& body) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::trunc | std::ios::binary);
  if (!out) throw owt::Error(owt::Errc::IoError, "cannot write " + path.string());
  out << body;
  if (!out) throw owt::Error(owt::Errc::IoError, "write failed: " + path.string());
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

fs::path out_dir_of(const fs::path& p) {
  return p.has_parent_path() ? p.parent_path() : fs::path(".");
}

// Truth and prediction label stores must cover the same boxes with the same
// event keys; returns aligned label pairs per box.
std::vector<owt::SequencePair> align_label_dirs(
    const std::map<std::string, owt::LabeledTimeSeries>& truth,
    const std::map<std::string, owt::LabeledTimeSeries>& pred) {
  for (const auto& [box, s] : pred)
    if (!truth.count(box))
      throw owt::Error(owt::Errc::UnknownBox, "prediction box missing from truth: " + box);
  std::vector<owt::SequencePair> pairs;
  for (const auto& [box, t] : truth) {
    auto it = pred.find(box);
    if (it == pred.end())
      throw owt::Error(owt::Errc::UnknownBox, "no prediction for box: " + box);
    const auto& p = it->second;
    if (t.events.size() != p.events.size())
      throw owt::Error(owt::Errc::LengthMismatch, "event count differs for box: " + box);
    for (std::size_t i = 0; i < t.events.size(); ++i)
      if (t.events[i].date.days != p.events[i].date.days ||
          t.events[i].orbit != p.events[i].orbit)
        throw owt::Error(owt::Errc::LengthMismatch, "event keys differ for box: " + box);
    pairs.push_back(owt::SequencePair{box, t.labels(), p.labels()});
  }
  return pairs;
}

// ---- subcommand bodies ----

int cmd_ingest(RunContext& ctx, const std::string& csv_dir, const std::string& store) {
  std::vector<fs::path> files;
  if (!fs::is_directory(csv_dir))
    throw owt::Error(owt::Errc::IoError, "not a directory: " + csv_dir);
  for (const auto& e : fs::directory_iterator(csv_dir))
    if (e.is_regular_file() && e.path().extension() == ".csv") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  if (files.empty()) throw owt::Error(owt::Errc::EmptyInput, "no .csv files in " + csv_dir);

  std::size_t total = 0;
  for (const auto& f : files) {
    add_input(ctx, f);
    std::ifstream in(f);
    if (!in) throw owt::Error(owt::Errc::IoError, "cannot open " + f.string());
    auto records = owt::parse_export_csv(in);
    auto profiles = owt::assemble_profiles(records);
    owt::write_store(profiles, f.stem().string(), store);
    total += profiles.size();
    logmsg(kInfo, f.filename().string() + ": " + std::to_string(profiles.size()) + " profiles");
  }
  ctx.outputs.push_back((fs::path(store) / "manifest.json").string());
  write_run_manifest(ctx, store);
  logmsg(kInfo, "ingested " + std::to_string(total) + " profiles from " +
                    std::to_string(files.size()) + " batches");
  return 0;
}

int cmd_plan(RunContext& ctx, const std::string& boxes, const std::string& out) {
  add_input(ctx, boxes);
  auto pts = read_boxes_any(boxes);
  auto plan = owt::plan_batches(pts, ctx.seed);
  auto violations = owt::verify_plan(plan, pts);
  if (!violations.empty())
    throw owt::Error(owt::Errc::InvalidArgument,
                     "planner produced " + std::to_string(violations.size()) + " violations");
  write_text_file(out, plan.to_json().dump(2) + "\n");
  ctx.outputs.push_back(out);
  write_run_manifest(ctx, out_dir_of(out));
  logmsg(kInfo, std::to_string(plan.batches.size()) + " batches over " +
                    std::to_string(pts.size()) + " boxes");
  return 0;
}

int cmd_classify(RunContext& ctx, const std::string& store, const std::string& config,
                 const std::string& out_labels) {
  owt::ClassifierConfig cfg;
  if (!config.empty()) {
    add_input(ctx, config);
    cfg = owt::load_classifier_config(config);
  }
  add_input(ctx, store);
  owt::StoreReader reader{fs::path(store)};
  std::vector<std::string> boxes;
  for (const auto& [box, part] : reader.manifest().box_partition) boxes.push_back(box);

  std::vector<owt::LabeledTimeSeries> results(boxes.size());
  int non_converged = 0;
  if (ctx.jobs <= 1 || boxes.size() < 2) {
    owt::FeatureScratch scratch;
    for (std::size_t i = 0; i < boxes.size(); ++i) {
      owt::TimeSeries s = reader.read_series(boxes[i]);
      owt::ClassifyDiagnostics diag;
      results[i] = owt::classify_series(s, cfg, &diag, &scratch);
      if (!diag.converged) ++non_converged;
    }
  } else {
    // Count convergence misses per chunk to avoid sharing a counter.
    std::size_t n = boxes.size();
    int workers = std::min<std::size_t>(ctx.jobs, n);
    std::vector<int> misses(workers, 0);
    std::vector<std::thread> threads;
    std::size_t chunk = (n + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      std::size_t lo = w * chunk, hi = std::min(n, lo + chunk);
      if (lo >= hi) break;
      threads.emplace_back([&, lo, hi, w] {
        owt::StoreReader local{fs::path(store)};
        owt::FeatureScratch scratch;
        for (std::size_t i = lo; i < hi; ++i) {
          owt::TimeSeries s = local.read_series(boxes[i]);
          owt::ClassifyDiagnostics diag;
          results[i] = owt::classify_series(s, cfg, &diag, &scratch);
          if (!diag.converged) ++misses[w];
        }
      });
    }
    for (auto& t : threads) t.join();
    for (int m : misses) non_converged += m;
  }
  owt::write_labels(results, reader.manifest().box_partition, out_labels);
  if (non_converged > 0)
    logmsg(kWarn, std::to_string(non_converged) + " series hit the refinement iteration cap");
  ctx.outputs.push_back(out_labels);
  write_run_manifest(ctx, out_labels);
  logmsg(kInfo, "labeled " + std::to_string(results.size()) + " series");
  return 0;
}

int cmd_evaluate_events(RunContext& ctx, const std::string& truth_dir, const std::string& pred_dir,
                        const std::string& report) {
  add_input(ctx, truth_dir);
  add_input(ctx, pred_dir);
  auto truth = owt::read_labels(truth_dir);
  auto pred = owt::read_labels(pred_dir);
  auto pairs = align_label_dirs(truth, pred);
  owt::ConfusionMatrix cm;
  for (const auto& p : pairs) cm += owt::confusion(p.truth, p.pred);
  json rep{{"confusion", owt::to_json(cm)}, {"scores", owt::to_json(owt::prf(cm))}};
  write_text_file(report, rep.dump(2) + "\n");
  ctx.outputs.push_back(report);
  write_run_manifest(ctx, out_dir_of(report));
  return 0;
}

int cmd_evaluate_sequences(RunContext& ctx, const std::string& truth_dir,
                           const std::string& pred_dir, const std::string& report,
                           const std::string& curve, const std::string& auc_rule) {
  add_input(ctx, truth_dir);
  add_input(ctx, pred_dir);
  auto truth = owt::read_labels(truth_dir);
  auto pred = owt::read_labels(pred_dir);
  auto pairs = align_label_dirs(truth, pred);
  owt::AucRule rule =
      auc_rule == "left-riemann" ? owt::AucRule::LeftRiemann : owt::AucRule::Trapezoid;
  auto rep = owt::editsim_report(pairs, rule);
  if (!report.empty()) {
    write_text_file(report, owt::to_json(rep).dump(2) + "\n");
    ctx.outputs.push_back(report);
  }
  if (!curve.empty()) {
    std::string body = "q,fraction_full,fraction_collapsed\n";
    for (int i = 0; i < owt::kThresholdGridSize; ++i) {
      body += fmt_double(rep.thresholds[i]);
      body += ',';
      body += fmt_double(rep.fraction_full[i]);
      body += ',';
      body += fmt_double(rep.fraction_collapsed[i]);
      body += '\n';
    }
    write_text_file(curve, body);
    ctx.outputs.push_back(curve);
  }
  write_run_manifest(ctx, out_dir_of(!report.empty() ? report : curve));
  return 0;
}

int cmd_evaluate_detections(RunContext& ctx, const std::string& dets_csv,
                            const std::string& truth_csv, double radius,
                            const std::string& report) {
  add_input(ctx, dets_csv);
  add_input(ctx, truth_csv);
  std::map<std::string, std::string> det_site, truth_site;
  auto dets = read_points_csv(dets_csv, &det_site);
  auto truth = read_points_csv(truth_csv, &truth_site);

  std::map<std::string, std::pair<std::vector<owt::DetectionPoint>, std::vector<owt::DetectionPoint>>>
      by_site;
  for (const auto& d : dets) by_site[det_site[d.id]].first.push_back(d);
  for (const auto& t : truth) by_site[truth_site[t.id]].second.push_back(t);

  std::vector<std::pair<std::string, owt::MatchResult>> per_site;
  json matches = json::object();
  for (const auto& [site, pts] : by_site) {
    owt::MatchResult mr = owt::match_detections(pts.first, pts.second, radius);
    matches[site] = owt::to_json(mr);
    per_site.emplace_back(site, std::move(mr));
  }
  auto rep = owt::site_report(per_site);
  json out{{"radius_m", radius}, {"report", owt::to_json(rep)}, {"matches", matches}};
  write_text_file(report, out.dump(2) + "\n");
  ctx.outputs.push_back(report);
  write_run_manifest(ctx, out_dir_of(report));
  return 0;
}

int cmd_analyze_stats(RunContext& ctx, const std::string& store, const std::string& out) {
  add_input(ctx, store);
  owt::StoreReader reader{fs::path(store)};
  std::string body = "box_id,event_count,median_interval_days\n";
  for (const auto& [box, part] : reader.manifest().box_partition) {
    owt::SeriesStats st = owt::series_stats(reader.read_series(box));
    body += st.box_id;
    body += ',';
    body += std::to_string(st.event_count);
    body += ',';
    if (st.median_interval_days) body += fmt_double(*st.median_interval_days);
    body += '\n';
  }
  write_text_file(out, body);
  ctx.outputs.push_back(out);
  write_run_manifest(ctx, out_dir_of(out));
  return 0;
}

int cmd_analyze_durations(RunContext& ctx, const std::string& labels_dir,
                          const std::string& regions, const std::string& out) {
  add_input(ctx, labels_dir);
  std::map<std::string, std::string> region_of;
  if (!regions.empty()) {
    add_input(ctx, regions);
    region_of = read_regions_csv(regions);
  }
  auto labeled = owt::read_labels(labels_dir);
  std::string body = "box_id,region,first_foundation,first_turbine,duration_days,reason\n";
  for (const auto& [box, series] : labeled) {
    auto it = region_of.find(box);
    owt::DeploymentRecord r =
        owt::deployment_duration(series, it == region_of.end() ? "" : it->second);
    body += r.box_id;
    body += ',';
    body += r.region;
    body += ',';
    if (r.first_foundation_date) body += r.first_foundation_date->to_string();
    body += ',';
    if (r.first_turbine_date) body += r.first_turbine_date->to_string();
    body += ',';
    if (r.duration_days) body += std::to_string(*r.duration_days);
    body += ',';
    body += r.reason;
    body += '\n';
  }
  write_text_file(out, body);
  ctx.outputs.push_back(out);
  write_run_manifest(ctx, out_dir_of(out));
  return 0;
}

int cmd_analyze_gaps(RunContext& ctx, const std::string& labels_dir, int min_gap_days,
                     const std::string& out) {
  add_input(ctx, labels_dir);
  auto labeled = owt::read_labels(labels_dir);
  std::string body = "box_id,gap_start,gap_end,span_days,interior_events";
  for (owt::EventLabel l : owt::kAllLabels) {
    body += ",count_";
    body += owt::label_name(l);
  }
  body += '\n';
  for (const auto& [box, series] : labeled) {
    for (const owt::MaintenanceGap& g : owt::maintenance_gaps(series, min_gap_days)) {
      body += g.box_id;
      body += ',';
      body += g.gap_start.to_string();
      body += ',';
      body += g.gap_end.to_string();
      body += ',';
      body += std::to_string(g.span_days);
      body += ',';
      body += std::to_string(g.interior_events);
      for (std::size_t c = 0; c < owt::kLabelCount; ++c) {
        body += ',';
        body += std::to_string(g.interior_counts[c]);
      }
      body += '\n';
    }
  }
  write_text_file(out, body);
  ctx.outputs.push_back(out);
  write_run_manifest(ctx, out_dir_of(out));
  return 0;
}

int cmd_calibrate(RunContext& ctx, const std::string& store, const std::string& truth_dir,
                  const std::string& grid_file, const std::string& config,
                  const std::string& out, const std::string& table) {
  add_input(ctx, store);
  add_input(ctx, truth_dir);
  add_input(ctx, grid_file);
  owt::ClassifierConfig base;
  if (!config.empty()) {
    add_input(ctx, config);
    base = owt::load_classifier_config(config);
  }
  std::ifstream gf(grid_file);
  if (!gf) throw owt::Error(owt::Errc::IoError, "cannot open " + grid_file);
  json grid;
  try {
    gf >> grid;
  } catch (const json::exception& e) {
    throw owt::Error(owt::Errc::InvalidArgument, std::string("grid parse error: ") + e.what());
  }

  auto truth = owt::read_labels(truth_dir);
  owt::StoreReader reader{fs::path(store)};
  std::vector<owt::BenchmarkPair> benchmark;
  for (const auto& [box, t] : truth) {
    owt::TimeSeries s = reader.read_series(box);
    if (s.events.size() != t.events.size())
      throw owt::Error(owt::Errc::LengthMismatch, "truth/store event mismatch for " + box);
    benchmark.push_back(owt::BenchmarkPair{std::move(s), t.labels()});
  }

  owt::CalibrationResult res = owt::calibrate(benchmark, base, grid, ctx.jobs);
  owt::save_classifier_config(res.best, out);
  ctx.outputs.push_back(out);
  if (!table.empty()) {
    std::vector<std::string> names;
    for (const auto& [k, v] : grid.items()) names.push_back(k);
    std::sort(names.begin(), names.end());
    std::string body = "index,macro_f1,auc_collapsed";
    for (const auto& n : names) body += "," + n;
    body += '\n';
    for (const auto& e : res.table) {
      body += std::to_string(e.index);
      body += ',';
      body += fmt_double(e.macro_f1);
      body += ',';
      body += fmt_double(e.auc_collapsed);
      for (const auto& n : names) {
        body += ',';
        body += fmt_double(e.params.at(n).get<double>());
      }
      body += '\n';
    }
    write_text_file(table, body);
    ctx.outputs.push_back(table);
  }
  write_run_manifest(ctx, out_dir_of(out));
  logmsg(kInfo, "best grid index " + std::to_string(res.best_index) + " of " +
                    std::to_string(res.table.size()));
  return 0;
}

int cmd_fixtures(RunContext& ctx, const std::string& out_dir, int series, double vessel_rate,
                 int profile_len, int points, int hotspots) {
  owt::Rng rng(ctx.seed);
  fs::create_directories(out_dir);
  if (points > 0) {
    owt::Rng prng(ctx.seed + 1);
    auto pts = owt::make_hotspot_points(prng, static_cast<std::size_t>(points),
                                        static_cast<std::size_t>(hotspots));
    std::string body = "id,lon,lat\n";
    for (const auto& p : pts) {
      body += p.id;
      body += ',';
      body += fmt_double(p.lon);
      body += ',';
      body += fmt_double(p.lat);
      body += '\n';
    }
    fs::path f = fs::path(out_dir) / "points.csv";
    write_text_file(f, body);
    ctx.outputs.push_back(f.string());
  }
  if (series > 0) {
    owt::DeploymentFixtureOptions opt;
    opt.vessel_rate = vessel_rate;
    opt.profile_len = static_cast<std::size_t>(profile_len);
    std::string csv = "box_id,column_id,max_value,img_date,orbit_direction\n";
    std::vector<owt::LabeledTimeSeries> truth;
    std::map<std::string, int> box_partition;
    for (int k = 0; k < series; ++k) {
      char name[24];
      std::snprintf(name, sizeof name, "box-%05d", k);
      auto fx = owt::make_deployment_series(rng, name, opt);
      owt::LabeledTimeSeries t;
      t.box_id = name;
      t.stage = owt::LabelStage::Final;
      for (std::size_t i = 0; i < fx.series.events.size(); ++i) {
        const auto& e = fx.series.events[i];
        t.events.push_back(owt::LabeledEvent{e.img_date, e.orbit_direction, fx.truth[i]});
        for (std::size_t c = 0; c < e.values.size(); ++c) {
          csv += e.box_id;
          csv += ',';
          csv += std::to_string(c);
          csv += ',';
          csv += fmt_double(e.values[c]);
          csv += ',';
          csv += e.img_date.to_string();
          csv += ',';
          csv += owt::orbit_name(e.orbit_direction);
          csv += '\n';
        }
      }
      truth.push_back(std::move(t));
      box_partition[name] = owt::partition_of("fixtures", name);
    }
    fs::path csv_dir = fs::path(out_dir) / "export";
    fs::create_directories(csv_dir);
    fs::path f = csv_dir / "fixtures.csv";
    write_text_file(f, csv);
    ctx.outputs.push_back(f.string());
    fs::path tdir = fs::path(out_dir) / "truth";
    owt::write_labels(truth, box_partition, tdir);
    ctx.outputs.push_back(tdir.string());
  }
  write_run_manifest(ctx, out_dir);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"offshore wind backscatter time-series toolkit"};
  app.require_subcommand(1);
  app.fallthrough();

  RunContext ctx;
  unsigned hw = std::thread::hardware_concurrency();
  ctx.jobs = hw ? static_cast<int>(hw) : 1;
  app.add_option("--seed", ctx.seed, "RNG seed for all randomized steps")->capture_default_str();
  app.add_option("--jobs", ctx.jobs, "worker thread count")->capture_default_str();

  // ingest
  std::string in_csv_dir, in_store;
  auto* c_ingest = app.add_subcommand("ingest", "parse raw export CSVs into the partitioned store");
  c_ingest->add_option("--csv-dir", in_csv_dir, "directory of export .csv batches")->required();
  c_ingest->add_option("--store", in_store, "store directory")->required();

  // plan
  std::string plan_boxes, plan_out;
  auto* c_plan = app.add_subcommand("plan", "group boxes into acquisition batches");
  c_plan->add_option("--boxes", plan_boxes, "points file (csv id,lon,lat or GeoJSON)")->required();
  c_plan->add_option("--out", plan_out, "output plan JSON")->required();

  // classify
  std::string cl_store, cl_config, cl_out;
  auto* c_classify = app.add_subcommand("classify", "label every series in a store");
  c_classify->add_option("--store", cl_store, "store directory")->required();
  c_classify->add_option("--config", cl_config, "classifier config JSON");
  c_classify->add_option("--out-labels", cl_out, "output label directory")->required();

  // evaluate
  auto* c_eval = app.add_subcommand("evaluate", "compare predictions against annotations");
  c_eval->require_subcommand(1);
  std::string ev_truth, ev_pred, ev_report, ev_curve, ev_rule = "trapezoid";
  auto* c_ev_events = c_eval->add_subcommand("events", "event-wise confusion and P/R/F1");
  c_ev_events->add_option("--truth", ev_truth, "truth label directory")->required();
  c_ev_events->add_option("--pred", ev_pred, "prediction label directory")->required();
  c_ev_events->add_option("--report", ev_report, "output report JSON")->required();
  auto* c_ev_seq = c_eval->add_subcommand("sequences", "edit-similarity curve and AUC");
  c_ev_seq->add_option("--truth", ev_truth, "truth label directory")->required();
  c_ev_seq->add_option("--pred", ev_pred, "prediction label directory")->required();
  c_ev_seq->add_option("--report", ev_report, "output report JSON");
  c_ev_seq->add_option("--curve", ev_curve, "output curve CSV");
  c_ev_seq->add_option("--auc-rule", ev_rule, "trapezoid or left-riemann")
      ->check(CLI::IsMember({"trapezoid", "left-riemann"}))
      ->capture_default_str();
  std::string dt_dets, dt_truth, dt_report;
  double dt_radius = 100.0;
  auto* c_ev_det = c_eval->add_subcommand("detections", "match detections to surveyed points");
  c_ev_det->add_option("--dets", dt_dets, "detections CSV (id,lon,lat[,site])")->required();
  c_ev_det->add_option("--truth", dt_truth, "truth CSV (id,lon,lat[,site])")->required();
  c_ev_det->add_option("--radius", dt_radius, "match radius in metres")->capture_default_str();
  c_ev_det->add_option("--report", dt_report, "output report JSON")->required();

  // analyze
  auto* c_analyze = app.add_subcommand("analyze", "corpus analytics");
  c_analyze->require_subcommand(1);
  std::string an_store, an_labels, an_regions, an_out;
  int an_min_gap = 30;
  auto* c_an_stats = c_analyze->add_subcommand("stats", "events per series and acquisition cadence");
  c_an_stats->add_option("--store", an_store, "store directory")->required();
  c_an_stats->add_option("--out", an_out, "output CSV")->required();
  auto* c_an_dur = c_analyze->add_subcommand("durations", "foundation-to-turbine durations");
  c_an_dur->add_option("--labels", an_labels, "label directory")->required();
  c_an_dur->add_option("--regions", an_regions, "box_id,region CSV");
  c_an_dur->add_option("--out", an_out, "output CSV")->required();
  auto* c_an_gaps = c_analyze->add_subcommand("gaps", "maintenance gaps between turbine sightings");
  c_an_gaps->add_option("--labels", an_labels, "label directory")->required();
  c_an_gaps->add_option("--min-gap-days", an_min_gap, "minimum gap span")->capture_default_str();
  c_an_gaps->add_option("--out", an_out, "output CSV")->required();

  // calibrate
  std::string ca_store, ca_truth, ca_grid, ca_config, ca_out, ca_table;
  auto* c_cal = app.add_subcommand("calibrate", "grid-search classifier thresholds");
  c_cal->add_option("--store", ca_store, "store directory")->required();
  c_cal->add_option("--truth", ca_truth, "truth label directory")->required();
  c_cal->add_option("--grid", ca_grid, "grid JSON {param: [values]}")->required();
  c_cal->add_option("--config", ca_config, "base config JSON");
  c_cal->add_option("--out", ca_out, "output best-config JSON")->required();
  c_cal->add_option("--table", ca_table, "output score table CSV");

  // fixtures
  std::string fx_out;
  int fx_series = 20, fx_profile_len = 31, fx_points = 0, fx_hotspots = 20;
  double fx_vessel = 0.0;
  auto* c_fx = app.add_subcommand("fixtures", "generate a synthetic test corpus");
  c_fx->add_option("--out", fx_out, "output directory")->required();
  c_fx->add_option("--series", fx_series, "number of deployment series")->capture_default_str();
  c_fx->add_option("--vessel-rate", fx_vessel, "vessel spike probability per event")
      ->capture_default_str();
  c_fx->add_option("--profile-len", fx_profile_len, "bins per profile")->capture_default_str();
  c_fx->add_option("--points", fx_points, "also write a clustered points CSV");
  c_fx->add_option("--hotspots", fx_hotspots, "hotspot count for --points")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (app.got_subcommand(c_ingest)) {
      ctx.subcommand = "ingest";
      ctx.params = {{"csv_dir", in_csv_dir}, {"store", in_store}};
      return cmd_ingest(ctx, in_csv_dir, in_store);
    }
    if (app.got_subcommand(c_plan)) {
      ctx.subcommand = "plan";
      ctx.params = {{"boxes", plan_boxes}, {"out", plan_out}};
      return cmd_plan(ctx, plan_boxes, plan_out);
    }
    if (app.got_subcommand(c_classify)) {
      ctx.subcommand = "classify";
      ctx.params = {{"store", cl_store}, {"config", cl_config}, {"out_labels", cl_out}};
      return cmd_classify(ctx, cl_store, cl_config, cl_out);
    }
    if (app.got_subcommand(c_eval)) {
      if (c_eval->got_subcommand(c_ev_events)) {
        ctx.subcommand = "evaluate.events";
        ctx.params = {{"truth", ev_truth}, {"pred", ev_pred}, {"report", ev_report}};
        return cmd_evaluate_events(ctx, ev_truth, ev_pred, ev_report);
      }
      if (c_eval->got_subcommand(c_ev_seq)) {
        if (ev_report.empty() && ev_curve.empty())
          throw owt::Error(owt::Errc::InvalidArgument,
                           "evaluate sequences: need --report and/or --curve");
        ctx.subcommand = "evaluate.sequences";
        ctx.params = {{"truth", ev_truth},
                      {"pred", ev_pred},
                      {"report", ev_report},
                      {"curve", ev_curve},
                      {"auc_rule", ev_rule}};
        return cmd_evaluate_sequences(ctx, ev_truth, ev_pred, ev_report, ev_curve, ev_rule);
      }
      ctx.subcommand = "evaluate.detections";
      ctx.params = {{"dets", dt_dets},
                    {"truth", dt_truth},
                    {"radius", dt_radius},
                    {"report", dt_report}};
      return cmd_evaluate_detections(ctx, dt_dets, dt_truth, dt_radius, dt_report);
    }
    if (app.got_subcommand(c_analyze)) {
      if (c_analyze->got_subcommand(c_an_stats)) {
        ctx.subcommand = "analyze.stats";
        ctx.params = {{"store", an_store}, {"out", an_out}};
        return cmd_analyze_stats(ctx, an_store, an_out);
      }
      if (c_analyze->got_subcommand(c_an_dur)) {
        ctx.subcommand = "analyze.durations";
        ctx.params = {{"labels", an_labels}, {"regions", an_regions}, {"out", an_out}};
        return cmd_analyze_durations(ctx, an_labels, an_regions, an_out);
      }
      ctx.subcommand = "analyze.gaps";
      ctx.params = {{"labels", an_labels}, {"min_gap_days", an_min_gap}, {"out", an_out}};
      return cmd_analyze_gaps(ctx, an_labels, an_min_gap, an_out);
    }
    if (app.got_subcommand(c_cal)) {
      ctx.subcommand = "calibrate";
      ctx.params = {{"store", ca_store}, {"truth", ca_truth},   {"grid", ca_grid},
                    {"config", ca_config}, {"out", ca_out},     {"table", ca_table}};
      return cmd_calibrate(ctx, ca_store, ca_truth, ca_grid, ca_config, ca_out, ca_table);
    }
    if (app.got_subcommand(c_fx)) {
      ctx.subcommand = "fixtures";
      ctx.params = {{"out", fx_out},
                    {"series", fx_series},
                    {"vessel_rate", fx_vessel},
                    {"profile_len", fx_profile_len},
                    {"points", fx_points},
                    {"hotspots", fx_hotspots}};
      return cmd_fixtures(ctx, fx_out, fx_series, fx_vessel, fx_profile_len, fx_points,
                          fx_hotspots);
    }
    std::fprintf(stderr, "%s\n", app.help().c_str());
    return 1;
  } catch (const owt::Error& e) {
    logmsg(kError, e.what());
    return owt::is_io_error(e.code()) ? 2 : 1;
  } catch (const std::filesystem::filesystem_error& e) {
    logmsg(kError, e.what());
    return 2;
  } catch (const std::exception& e) {
    logmsg(kError, e.what());
    return 1;
  }
}
