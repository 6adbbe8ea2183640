// End-to-end walk through the library: synthesize a small corpus, push it
// through the partitioned store, classify every series, and score the result
// against the known truth.

#include <cstdio>
#include <filesystem>
#include <sstream>

#include "owt/owt.hpp"

namespace fs = std::filesystem;

int main() {
  owt::Rng rng(7);

  // A handful of deployment histories, some with vessel traffic.
  owt::DeploymentFixtureOptions opt;
  opt.vessel_rate = 0.02;
  std::vector<owt::TimeSeries> series;
  std::vector<std::vector<owt::EventLabel>> truth;
  for (int i = 0; i < 8; ++i) {
    auto fx = owt::make_deployment_series(rng, "demo-" + std::to_string(i), opt);
    series.push_back(std::move(fx.series));
    truth.push_back(std::move(fx.truth));
  }

  // Round-trip the profiles through the store, as the CLI would.
  std::vector<owt::BackscatterProfile> profiles;
  for (const auto& s : series)
    profiles.insert(profiles.end(), s.events.begin(), s.events.end());
  fs::path root = fs::temp_directory_path() / "owt-pipeline-demo";
  fs::remove_all(root);
  owt::write_store(profiles, "demo-batch", root);
  owt::StoreReader reader(root);
  std::printf("store holds %zu boxes across %d partitions\n",
              reader.manifest().box_partition.size(), owt::kPartitionCount);

  // Classify and pool the event-wise confusion.
  owt::ClassifierConfig cfg;
  owt::FeatureScratch scratch;
  owt::ConfusionMatrix cm;
  std::vector<owt::SequencePair> pairs;
  for (std::size_t i = 0; i < series.size(); ++i) {
    owt::TimeSeries ts = reader.read_series(series[i].box_id);
    owt::LabeledTimeSeries out = owt::classify_series(ts, cfg, nullptr, &scratch);
    cm += owt::confusion(truth[i], out.labels());
    pairs.push_back(owt::SequencePair{out.box_id, truth[i], out.labels()});

    auto collapsed = owt::collapse(out.labels());
    std::ostringstream phases;
    for (std::size_t k = 0; k < collapsed.size(); ++k) {
      if (k) phases << " -> ";
      phases << owt::label_name(collapsed[k]);
    }
    std::printf("%s: %zu events, phases %s\n", out.box_id.c_str(), out.events.size(),
                phases.str().c_str());
  }

  auto scores = owt::prf(cm);
  auto seq = owt::editsim_report(pairs);
  std::printf("event-wise micro F1 %.3f, macro F1 %.3f\n", scores.micro.f1, scores.macro.f1);
  std::printf("sequence edit-similarity AUC %.3f (collapsed %.3f)\n", seq.auc_full,
              seq.auc_collapsed);

  // Deployment analytics on the predicted labels.
  for (std::size_t i = 0; i < series.size(); ++i) {
    owt::TimeSeries ts = reader.read_series(series[i].box_id);
    auto rec = owt::deployment_duration(owt::classify_series(ts, cfg, nullptr, &scratch));
    if (rec.duration_days)
      std::printf("%s: foundation to turbine in %d days\n", rec.box_id.c_str(),
                  *rec.duration_days);
    else
      std::printf("%s: no duration (%s)\n", rec.box_id.c_str(), rec.reason.c_str());
  }

  fs::remove_all(root);
  return 0;
}
