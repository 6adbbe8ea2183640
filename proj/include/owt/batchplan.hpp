// Spatial batch planning over detection boxes: each batch is seeded by a
// randomly chosen unassigned box and filled nearest-first with boxes within
// 15 km of the seed, capped at 40 members.
#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "owt/core.hpp"
#include "owt/rng.hpp"

namespace owt {

inline constexpr double kEarthRadiusKm = 6371.0088;
inline constexpr double kBatchRadiusKm = 15.0;
inline constexpr int kBatchMaxBoxes = 40;

// Great-circle distance on the mean-radius sphere.
inline double haversine_km(double lon_a, double lat_a, double lon_b, double lat_b) {
  constexpr double deg = 0.017453292519943295;  // pi/180
  double phi_a = lat_a * deg;
  double phi_b = lat_b * deg;
  double dphi = (lat_b - lat_a) * deg;
  double dlam = (lon_b - lon_a) * deg;
  double s1 = std::sin(dphi / 2.0);
  double s2 = std::sin(dlam / 2.0);
  double h = s1 * s1 + std::cos(phi_a) * std::cos(phi_b) * s2 * s2;
  if (h > 1.0) h = 1.0;
  return 2.0 * kEarthRadiusKm * std::asin(std::sqrt(h));
}

inline double haversine_km(const DetectionPoint& a, const DetectionPoint& b) {
  return haversine_km(a.lon, a.lat, b.lon, b.lat);
}

struct Batch {
  std::string batch_id;
  std::string seed_box;
  std::vector<std::string> members;  // includes the seed
};

struct BatchPlan {
  std::uint64_t rng_seed = 0;
  std::vector<Batch> batches;

  nlohmann::json to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& b : batches)
      arr.push_back({{"batch_id", b.batch_id}, {"seed_box", b.seed_box}, {"members", b.members}});
    return nlohmann::json{{"rng_seed", rng_seed}, {"batches", arr}};
  }

  static BatchPlan from_json(const nlohmann::json& j) {
    BatchPlan plan;
    plan.rng_seed = j.at("rng_seed").get<std::uint64_t>();
    for (const auto& jb : j.at("batches")) {
      Batch b;
      b.batch_id = jb.at("batch_id").get<std::string>();
      b.seed_box = jb.at("seed_box").get<std::string>();
      b.members = jb.at("members").get<std::vector<std::string>>();
      plan.batches.push_back(std::move(b));
    }
    return plan;
  }
};

// Greedy planner. Deterministic for a fixed seed: candidate boxes are kept in
// id order, the seed is drawn with the bit-stable Rng, and in-radius
// candidates are packed nearest-first with (distance, id) tie-breaking.
// A box with no neighbours in radius ends up as a singleton batch.
inline BatchPlan plan_batches(const std::vector<DetectionPoint>& boxes,
                              std::uint64_t rng_seed) {
  if (boxes.empty()) throw Error(Errc::EmptyInput, "plan_batches: no boxes");
  for (const auto& b : boxes)
    if (!b.valid())
      throw Error(Errc::InvalidArgument, "invalid coordinates for box " + b.id);

  std::vector<const DetectionPoint*> unassigned;
  unassigned.reserve(boxes.size());
  for (const auto& b : boxes) unassigned.push_back(&b);
  std::sort(unassigned.begin(), unassigned.end(),
            [](const DetectionPoint* a, const DetectionPoint* b) { return a->id < b->id; });

  Rng rng(rng_seed);
  BatchPlan plan;
  plan.rng_seed = rng_seed;

  while (!unassigned.empty()) {
    std::size_t pick = static_cast<std::size_t>(rng.bounded(unassigned.size()));
    const DetectionPoint* seed = unassigned[pick];

    struct Candidate {
      double dist;
      std::size_t index;
    };
    std::vector<Candidate> in_radius;
    for (std::size_t i = 0; i < unassigned.size(); ++i) {
      double d = haversine_km(*seed, *unassigned[i]);
      if (d <= kBatchRadiusKm) in_radius.push_back({d, i});
    }
    std::sort(in_radius.begin(), in_radius.end(), [&](const Candidate& a, const Candidate& b) {
      if (a.dist != b.dist) return a.dist < b.dist;
      return unassigned[a.index]->id < unassigned[b.index]->id;
    });
    if (in_radius.size() > static_cast<std::size_t>(kBatchMaxBoxes))
      in_radius.resize(kBatchMaxBoxes);

    Batch batch;
    char id[24];
    std::snprintf(id, sizeof(id), "batch-%05zu", plan.batches.size());
    batch.batch_id = id;
    batch.seed_box = seed->id;

    std::vector<bool> taken(unassigned.size(), false);
    for (const auto& c : in_radius) {
      batch.members.push_back(unassigned[c.index]->id);
      taken[c.index] = true;
    }
    plan.batches.push_back(std::move(batch));

    std::vector<const DetectionPoint*> rest;
    rest.reserve(unassigned.size() - in_radius.size());
    for (std::size_t i = 0; i < unassigned.size(); ++i)
      if (!taken[i]) rest.push_back(unassigned[i]);
    unassigned.swap(rest);
  }
  return plan;
}

// Independent constraint checker used by tests and the CLI: partition
// property, batch size cap, and seed-distance cap.
struct PlanViolation {
  std::string batch_id;
  std::string detail;
};

inline std::vector<PlanViolation> verify_plan(const BatchPlan& plan,
                                              const std::vector<DetectionPoint>& boxes) {
  std::vector<PlanViolation> violations;
  std::map<std::string, const DetectionPoint*> by_id;
  for (const auto& b : boxes) by_id[b.id] = &b;

  std::map<std::string, int> seen;
  for (const auto& batch : plan.batches) {
    if (batch.members.size() > static_cast<std::size_t>(kBatchMaxBoxes))
      violations.push_back({batch.batch_id,
                            "batch size " + std::to_string(batch.members.size()) + " > " +
                                std::to_string(kBatchMaxBoxes)});
    auto seed_it = by_id.find(batch.seed_box);
    if (seed_it == by_id.end()) {
      violations.push_back({batch.batch_id, "unknown seed box " + batch.seed_box});
      continue;
    }
    for (const auto& member : batch.members) {
      seen[member] += 1;
      auto it = by_id.find(member);
      if (it == by_id.end()) {
        violations.push_back({batch.batch_id, "unknown member " + member});
        continue;
      }
      double d = haversine_km(*seed_it->second, *it->second);
      if (d > kBatchRadiusKm)
        violations.push_back({batch.batch_id, "member " + member + " at " +
                                                  std::to_string(d) + " km from seed"});
    }
  }
  for (const auto& b : boxes) {
    auto it = seen.find(b.id);
    if (it == seen.end())
      violations.push_back({"", "unassigned box " + b.id});
    else if (it->second > 1)
      violations.push_back({"", "box " + b.id + " in " + std::to_string(it->second) + " batches"});
  }
  return violations;
}

}  // namespace owt
