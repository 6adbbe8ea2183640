// Synthetic data generators for tests, benchmarks and demos: single profiles
// with known signatures, full deployment series with ground-truth labels,
// clustered detection points, and CSV corpora with controlled missingness.
//
// Signal constants are tuned against the default classifier thresholds with
// several noise sigmas of margin: a turbine bump smooths to ~10 dB centre
// prominence (threshold 8) and ~6.7 dB side prominence (threshold 4) while
// keeping the raw range under 18 dB so the mooring rule stays quiet.
#pragma once

#include <cmath>
#include <cstddef>
#include <cstdio>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "owt/core.hpp"
#include "owt/rng.hpp"

namespace owt {

inline constexpr double kFixtureFloorDb = -22.0;
inline constexpr double kFixtureNoiseSigma = 0.35;

namespace detail {

inline std::vector<double> noise_floor(Rng& rng, std::size_t len) {
  std::vector<double> v(len);
  for (double& x : v) x = rng.normal(kFixtureFloorDb, kFixtureNoiseSigma);
  return v;
}

inline void add_bump(std::vector<double>& v, double centre, double amp, double sigma) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    double d = static_cast<double>(i) - centre;
    v[i] += amp * std::exp(-d * d / (2.0 * sigma * sigma));
  }
}

}  // namespace detail

// Flat sea clutter.
inline std::vector<double> make_water_profile(Rng& rng, std::size_t len = 31) {
  return detail::noise_floor(rng, len);
}

// Narrow centre return without a layover echo.
inline std::vector<double> make_foundation_profile(Rng& rng, std::size_t len = 31) {
  auto v = detail::noise_floor(rng, len);
  detail::add_bump(v, (static_cast<double>(len) - 1.0) / 2.0, 12.0, 1.5);
  return v;
}

// Centre return plus a layover echo 11 bins to the orbit side. The wide
// separation keeps the inter-peak valley low so the echo keeps its full
// contour prominence.
inline std::vector<double> make_turbine_profile(Rng& rng, OrbitDirection orbit,
                                                std::size_t len = 31) {
  auto v = detail::noise_floor(rng, len);
  double centre = (static_cast<double>(len) - 1.0) / 2.0;
  double side = orbit == OrbitDirection::Descending ? centre + 11.0 : centre - 11.0;
  detail::add_bump(v, centre, 15.0, 1.8);
  detail::add_bump(v, side, 15.5, 1.0);
  return v;
}

// One strong off-centre return, side chosen at random. Offsets stay a few
// bins away from the profile edge so the peak keeps its prominence.
inline std::vector<double> make_vessel_profile(Rng& rng, std::size_t len = 31) {
  auto v = detail::noise_floor(rng, len);
  double centre = (static_cast<double>(len) - 1.0) / 2.0;
  double offset = 7.0 + static_cast<double>(rng.bounded(3));
  if (rng.chance(0.5)) offset = -offset;
  detail::add_bump(v, centre + offset, 14.0, 1.2);
  return v;
}

// Broad low mound, the construction-activity signature.
inline std::vector<double> make_mooring_profile(Rng& rng, std::size_t len = 31) {
  auto v = detail::noise_floor(rng, len);
  detail::add_bump(v, (static_cast<double>(len) - 1.0) / 2.0, 10.0, 4.0);
  return v;
}

struct DeploymentFixtureOptions {
  std::size_t profile_len = 31;
  std::size_t water_events = 0;       // 0 means draw from [15, 40]
  std::size_t foundation_events = 0;  // ditto
  std::size_t turbine_events = 0;     // ditto
  Date start = Date::from_ymd(2016, 1, 1);
  double vessel_rate = 0.0;  // per-event chance of a vessel spike replacing the scene
};

struct DeploymentFixture {
  TimeSeries series;
  std::vector<EventLabel> truth;  // aligned with series.events
};

// Water, then foundation, then turbine phase, with dates advancing 5-7 days
// and orbits alternating. With vessel_rate > 0 individual events are replaced
// by vessel scenes (truth marks them Vessel).
inline DeploymentFixture make_deployment_series(Rng& rng, const std::string& box_id,
                                                const DeploymentFixtureOptions& opt = {}) {
  auto phase_len = [&rng](std::size_t requested) {
    return requested ? requested : 15 + static_cast<std::size_t>(rng.bounded(26));
  };
  std::size_t n_w = phase_len(opt.water_events);
  std::size_t n_f = phase_len(opt.foundation_events);
  std::size_t n_t = phase_len(opt.turbine_events);

  DeploymentFixture fx;
  fx.series.box_id = box_id;
  Date d = opt.start;
  std::size_t total = n_w + n_f + n_t;
  for (std::size_t i = 0; i < total; ++i) {
    OrbitDirection orbit = (i % 2 == 0) ? OrbitDirection::Ascending : OrbitDirection::Descending;
    EventLabel truth;
    std::vector<double> values;
    if (opt.vessel_rate > 0.0 && rng.chance(opt.vessel_rate)) {
      truth = EventLabel::Vessel;
      values = make_vessel_profile(rng, opt.profile_len);
    } else if (i < n_w) {
      truth = EventLabel::Water;
      values = make_water_profile(rng, opt.profile_len);
    } else if (i < n_w + n_f) {
      truth = EventLabel::TurbineFoundation;
      values = make_foundation_profile(rng, opt.profile_len);
    } else {
      truth = EventLabel::DeployedTurbine;
      values = make_turbine_profile(rng, orbit, opt.profile_len);
    }
    fx.series.events.push_back(BackscatterProfile{box_id, d, orbit, std::move(values)});
    fx.truth.push_back(truth);
    d.days += 5 + static_cast<int>(rng.bounded(3));
  }
  return fx;
}

// Points scattered around a set of hotspot centres, for batch-planner tests.
// Spread is roughly spread_km around each centre; ids are "box-NNNNN".
inline std::vector<DetectionPoint> make_hotspot_points(Rng& rng, std::size_t n,
                                                       std::size_t hotspots,
                                                       double spread_km = 20.0) {
  std::vector<std::pair<double, double>> centres;
  centres.reserve(hotspots);
  for (std::size_t h = 0; h < hotspots; ++h)
    centres.emplace_back(-10.0 + 40.0 * rng.real01(), 30.0 + 30.0 * rng.real01());
  std::vector<DetectionPoint> pts;
  pts.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& [clon, clat] = centres[rng.bounded(hotspots)];
    double dlat = spread_km / 111.32;
    double dlon = dlat / std::cos(clat * 3.14159265358979323846 / 180.0);
    char id[16];
    std::snprintf(id, sizeof id, "box-%05zu", i);
    pts.push_back(DetectionPoint{id, clon + rng.normal(0.0, dlon / 2.0),
                                 clat + rng.normal(0.0, dlat / 2.0)});
  }
  return pts;
}

// Raw export CSV with per-value missingness. Writes n_profiles complete
// grids of profile_len rows each; every max_value field independently goes
// missing (empty field) with probability missing_rate. Values are noise, the
// content does not matter for ingest tests. Returns the number of profiles
// whose rows are all present, counted while writing.
inline std::size_t write_synthetic_csv(std::ostream& out, Rng& rng, std::size_t n_profiles,
                                       std::size_t profile_len, double missing_rate) {
  out << "box_id,column_id,max_value,img_date,orbit_direction\n";
  std::size_t complete = 0;
  Date base = Date::from_ymd(2017, 1, 1);
  char buf[64];
  for (std::size_t p = 0; p < n_profiles; ++p) {
    std::snprintf(buf, sizeof buf, "box-%06zu", p / 16);
    Date d{base.days + static_cast<int>(p % 16) * 6};
    const char* orbit = (p % 2 == 0) ? "ASCENDING" : "DESCENDING";
    bool all_present = true;
    for (std::size_t c = 0; c < profile_len; ++c) {
      bool missing = rng.chance(missing_rate);
      if (missing) all_present = false;
      out << buf << ',' << c << ',';
      if (!missing) out << rng.normal(kFixtureFloorDb, kFixtureNoiseSigma);
      out << ',' << d.to_string() << ',' << orbit << "\n";
    }
    if (all_present) ++complete;
  }
  return complete;
}

}  // namespace owt
