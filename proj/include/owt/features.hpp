// Per-profile statistics and peak structure. Peaks are detected on a
// Gaussian-smoothed copy of the profile and mapped back to raw bins; the
// orbit direction decides which neighbour of the centre peak counts as the
// layover side peak.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "owt/core.hpp"

namespace owt {

struct FeatureConfig {
  double sigma = 2.0;            // smoothing width in bins
  int min_distance = 5;          // minimum gap between reported peaks, bins
  double min_prominence = 2.0;   // dB, on the smoothed profile
};

struct Peak {
  int index = 0;           // bin in the unsmoothed profile
  double amplitude = 0.0;  // raw dB at that bin
  double prominence = 0.0; // dB, measured on the smoothed profile
  double width = 0.0;      // bins at half prominence, on the smoothed profile
};

struct ProfileFeatures {
  std::size_t len = 0;
  double mean = 0.0;   // population statistics over raw bins
  double stddev = 0.0;
  double range = 0.0;  // raw max - min
  std::vector<Peak> peaks;  // sorted by index
  std::optional<Peak> centre_peak;
  std::optional<Peak> side_peak;
};

// Reusable buffers for the per-profile hot path.
struct FeatureScratch {
  std::vector<double> kernel;
  double kernel_sigma = -1.0;
  std::vector<double> smoothed;
};

namespace detail {

// Reflected index in [0, n): ...cba|abc...z|zyx...
inline std::size_t reflect_index(long i, long n) {
  while (i < 0 || i >= n) {
    if (i < 0) i = -i - 1;
    if (i >= n) i = 2 * n - 1 - i;
  }
  return static_cast<std::size_t>(i);
}

inline void build_gauss_kernel(double sigma, std::vector<double>& kernel) {
  long radius = static_cast<long>(std::ceil(4.0 * sigma));
  kernel.assign(static_cast<std::size_t>(2 * radius + 1), 0.0);
  double sum = 0.0;
  for (long j = -radius; j <= radius; ++j) {
    double w = std::exp(-static_cast<double>(j * j) / (2.0 * sigma * sigma));
    kernel[static_cast<std::size_t>(j + radius)] = w;
    sum += w;
  }
  for (double& w : kernel) w /= sum;
}

}  // namespace detail

// Discrete Gaussian smoothing, kernel truncated at 4 sigma, reflected edges.
// The kernel sums to one, so constant profiles pass through unchanged.
inline std::vector<double> gaussian_smooth(const std::vector<double>& values, double sigma) {
  if (sigma <= 0.0) throw Error(Errc::InvalidArgument, "gaussian_smooth: sigma must be > 0");
  if (values.empty()) throw Error(Errc::InvalidArgument, "gaussian_smooth: empty input");
  std::vector<double> kernel;
  detail::build_gauss_kernel(sigma, kernel);
  long radius = (static_cast<long>(kernel.size()) - 1) / 2;
  long n = static_cast<long>(values.size());
  std::vector<double> out(values.size());
  for (long i = 0; i < n; ++i) {
    double acc = 0.0;
    for (long j = -radius; j <= radius; ++j)
      acc += kernel[static_cast<std::size_t>(j + radius)] *
             values[detail::reflect_index(i + j, n)];
    out[static_cast<std::size_t>(i)] = acc;
  }
  return out;
}

namespace detail {

struct SmoothedPeak {
  int idx;          // index on the smoothed profile
  double height;    // smoothed value
  double prominence;
  int left_base;
  int right_base;
};

// Standard contour prominence: the window around a peak extends to the
// nearest strictly higher sample on each side (or the end of the sequence);
// the bases are the minima inside those stretches, and prominence is the
// height above the higher base.
inline void measure_prominence(const std::vector<double>& s, SmoothedPeak& p) {
  long n = static_cast<long>(s.size());
  double h = s[static_cast<std::size_t>(p.idx)];

  double left_min = h;
  int left_base = p.idx;
  for (long i = p.idx - 1; i >= 0; --i) {
    double v = s[static_cast<std::size_t>(i)];
    if (v > h) break;
    if (v < left_min) {
      left_min = v;
      left_base = static_cast<int>(i);
    }
  }
  double right_min = h;
  int right_base = p.idx;
  for (long i = p.idx + 1; i < n; ++i) {
    double v = s[static_cast<std::size_t>(i)];
    if (v > h) break;
    if (v < right_min) {
      right_min = v;
      right_base = static_cast<int>(i);
    }
  }
  p.prominence = h - std::max(left_min, right_min);
  p.left_base = left_base;
  p.right_base = right_base;
}

// Width at half prominence, with linear interpolation at the crossings,
// clipped to the prominence window.
inline double measure_width(const std::vector<double>& s, const SmoothedPeak& p) {
  double h = s[static_cast<std::size_t>(p.idx)] - 0.5 * p.prominence;
  double left_ip = static_cast<double>(p.left_base);
  for (int i = p.idx; i > p.left_base; --i) {
    double v = s[static_cast<std::size_t>(i - 1)];
    if (v <= h) {
      left_ip = (i - 1) + (h - v) / (s[static_cast<std::size_t>(i)] - v);
      break;
    }
  }
  double right_ip = static_cast<double>(p.right_base);
  for (int i = p.idx; i < p.right_base; ++i) {
    double v = s[static_cast<std::size_t>(i + 1)];
    if (v <= h) {
      right_ip = (i + 1) - (h - v) / (s[static_cast<std::size_t>(i)] - v);
      break;
    }
  }
  return right_ip - left_ip;
}

}  // namespace detail

// Peak detection contract:
//   1. local maxima of the smoothed profile are candidates (plateaus count
//      once, at the plateau midpoint; the first and last bins never qualify);
//   2. candidates below min_prominence (contour definition, smoothed) drop;
//   3. surviving candidates are mapped back to the raw profile: the raw
//      argmax within +-round(sigma) bins of the smoothed position (ties to
//      the lower index); candidates mapping to one raw bin merge, keeping the
//      higher smoothed candidate;
//   4. the minimum inter-peak distance is enforced on the mapped indices,
//      greedily by descending raw amplitude (ties to the lower index).
// Reported amplitude is raw; prominence and width stay as measured on the
// smoothed profile.
inline std::vector<Peak> detect_peaks(const std::vector<double>& values,
                                      const FeatureConfig& cfg = {},
                                      FeatureScratch* scratch = nullptr) {
  if (values.size() < 7)
    throw Error(Errc::InvalidArgument, "detect_peaks: profile shorter than 7 bins");
  if (cfg.sigma <= 0.0) throw Error(Errc::InvalidArgument, "detect_peaks: sigma must be > 0");

  FeatureScratch local;
  FeatureScratch& sc = scratch ? *scratch : local;
  if (sc.kernel_sigma != cfg.sigma) {
    detail::build_gauss_kernel(cfg.sigma, sc.kernel);
    sc.kernel_sigma = cfg.sigma;
  }
  long radius = (static_cast<long>(sc.kernel.size()) - 1) / 2;
  long n = static_cast<long>(values.size());
  sc.smoothed.resize(values.size());
  for (long i = 0; i < n; ++i) {
    double acc = 0.0;
    for (long j = -radius; j <= radius; ++j)
      acc += sc.kernel[static_cast<std::size_t>(j + radius)] *
             values[detail::reflect_index(i + j, n)];
    sc.smoothed[static_cast<std::size_t>(i)] = acc;
  }
  const std::vector<double>& s = sc.smoothed;

  // Local maxima with plateau handling.
  std::vector<detail::SmoothedPeak> candidates;
  long i = 1;
  while (i < n - 1) {
    if (s[static_cast<std::size_t>(i)] > s[static_cast<std::size_t>(i - 1)]) {
      long ahead = i + 1;
      while (ahead < n - 1 && s[static_cast<std::size_t>(ahead)] == s[static_cast<std::size_t>(i)])
        ++ahead;
      if (s[static_cast<std::size_t>(ahead)] < s[static_cast<std::size_t>(i)]) {
        detail::SmoothedPeak p{};
        p.idx = static_cast<int>((i + ahead - 1) / 2);
        p.height = s[static_cast<std::size_t>(p.idx)];
        candidates.push_back(p);
      }
      i = ahead;
    } else {
      ++i;
    }
  }

  // Prominence filter on the smoothed profile.
  std::vector<detail::SmoothedPeak> prominent;
  for (auto& c : candidates) {
    detail::measure_prominence(s, c);
    if (c.prominence >= cfg.min_prominence) prominent.push_back(c);
  }

  // Map back to raw bins.
  long map_radius = std::lround(cfg.sigma);
  if (map_radius < 1) map_radius = 1;
  struct Mapped {
    int raw_idx;
    double raw_amp;
    detail::SmoothedPeak sp;
  };
  std::vector<Mapped> mapped;
  for (const auto& c : prominent) {
    long lo = std::max<long>(0, c.idx - map_radius);
    long hi = std::min<long>(n - 1, c.idx + map_radius);
    long best = lo;
    for (long k = lo + 1; k <= hi; ++k)
      if (values[static_cast<std::size_t>(k)] > values[static_cast<std::size_t>(best)]) best = k;
    Mapped m{static_cast<int>(best), values[static_cast<std::size_t>(best)], c};
    auto dup = std::find_if(mapped.begin(), mapped.end(),
                            [&](const Mapped& x) { return x.raw_idx == m.raw_idx; });
    if (dup == mapped.end()) {
      mapped.push_back(m);
    } else if (m.sp.height > dup->sp.height ||
               (m.sp.height == dup->sp.height && m.sp.prominence > dup->sp.prominence)) {
      dup->sp = m.sp;
    }
  }

  // Greedy minimum-distance enforcement by descending raw amplitude.
  std::sort(mapped.begin(), mapped.end(), [](const Mapped& a, const Mapped& b) {
    if (a.raw_amp != b.raw_amp) return a.raw_amp > b.raw_amp;
    return a.raw_idx < b.raw_idx;
  });
  std::vector<Mapped> kept;
  for (const auto& m : mapped) {
    bool ok = true;
    for (const auto& k : kept) {
      if (std::abs(k.raw_idx - m.raw_idx) < cfg.min_distance) {
        ok = false;
        break;
      }
    }
    if (ok) kept.push_back(m);
  }
  std::sort(kept.begin(), kept.end(),
            [](const Mapped& a, const Mapped& b) { return a.raw_idx < b.raw_idx; });

  std::vector<Peak> out;
  out.reserve(kept.size());
  for (const auto& m : kept) {
    Peak p;
    p.index = m.raw_idx;
    p.amplitude = m.raw_amp;
    p.prominence = m.sp.prominence;
    p.width = detail::measure_width(s, m.sp);
    out.push_back(p);
  }
  return out;
}

// Centre peak: the detected peak closest to the profile centre (len-1)/2,
// ties to the lower index. Side peak: the immediate neighbour on the layover
// side, which is the next peak at a higher index for descending passes and
// the next at a lower index for ascending passes.
inline std::pair<std::optional<Peak>, std::optional<Peak>> designate_peaks(
    const std::vector<Peak>& peaks, std::size_t profile_len, OrbitDirection orbit) {
  if (peaks.empty()) return {std::nullopt, std::nullopt};
  double centre_pos = (static_cast<double>(profile_len) - 1.0) / 2.0;
  std::size_t best = 0;
  double best_dist = std::abs(peaks[0].index - centre_pos);
  for (std::size_t i = 1; i < peaks.size(); ++i) {
    double d = std::abs(peaks[i].index - centre_pos);
    if (d < best_dist) {
      best_dist = d;
      best = i;
    }
  }
  std::optional<Peak> side;
  if (orbit == OrbitDirection::Descending) {
    if (best + 1 < peaks.size()) side = peaks[best + 1];
  } else {
    if (best > 0) side = peaks[best - 1];
  }
  return {peaks[best], side};
}

inline ProfileFeatures compute_features(const BackscatterProfile& profile,
                                        const FeatureConfig& cfg = {},
                                        FeatureScratch* scratch = nullptr) {
  const auto& v = profile.values;
  if (v.empty()) throw Error(Errc::InvalidArgument, "compute_features: empty profile");

  ProfileFeatures f;
  f.len = v.size();
  double sum = 0.0, vmin = v[0], vmax = v[0];
  for (double x : v) {
    sum += x;
    vmin = std::min(vmin, x);
    vmax = std::max(vmax, x);
  }
  f.mean = sum / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - f.mean) * (x - f.mean);
  f.stddev = std::sqrt(ss / static_cast<double>(v.size()));
  f.range = vmax - vmin;

  if (v.size() >= 7) f.peaks = detect_peaks(v, cfg, scratch);
  auto [centre, side] = designate_peaks(f.peaks, f.len, profile.orbit_direction);
  f.centre_peak = centre;
  f.side_peak = side;
  return f;
}

}  // namespace owt
