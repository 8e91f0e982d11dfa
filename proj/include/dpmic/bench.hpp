#pragma once

// Synthetic benchmark: the 21 functional relationships, noisy mixture
// distributions calibrated to a target R^2, a large-sample oracle for the
// distributional statistic, and the WSUM tuning objective.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "dpmic/grid.hpp"
#include "dpmic/info.hpp"
#include "dpmic/rng.hpp"

namespace dpmic {

constexpr int kNumBenchFunctions = 21;

// f_id(x) on [0, 1], ids 1..21.
inline double bench_eval(int id, double x) {
  if (x < 0.0 || x > 1.0)
    throw std::invalid_argument("bench_eval: x outside [0, 1]");
  switch (id) {
    case 1:  return 0.2 * std::sin(12.0 * x - 6.0) + 1.1 * (x - 1.0) + 1.0;
    case 2:  return 0.15 * std::sin(11.0 * x * M_PI) + (x + 0.05);
    case 3:  return 0.1 * std::sin(48.0 * x) + 2.0 * (x - 0.05);
    case 4:  return 0.2 * std::sin(48.0 * x) + 2.0 * (x - 0.05);
    case 5:  return 0.4 * std::cos(7.0 * x * M_PI) + 0.5;
    case 6:  return 0.4 * std::cos(14.0 * x * M_PI) + 0.5;
    case 7:  return 10.0 * std::pow(x - 0.6, 3.0) + 2.0 * x * x + (1.5 - 3.0 * x);
    case 8:  return 4.0 * (10.0 * std::pow(x - 0.6, 3.0) + 2.0 * x * x +
                           (1.5 - 3.0 * x)) - 1.4;
    case 9:  return x <= 0.99 ? x / 99.0 : 99.0 * x - 98.0;
    case 10: return std::pow(2.0, x) - 1.0;
    case 11: return std::pow(8.0, x - 0.3) - 1.0;
    case 12: return x;
    case 13: return 4.0 * (x - 0.5) * (x - 0.5) + 0.1;
    case 14: return 0.4 * std::sin(9.0 * x * M_PI) + 0.5;
    case 15: return 0.4 * std::sin(8.0 * x * M_PI) + 0.5;
    case 16: return 0.4 * std::sin(16.0 * x * M_PI) + 0.5;
    case 17:
      if (x < 0.491) return 0.05;
      if (x > 0.509) return 0.95;
      return 50.0 * (x - 0.5) + 0.5;
    case 18: return 0.4 * std::cos(5.0 * x * M_PI * (1.0 + x)) + 0.5;
    case 19: return 0.4 * std::sin(6.0 * x * M_PI * (1.0 + x)) + 0.5;
    case 20:
      if (x <= 0.0528) return 18.0 * x;
      if (x >= 0.1) return -x / 9.0 + 1.0 / 9.0;
      return -18.0 * x + 1.9;
    case 21:
      if (x <= 0.0051) return 190.0 * x;
      if (x >= 0.01) return -x / 99.0 + 1.0 / 99.0;
      return -198.0 * x + 1.99;
    default:
      throw std::invalid_argument("bench_eval: unknown function id " +
                                  std::to_string(id));
  }
}

// 100-center Gaussian mixture along the graph of f_id, with per-axis noise
// sigma. Samples are clamped into `bounds`.
struct NoisyDistribution {
  int function_id = 0;
  double r_squared = 1.0;
  std::vector<Point> centers;  // 100 points on the graph, x evenly spaced
  double sigma = 0.0;
  RangeBounds bounds;
};

constexpr std::size_t kMixtureCenters = 100;
constexpr std::uint64_t kCalibrationSeed = 0x5ca1ab1e0000001ULL;
constexpr std::size_t kCalibrationSampleSize = 1'000'000;

namespace bench_detail {

inline std::vector<Point> make_centers(int id) {
  std::vector<Point> c(kMixtureCenters);
  for (std::size_t i = 0; i < kMixtureCenters; ++i) {
    const double x = static_cast<double>(i) / (kMixtureCenters - 1);
    c[i] = {x, bench_eval(id, x)};
  }
  return c;
}

// Bounds enclose [0, 1] on x and the function's y-range unioned with [0, 1].
inline RangeBounds graph_bounds(int id) {
  double ylo = 0.0, yhi = 1.0;
  for (int i = 0; i <= 2000; ++i) {
    const double y = bench_eval(id, i / 2000.0);
    ylo = std::min(ylo, y);
    yhi = std::max(yhi, y);
  }
  return RangeBounds(0.0, 1.0, ylo, yhi);
}

}  // namespace bench_detail

inline Dataset sample(const NoisyDistribution& dist, std::size_t n, Rng& rng) {
  if (n < 1) throw std::invalid_argument("sample: need n >= 1");
  std::vector<Point> pts(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Point& c = dist.centers[rng.uniform_index(dist.centers.size())];
    double x = c.x, y = c.y;
    if (dist.sigma > 0.0) {
      x += dist.sigma * rng.normal();
      y += dist.sigma * rng.normal();
    }
    x = std::clamp(x, dist.bounds.x_lo, dist.bounds.x_hi);
    y = std::clamp(y, dist.bounds.y_lo, dist.bounds.y_hi);
    pts[i] = {x, y};
  }
  return Dataset(std::move(pts), dist.bounds);
}

namespace bench_detail {

// Empirical R^2 of y against f(x) on a calibration sample.
inline double empirical_r2(const NoisyDistribution& dist, std::size_t n,
                           std::uint64_t seed) {
  Rng rng(seed);
  const Dataset d = sample(dist, n, rng);
  double ybar = 0.0;
  for (const Point& p : d.points) ybar += p.y;
  ybar /= static_cast<double>(n);
  double ss_res = 0.0, ss_tot = 0.0;
  for (const Point& p : d.points) {
    const double fx = bench_eval(dist.function_id, p.x);
    ss_res += (p.y - fx) * (p.y - fx);
    ss_tot += (p.y - ybar) * (p.y - ybar);
  }
  if (ss_tot <= 0.0) return 1.0;
  return 1.0 - ss_res / ss_tot;
}

}  // namespace bench_detail

// Builds the distribution for (function, target R^2), calibrating sigma by
// bisection of the empirical R^2 on a fixed-seed calibration sample.
// sigma_hint, when nonnegative, skips the calibration (e.g. from a cached
// registry).
inline NoisyDistribution make_distribution(int id, double r_squared,
                                           double sigma_hint = -1.0) {
  if (!(r_squared > 0.0 && r_squared <= 1.0))
    throw std::invalid_argument("make_distribution: r_squared must be in (0, 1]");
  NoisyDistribution dist;
  dist.function_id = id;
  dist.r_squared = r_squared;
  dist.centers = bench_detail::make_centers(id);
  dist.bounds = bench_detail::graph_bounds(id);
  if (r_squared == 1.0) {
    dist.sigma = 0.0;
    return dist;
  }
  if (sigma_hint >= 0.0) {
    dist.sigma = sigma_hint;
    return dist;
  }
  const std::uint64_t seed =
      mix_keys(kCalibrationSeed, {static_cast<std::uint64_t>(id),
                                  static_cast<std::uint64_t>(std::llround(r_squared * 1000))});
  double lo = 0.0, hi = 0.05;
  dist.sigma = hi;
  while (bench_detail::empirical_r2(dist, kCalibrationSampleSize, seed) >
         r_squared) {
    lo = hi;
    hi *= 2.0;
    dist.sigma = hi;
    if (hi > 1e3)
      throw std::runtime_error("make_distribution: R^2 target unreachable");
  }
  for (int iter = 0; iter < 60; ++iter) {
    const double mid = 0.5 * (lo + hi);
    dist.sigma = mid;
    const double r2 = bench_detail::empirical_r2(dist, kCalibrationSampleSize, seed);
    if (std::abs(r2 - r_squared) <= 0.002) break;
    if (r2 > r_squared)
      lo = mid;
    else
      hi = mid;
  }
  return dist;
}

struct MicStarEstimate {
  double value = 0.0;
  std::size_t master_rows = 0;  // dense row master size used
  std::size_t master_cols = 0;  // fixed column marginal size used
};

constexpr std::size_t kMicStarSampleSize = 1'000'000;
constexpr std::uint64_t kMicStarSeed = 0x0c0ffee000000002ULL;

// Large-sample surrogate for the distributional optimum: mass-equipartition
// the sample into a dense fixed column marginal and a dense row master, run
// the axis optimizer for every k, normalize, and take the best of both axis
// orientations.
inline MicStarEstimate mic_star_from_sample(const std::vector<double>& xs,
                                            const std::vector<double>& ys,
                                            std::size_t master_rows = 260,
                                            std::size_t master_cols = 360) {
  auto one_side = [&](const std::vector<double>& cols,
                      const std::vector<double>& rows) {
    const std::vector<int> cc = mass_equipartition_cells(cols, master_cols);
    const std::vector<int> rc = mass_equipartition_cells(rows, master_rows);
    CountMatrix counts(master_rows, master_cols);
    for (std::size_t i = 0; i < cc.size(); ++i)
      ++counts.at(static_cast<std::size_t>(rc[i]), static_cast<std::size_t>(cc[i]));
    counts.total = static_cast<std::int64_t>(cc.size());
    const AxisOptimum opt = optimize_axis(counts, master_rows);
    double best = 0.0;
    for (const auto& [k, bits] : opt.per_k) {
      const double denom = std::log2(static_cast<double>(std::min(k, master_cols)));
      best = std::max(best, bits / denom);
    }
    return best;
  };

  MicStarEstimate est;
  est.master_rows = master_rows;
  est.master_cols = master_cols;
  est.value = std::max(one_side(xs, ys), one_side(ys, xs));
  return est;
}

inline MicStarEstimate mic_star(const NoisyDistribution& dist,
                                std::size_t master_rows = 260,
                                std::size_t master_cols = 360) {
  Rng rng(mix_keys(
      kMicStarSeed,
      {static_cast<std::uint64_t>(dist.function_id),
       static_cast<std::uint64_t>(std::llround(dist.r_squared * 1000))}));
  const Dataset d = sample(dist, kMicStarSampleSize, rng);
  return mic_star_from_sample(d.xs(), d.ys(), master_rows, master_cols);
}

// WSUM: MIC*-weighted average of per-distribution mean unsigned errors.
// `mic_star_values` must be sorted ascending; weights come from midpoints
// of adjacent MIC* values with endpoints 0 and 1.
inline double wsum_objective(const std::vector<double>& mic_star_values,
                             const std::vector<double>& avg_unsigned_errors) {
  const std::size_t m = mic_star_values.size();
  if (m == 0 || avg_unsigned_errors.size() != m)
    throw std::invalid_argument("wsum_objective: size mismatch or empty");
  if (!std::is_sorted(mic_star_values.begin(), mic_star_values.end()))
    throw std::invalid_argument("wsum_objective: MIC* values must be sorted");
  double obj = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double left =
        i == 0 ? 0.0 : 0.5 * (mic_star_values[i - 1] + mic_star_values[i]);
    const double right =
        i + 1 == m ? 1.0 : 0.5 * (mic_star_values[i] + mic_star_values[i + 1]);
    obj += (right - left) * avg_unsigned_errors[i];
  }
  return obj;
}

inline std::vector<double> wsum_weights(const std::vector<double>& sorted_mic_star) {
  std::vector<double> w(sorted_mic_star.size());
  const std::size_t m = w.size();
  for (std::size_t i = 0; i < m; ++i) {
    const double left =
        i == 0 ? 0.0 : 0.5 * (sorted_mic_star[i - 1] + sorted_mic_star[i]);
    const double right =
        i + 1 == m ? 1.0 : 0.5 * (sorted_mic_star[i] + sorted_mic_star[i + 1]);
    w[i] = right - left;
  }
  return w;
}

}  // namespace dpmic
