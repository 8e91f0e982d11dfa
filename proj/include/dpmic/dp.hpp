#pragma once

// Sensitivity bounds, truncated-geometric noise, and the three private
// mechanisms MICe-Lap, MICr-Lap and MICr-Geom.
//
// Note: the Laplace sampler works in double precision; floating-point DP
// side channels (Mironov 2012) are a known caveat and out of scope here.

#include <cmath>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "dpmic/grid.hpp"
#include "dpmic/info.hpp"
#include "dpmic/mic.hpp"
#include "dpmic/rng.hpp"

namespace dpmic {

struct PrivacyParams {
  double epsilon = 1.0;
  std::uint64_t rng_seed = 0;

  void validate() const {
    if (!(epsilon > 0.0))
      throw std::invalid_argument("PrivacyParams: epsilon must be > 0");
  }
};

// Sensitivity upper bound for MICe: B * ((2 log2 n)/n + 4.8/n), n >= 6.
inline double mice_sensitivity(std::int64_t n, std::int64_t B) {
  if (n < 6) throw std::invalid_argument("mice_sensitivity: need n >= 6");
  if (B < 1) throw std::invalid_argument("mice_sensitivity: need B >= 1");
  const double dn = static_cast<double>(n);
  return static_cast<double>(B) * (2.0 * std::log2(dn) / dn + 4.8 / dn);
}

// Sensitivity upper bound for MICr: (4 log2 n)/n + 6/n, n >= 4.
// Independent of B, c, and L.
inline double micr_sensitivity(std::int64_t n) {
  if (n < 4) throw std::invalid_argument("micr_sensitivity: need n >= 4");
  const double dn = static_cast<double>(n);
  return 4.0 * std::log2(dn) / dn + 6.0 / dn;
}

inline double clamp01(double v) { return v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v); }

// Output perturbation: value + Lap(delta/eps), truncated to [0, 1].
inline double laplace_mechanism(double value, double delta, double epsilon,
                                Rng& rng) {
  return clamp01(value + laplace_sample(delta / epsilon, rng));
}

// Truncated two-sided geometric distribution over {0, ..., n}, centered at
// the count f, with rho = e^{-epsilon}. The pmf is the exact closed form;
// sampling is inverse-CDF over a precomputed cumulative table.
struct TruncGeomDist {
  double epsilon = 0.0;
  std::int64_t n = 0;
  std::int64_t f = 0;
  std::vector<double> pmf;
  std::vector<double> cdf;

  TruncGeomDist(double eps, std::int64_t n_, std::int64_t f_)
      : epsilon(eps), n(n_), f(f_) {
    if (!(eps > 0.0)) throw std::invalid_argument("TruncGeom: epsilon must be > 0");
    if (n < 0 || f < 0 || f > n)
      throw std::invalid_argument("TruncGeom: need 0 <= f <= n");
    const double rho = std::exp(-eps);
    pmf.resize(static_cast<std::size_t>(n) + 1);
    const double mid = (1.0 - rho) / (1.0 + rho);
    for (std::int64_t i = 0; i <= n; ++i)
      pmf[static_cast<std::size_t>(i)] =
          mid * std::pow(rho, static_cast<double>(std::llabs(f - i)));
    pmf.front() = std::pow(rho, static_cast<double>(f)) / (1.0 + rho);
    pmf.back() = std::pow(rho, static_cast<double>(n - f)) / (1.0 + rho);
    cdf.resize(pmf.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < pmf.size(); ++i) {
      acc += pmf[i];
      cdf[i] = acc;
    }
  }
};

inline std::int64_t truncgeom_sample(const TruncGeomDist& dist, Rng& rng) {
  const double u = rng.uniform01();
  const auto it = std::upper_bound(dist.cdf.begin(), dist.cdf.end(), u);
  const std::size_t i = std::min<std::size_t>(
      static_cast<std::size_t>(it - dist.cdf.begin()), dist.cdf.size() - 1);
  return static_cast<std::int64_t>(i);
}

// MICe-Lap: [MICe(D, B, c) + Lap(Delta/eps)]_{0,1} with Delta from Thm-1-
// style bound above.
inline double mice_lap(const Dataset& d, const EstimatorParams& params,
                       const PrivacyParams& priv) {
  priv.validate();
  const double base = mice(d, params).value;
  const double delta = mice_sensitivity(static_cast<std::int64_t>(d.n()), params.B);
  Rng rng = Rng::substream(priv.rng_seed, {0x6d696365ULL});
  return laplace_mechanism(base, delta, priv.epsilon, rng);
}

// MICr-Lap: as above with the B-free MICr sensitivity.
inline double micr_lap(const Dataset& d, const RangeBounds& bounds,
                       const EstimatorParams& params, const PrivacyParams& priv) {
  priv.validate();
  const double base = micr(d, bounds, params).value;
  const double delta = micr_sensitivity(static_cast<std::int64_t>(d.n()));
  Rng rng = Rng::substream(priv.rng_seed, {0x6d696372ULL});
  return laplace_mechanism(base, delta, priv.epsilon, rng);
}

struct GeomResult {
  double value = 0.0;
  bool degenerate = false;  // some master's noisy counts summed to zero
  CharacteristicMatrix cm;
};

// MICr-Geom: input perturbation. For each master range-equipartition grid,
// every count is replaced by a TruncGeom(eps/2, n, count) draw; the noisy
// normalized matrix is shared by all k that use that master, and the usual
// axis optimization runs on it. Noise substreams are keyed by
// (axis, l, i, j) so evaluation order never changes the output.
inline GeomResult micr_geom(const Dataset& d, const RangeBounds& bounds,
                            const EstimatorParams& params,
                            const PrivacyParams& priv) {
  params.validate();
  priv.validate();
  const std::size_t n = d.n();
  for (std::size_t i = 0; i < n; ++i)
    if (!bounds.contains(d.points[i]))
      throw std::invalid_argument("micr_geom: point " + std::to_string(i) +
                                  " outside bounds L");
  const double noise_eps = priv.epsilon / 2.0;
  const std::int64_t in = static_cast<std::int64_t>(n);

  // TruncGeom tables are O(n) to build; counts repeat heavily across cells,
  // so cache one table per distinct center.
  std::unordered_map<std::int64_t, std::unique_ptr<TruncGeomDist>> tables;
  auto table_for = [&](std::int64_t f) -> const TruncGeomDist& {
    auto it = tables.find(f);
    if (it == tables.end())
      it = tables.emplace(f, std::make_unique<TruncGeomDist>(noise_eps, in, f)).first;
    return *it->second;
  };

  GeomResult res;
  const std::vector<double> xs = d.xs();
  const std::vector<double> ys = d.ys();

  auto run_side = [&](const std::vector<double>& cvals, double clo, double chi,
                      const std::vector<double>& rvals, double rlo, double rhi,
                      bool diag, bool swapped, std::uint64_t axis_tag) {
    const std::size_t l_hi = static_cast<std::size_t>(params.B / 2);
    for (std::size_t l = 2; l <= l_hi; ++l) {
      std::size_t k_cap = std::min<std::size_t>(
          l, static_cast<std::size_t>(params.B / static_cast<std::int64_t>(l)));
      if (k_cap < 2) continue;
      std::size_t m = detail::master_row_size(params, l);
      if (m < k_cap) {
        if (params.c < 1.0)
          throw std::invalid_argument(
              "EstimatorParams: c < 1 makes the master smaller than k");
        m = k_cap;
      }
      const AxisPartition colp = range_equipartition(clo, chi, l);
      const AxisPartition rowp = range_equipartition(rlo, rhi, m);
      CountMatrix counts(m, l);
      for (std::size_t i = 0; i < n; ++i) {
        const int ci = colp.cell_of(cvals[i]);
        const int ri = rowp.cell_of(rvals[i]);
        if (ci < 0 || ri < 0)
          throw std::invalid_argument("micr_geom: point outside bounds L");
        ++counts.at(static_cast<std::size_t>(ri), static_cast<std::size_t>(ci));
      }
      std::vector<double> noisy(m * l);
      double nhat = 0.0;
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < l; ++j) {
          Rng cell_rng = Rng::substream(priv.rng_seed, {axis_tag, l, i, j});
          const std::int64_t v =
              truncgeom_sample(table_for(counts.at(i, j)), cell_rng);
          noisy[i * l + j] = static_cast<double>(v);
          nhat += static_cast<double>(v);
        }
      if (nhat <= 0.0) {
        res.degenerate = true;
        for (std::size_t k = 2; k <= k_cap; ++k) {
          if (!diag && k == l) continue;
          auto key = swapped ? std::make_pair(l, k) : std::make_pair(k, l);
          res.cm.entries[key] = 0.0;
        }
        continue;
      }
      const NormalizedMatrix nm = NormalizedMatrix::from_weights(m, l, noisy);
      const AxisOptimum opt = optimize_axis(nm, k_cap);
      for (std::size_t k = 2; k <= k_cap; ++k) {
        if (!diag && k == l) continue;
        const double v =
            std::min(1.0, opt.per_k.at(k) / std::log2(static_cast<double>(k)));
        auto key = swapped ? std::make_pair(l, k) : std::make_pair(k, l);
        res.cm.entries[key] = v;
      }
    }
  };
  run_side(xs, bounds.x_lo, bounds.x_hi, ys, bounds.y_lo, bounds.y_hi, true,
           false, 1);
  run_side(ys, bounds.y_lo, bounds.y_hi, xs, bounds.x_lo, bounds.x_hi, false,
           true, 2);
  if (res.cm.entries.empty())
    throw std::runtime_error("micr_geom: no computable characteristic entries");
  res.value = std::get<2>(res.cm.max_entry());
  return res;
}

}  // namespace dpmic
