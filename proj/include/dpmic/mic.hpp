#pragma once

// The non-private MICe and MICr statistics: equicharacteristic matrices
// built from mass or range equipartition masters, maximized over all
// (k, l) with k*l <= B.

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <utility>

#include "dpmic/grid.hpp"
#include "dpmic/info.hpp"

namespace dpmic {

enum class MasterSizing {
  kFull,     // master row size ceil(c*l) for every l
  kClumped,  // size ceil(c*B/l) once l exceeds sqrt(B); faster, near-identical
};

struct EstimatorParams {
  std::int64_t B = 0;
  double c = 1.0;
  MasterSizing master_sizing = MasterSizing::kClumped;

  void validate() const {
    if (B < 4) throw std::invalid_argument("EstimatorParams: B must be >= 4");
    if (!(c > 0.0)) throw std::invalid_argument("EstimatorParams: c must be > 0");
  }
};

inline std::int64_t b_of(std::int64_t n, double alpha) {
  return static_cast<std::int64_t>(std::floor(std::pow(static_cast<double>(n), alpha)));
}

struct CharacteristicMatrix {
  // (k, l) -> I* value, for all computed pairs with k*l <= B.
  std::map<std::pair<std::size_t, std::size_t>, double> entries;

  // Max entry; ties break toward the lexicographically smallest (k, l).
  std::tuple<std::size_t, std::size_t, double> max_entry() const {
    if (entries.empty())
      throw std::runtime_error("CharacteristicMatrix: no computable entries");
    auto best = entries.begin();
    for (auto it = std::next(entries.begin()); it != entries.end(); ++it)
      if (it->second > best->second) best = it;
    return {best->first.first, best->first.second, best->second};
  }
};

struct MicResult {
  double value = 0.0;
  CharacteristicMatrix cm;
};

namespace detail {

inline std::size_t master_row_size(const EstimatorParams& p, std::size_t l) {
  const double bl = static_cast<double>(p.B);
  double size = p.c * static_cast<double>(l);
  if (p.master_sizing == MasterSizing::kClumped &&
      static_cast<double>(l) > std::sqrt(bl))
    size = p.c * bl / static_cast<double>(l);
  return static_cast<std::size_t>(std::ceil(size));
}

// Shared (k <= l)-side sweep. `cols_of` / `rows_of` produce per-point cell
// indices for a given partition size; `emit` receives (k, l, I*).
inline void characteristic_side(
    std::size_t n, const EstimatorParams& p, bool include_diagonal,
    std::size_t max_cols,
    const std::function<std::vector<int>(std::size_t)>& cols_of,
    const std::function<std::vector<int>(std::size_t)>& rows_of,
    const std::function<void(std::size_t, std::size_t, double)>& emit) {
  const std::size_t l_hi =
      std::min<std::size_t>(static_cast<std::size_t>(p.B / 2), max_cols);
  for (std::size_t l = 2; l <= l_hi; ++l) {
    std::size_t k_cap = std::min<std::size_t>(
        l, static_cast<std::size_t>(p.B / static_cast<std::int64_t>(l)));
    if (k_cap < 2) continue;
    std::size_t m = master_row_size(p, l);
    if (m < k_cap) {
      if (p.c < 1.0)
        throw std::invalid_argument(
            "EstimatorParams: c < 1 makes the master smaller than k");
      m = k_cap;
    }
    std::vector<int> row_cell;
    try {
      row_cell = rows_of(m);
    } catch (const std::invalid_argument&) {
      // Master infeasible on this axis (e.g. more parts than points);
      // shrink to the largest feasible master.
      m = std::min(m, n);
      if (m < k_cap) k_cap = m;
      if (k_cap < 2) continue;
      row_cell = rows_of(m);
    }
    const std::vector<int> col_cell = cols_of(l);
    CountMatrix counts(m, l);
    for (std::size_t i = 0; i < n; ++i)
      ++counts.at(static_cast<std::size_t>(row_cell[i]),
                  static_cast<std::size_t>(col_cell[i]));
    counts.total = static_cast<std::int64_t>(n);
    const AxisOptimum opt = optimize_axis(counts, k_cap);
    for (std::size_t k = 2; k <= k_cap; ++k) {
      if (!include_diagonal && k == l) continue;
      // min() absorbs fp overshoot above the log2(min(k, l)) ceiling.
      emit(k, l,
           std::min(1.0, opt.per_k.at(k) / std::log2(static_cast<double>(k))));
    }
  }
}

}  // namespace detail

// MICe: columns are mass equipartitions of D_x, rows are optimized over a
// mass-equipartition master of D_y (axes swapped for k > l).
inline MicResult mice(const Dataset& d, const EstimatorParams& params) {
  params.validate();
  const std::size_t n = d.n();
  if (n < 4) throw std::invalid_argument("mice: need n >= 4");
  const std::vector<double> xs = d.xs();
  const std::vector<double> ys = d.ys();

  MicResult res;
  auto run = [&](const std::vector<double>& cvals, const std::vector<double>& rvals,
                 bool diag, bool swapped) {
    detail::characteristic_side(
        n, params, diag, n,
        [&](std::size_t parts) { return mass_equipartition_cells(cvals, parts); },
        [&](std::size_t parts) { return mass_equipartition_cells(rvals, parts); },
        [&](std::size_t k, std::size_t l, double v) {
          if (swapped)
            res.cm.entries[{l, k}] = v;
          else
            res.cm.entries[{k, l}] = v;
        });
  };
  run(xs, ys, true, false);   // k <= l
  run(ys, xs, false, true);   // k > l, axes swapped
  if (res.cm.entries.empty())
    throw std::runtime_error("mice: no computable characteristic entries");
  res.value = std::get<2>(res.cm.max_entry());
  return res;
}

// MICr: range equipartitions of the declared bounds L, used verbatim.
inline MicResult micr(const Dataset& d, const RangeBounds& bounds,
                      const EstimatorParams& params) {
  params.validate();
  const std::size_t n = d.n();
  if (n < 1) throw std::invalid_argument("micr: empty dataset");
  for (std::size_t i = 0; i < n; ++i)
    if (!bounds.contains(d.points[i]))
      throw std::invalid_argument("micr: point " + std::to_string(i) +
                                  " outside bounds L");
  const std::vector<double> xs = d.xs();
  const std::vector<double> ys = d.ys();

  auto range_cells = [](const std::vector<double>& vals, double lo, double hi,
                        std::size_t parts) {
    const AxisPartition part = range_equipartition(lo, hi, parts);
    std::vector<int> cell(vals.size());
    for (std::size_t i = 0; i < vals.size(); ++i) cell[i] = part.cell_of(vals[i]);
    return cell;
  };

  MicResult res;
  auto run = [&](const std::vector<double>& cvals, double clo, double chi,
                 const std::vector<double>& rvals, double rlo, double rhi,
                 bool diag, bool swapped) {
    detail::characteristic_side(
        n, params, diag, static_cast<std::size_t>(params.B / 2),
        [&](std::size_t parts) { return range_cells(cvals, clo, chi, parts); },
        [&](std::size_t parts) { return range_cells(rvals, rlo, rhi, parts); },
        [&](std::size_t k, std::size_t l, double v) {
          if (swapped)
            res.cm.entries[{l, k}] = v;
          else
            res.cm.entries[{k, l}] = v;
        });
  };
  run(xs, bounds.x_lo, bounds.x_hi, ys, bounds.y_lo, bounds.y_hi, true, false);
  run(ys, bounds.y_lo, bounds.y_hi, xs, bounds.x_lo, bounds.x_hi, false, true);
  if (res.cm.entries.empty())
    throw std::runtime_error("micr: no computable characteristic entries");
  res.value = std::get<2>(res.cm.max_entry());
  return res;
}

enum class GridFamily { kMass, kRange };

// Single equicharacteristic entry, exposed for testing against brute force.
inline double characteristic_entry(const Dataset& d,
                                   const std::optional<RangeBounds>& bounds,
                                   std::size_t k, std::size_t l,
                                   const EstimatorParams& params,
                                   GridFamily family) {
  params.validate();
  if (k < 2 || l < 2)
    throw std::invalid_argument("characteristic_entry: need k, l >= 2");
  if (family == GridFamily::kRange && !bounds)
    throw std::invalid_argument("characteristic_entry: range family needs bounds");
  const MicResult full = family == GridFamily::kMass
                             ? mice(d, params)
                             : micr(d, *bounds, params);
  auto it = full.cm.entries.find({k, l});
  if (it == full.cm.entries.end())
    throw std::invalid_argument("characteristic_entry: (k, l) not computable");
  return it->second;
}

}  // namespace dpmic
