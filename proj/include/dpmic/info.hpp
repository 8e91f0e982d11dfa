#pragma once

// Discrete mutual information, its normalized variant, and the dynamic
// program that maximizes it over size-k row subpartitions of a master axis.

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <stdexcept>
#include <vector>

#include "dpmic/grid.hpp"

namespace dpmic {

inline double xlog2x(double p) { return p > 0.0 ? p * std::log2(p) : 0.0; }

// I(P) in bits, with the 0*log(0) = 0 convention. Clamped at 0 to absorb
// rounding below -1e-12.
inline double mutual_information(const NormalizedMatrix& m) {
  double sum = 0.0;
  for (double p : m.probs) sum += p;
  if (std::abs(sum - 1.0) > 1e-9)
    throw std::invalid_argument("mutual_information: matrix not normalized");
  const auto rows = m.row_sums();
  const auto cols = m.col_sums();
  double joint = 0.0, hr = 0.0, hc = 0.0;
  for (double p : m.probs) joint += xlog2x(p);
  for (double p : rows) hr += xlog2x(p);
  for (double p : cols) hc += xlog2x(p);
  const double mi = joint - hr - hc;
  return mi < 0.0 ? 0.0 : mi;
}

// I / log2(min(k, l)), always in [0, 1] up to rounding.
inline double normalized_mi(const NormalizedMatrix& m) {
  if (m.k < 2 || m.l < 2)
    throw std::invalid_argument("normalized_mi: need k, l >= 2");
  return mutual_information(m) / std::log2(static_cast<double>(std::min(m.k, m.l)));
}

struct AxisOptimum {
  // per_k[k] = max I (bits, unnormalized) over size-k row subpartitions,
  // for k in [2, k_max]. arg_partition[k] holds the chosen divider indices
  // into the master (values in [1, rows-1], ascending).
  std::map<std::size_t, double> per_k;
  std::map<std::size_t, std::vector<std::size_t>> arg_partition;
  std::uint64_t ops = 0;  // inner-loop operation count, for complexity tests
};

// Maximizes I over all ways of merging the master's adjacent rows into k
// groups, for every k in [2, k_max], with the column partition held fixed.
// Since H(cols) is constant, the objective per k reduces to maximizing
// sum over groups of (sum_c q_c log2 q_c - P log2 P). Ties between divider
// sets break toward the lexicographically smallest set.
inline AxisOptimum optimize_axis(const NormalizedMatrix& m, std::size_t k_max) {
  const std::size_t R = m.k, C = m.l;
  if (k_max < 2 || k_max > R)
    throw std::invalid_argument("optimize_axis: need 2 <= k_max <= rows");

  AxisOptimum out;
  std::uint64_t ops = 0;

  // Group score f(s, t) for merged rows [s, t), computed incrementally.
  std::vector<double> f(R * (R + 1), 0.0);
  auto fidx = [R](std::size_t s, std::size_t t) { return s * (R + 1) + t; };
  {
    std::vector<double> col(C);
    for (std::size_t s = 0; s < R; ++s) {
      std::fill(col.begin(), col.end(), 0.0);
      for (std::size_t t = s + 1; t <= R; ++t) {
        double q = 0.0;
        for (std::size_t j = 0; j < C; ++j) {
          col[j] += m.at(t - 1, j);
          q += xlog2x(col[j]);
          ++ops;
        }
        double p = 0.0;
        for (std::size_t j = 0; j < C; ++j) p += col[j];
        f[fidx(s, t)] = q - xlog2x(p);
      }
    }
  }

  // H(cols) term: I = sum_groups f + sum_c p(c) log2 p(c) ... with sign
  // I = joint - hr - hc, and f(group) = joint_part - hr_part, so
  // I = sum f - hc_term where hc_term = sum_c xlog2x(p(c)).
  double hc_term = 0.0;
  for (double p : m.col_sums()) hc_term += xlog2x(p);

  // best[x][t]: max sum of f over x groups covering rows [0, t).
  constexpr double NEG = -std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> best(k_max + 1, std::vector<double>(R + 1, NEG));
  std::vector<std::vector<std::size_t>> from(k_max + 1,
                                             std::vector<std::size_t>(R + 1, 0));
  for (std::size_t t = 1; t <= R; ++t) best[1][t] = f[fidx(0, t)];
  for (std::size_t x = 2; x <= k_max; ++x) {
    for (std::size_t t = x; t <= R; ++t) {
      double b = NEG;
      std::size_t arg = 0;
      for (std::size_t s = x - 1; s < t; ++s) {
        ++ops;
        const double v = best[x - 1][s] + f[fidx(s, t)];
        if (v > b) {
          b = v;
          arg = s;
        }
      }
      best[x][t] = b;
      from[x][t] = arg;
    }
  }

  // Suffix table for lexicographically-smallest reconstruction:
  // suf[x][s] = max sum of f over x groups covering rows [s, R).
  std::vector<std::vector<double>> suf(k_max + 1, std::vector<double>(R + 1, NEG));
  for (std::size_t s = 0; s < R; ++s) suf[1][s] = f[fidx(s, R)];
  for (std::size_t x = 2; x <= k_max; ++x)
    for (std::size_t s = 0; s + x <= R; ++s) {
      double b = NEG;
      for (std::size_t t = s + 1; t + (x - 1) <= R; ++t) {
        ++ops;
        const double v = f[fidx(s, t)] + suf[x - 1][t];
        if (v > b) b = v;
      }
      suf[x][s] = b;
    }

  for (std::size_t k = 2; k <= k_max; ++k) {
    const double opt = best[k][R];
    out.per_k[k] = std::max(0.0, opt - hc_term);
    // Walk left to right, taking the earliest divider compatible with the
    // optimum at each step (within a small tolerance for fp reassociation).
    std::vector<std::size_t> divs;
    const double tol = 1e-12 * std::max(1.0, std::abs(opt));
    std::size_t s = 0;
    double acc = 0.0;
    for (std::size_t x = k; x >= 2; --x) {
      for (std::size_t t = s + 1; t + (x - 1) <= R; ++t) {
        if (acc + f[fidx(s, t)] + suf[x - 1][t] >= opt - tol) {
          divs.push_back(t);
          acc += f[fidx(s, t)];
          s = t;
          break;
        }
      }
    }
    out.arg_partition[k] = std::move(divs);
  }
  out.ops = ops;
  return out;
}

inline AxisOptimum optimize_axis(const CountMatrix& counts, std::size_t k_max) {
  if (counts.total <= 0)
    throw std::invalid_argument("optimize_axis: empty count matrix");
  return optimize_axis(NormalizedMatrix::from_counts(counts), k_max);
}

}  // namespace dpmic
