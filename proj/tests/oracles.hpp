#pragma once

// Reference implementations used only by the tests: slow, exhaustive
// replacements for the optimized code paths, kept deliberately independent
// of the library's algorithms.

#include <algorithm>
#include <cmath>
#include <vector>

#include "dpmic/grid.hpp"
#include "dpmic/info.hpp"
#include "dpmic/rng.hpp"

namespace oracle {

// Mutual information of merged rows, computed from first principles.
inline double merged_mi(const dpmic::NormalizedMatrix& m,
                        const std::vector<std::size_t>& dividers) {
  // Group boundaries: 0, dividers..., R.
  std::vector<std::size_t> cuts;
  cuts.push_back(0);
  cuts.insert(cuts.end(), dividers.begin(), dividers.end());
  cuts.push_back(m.k);
  const std::size_t k = cuts.size() - 1;
  std::vector<double> merged(k * m.l, 0.0);
  for (std::size_t g = 0; g < k; ++g)
    for (std::size_t r = cuts[g]; r < cuts[g + 1]; ++r)
      for (std::size_t c = 0; c < m.l; ++c) merged[g * m.l + c] += m.at(r, c);
  std::vector<double> row(k, 0.0), col(m.l, 0.0);
  for (std::size_t g = 0; g < k; ++g)
    for (std::size_t c = 0; c < m.l; ++c) {
      row[g] += merged[g * m.l + c];
      col[c] += merged[g * m.l + c];
    }
  double mi = 0.0;
  for (std::size_t g = 0; g < k; ++g)
    for (std::size_t c = 0; c < m.l; ++c) {
      const double p = merged[g * m.l + c];
      if (p > 0.0) mi += p * std::log2(p / (row[g] * col[c]));
    }
  return std::max(0.0, mi);
}

// Max I over every size-k row subpartition, by enumerating all divider
// combinations.
inline double brute_force_axis(const dpmic::NormalizedMatrix& m, std::size_t k) {
  const std::size_t R = m.k;
  std::vector<std::size_t> divs(k - 1);
  for (std::size_t i = 0; i < k - 1; ++i) divs[i] = i + 1;
  double best = -1.0;
  while (true) {
    best = std::max(best, merged_mi(m, divs));
    // next combination of k-1 dividers from {1, ..., R-1}
    bool advanced = false;
    for (std::size_t i = k - 1; i-- > 0;) {
      if (divs[i] < (R - 1) - (k - 2 - i)) {
        ++divs[i];
        for (std::size_t j = i + 1; j < k - 1; ++j) divs[j] = divs[j - 1] + 1;
        advanced = true;
        break;
      }
    }
    if (!advanced) return best;
  }
}

inline dpmic::NormalizedMatrix random_matrix(dpmic::Rng& rng, std::size_t rows,
                                             std::size_t cols,
                                             std::int64_t max_count = 20) {
  std::vector<double> w(rows * cols, 0.0);
  double total = 0.0;
  while (total <= 0.0)
    for (auto& v : w) {
      v = static_cast<double>(rng.uniform_index(
          static_cast<std::uint64_t>(max_count) + 1));
      total += v;
    }
  return dpmic::NormalizedMatrix::from_weights(rows, cols, w);
}

}  // namespace oracle
