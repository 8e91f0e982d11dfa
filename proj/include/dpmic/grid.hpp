#pragma once

// Partitions, grids, point-to-cell mapping, count matrices and coarsening.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dpmic {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

struct RangeBounds {
  double x_lo = 0.0, x_hi = 1.0;
  double y_lo = 0.0, y_hi = 1.0;

  RangeBounds() = default;
  RangeBounds(double xl, double xh, double yl, double yh)
      : x_lo(xl), x_hi(xh), y_lo(yl), y_hi(yh) {
    if (!(x_lo < x_hi) || !(y_lo < y_hi))
      throw std::invalid_argument("RangeBounds: degenerate range");
  }

  bool contains(const Point& p) const {
    return p.x >= x_lo && p.x <= x_hi && p.y >= y_lo && p.y <= y_hi;
  }
};

struct Dataset {
  std::vector<Point> points;
  std::optional<RangeBounds> bounds;

  Dataset() = default;
  explicit Dataset(std::vector<Point> pts,
                   std::optional<RangeBounds> b = std::nullopt)
      : points(std::move(pts)), bounds(b) {
    if (points.empty()) throw std::invalid_argument("Dataset: empty");
    if (bounds) {
      for (std::size_t i = 0; i < points.size(); ++i)
        if (!bounds->contains(points[i]))
          throw std::invalid_argument("Dataset: point " + std::to_string(i) +
                                      " outside declared bounds");
    }
  }

  std::size_t n() const { return points.size(); }

  std::vector<double> xs() const {
    std::vector<double> v(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) v[i] = points[i].x;
    return v;
  }
  std::vector<double> ys() const {
    std::vector<double> v(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) v[i] = points[i].y;
    return v;
  }

  // Swaps the axes of every point (and the bounds, if present).
  Dataset transposed() const {
    Dataset d;
    d.points.reserve(points.size());
    for (const Point& p : points) d.points.push_back({p.y, p.x});
    if (bounds)
      d.bounds = RangeBounds(bounds->y_lo, bounds->y_hi, bounds->x_lo, bounds->x_hi);
    return d;
  }
};

// Ordered interval partition of one axis. Parts are half-open [b_i, b_{i+1})
// except the last, which is closed.
struct AxisPartition {
  std::vector<double> boundaries;  // size k+1, strictly increasing

  AxisPartition() = default;
  explicit AxisPartition(std::vector<double> b) : boundaries(std::move(b)) {
    if (boundaries.size() < 2)
      throw std::invalid_argument("AxisPartition: need at least one part");
    for (std::size_t i = 1; i < boundaries.size(); ++i)
      if (!(boundaries[i - 1] < boundaries[i]))
        throw std::invalid_argument("AxisPartition: boundaries not increasing");
  }

  std::size_t size() const { return boundaries.size() - 1; }
  double lo() const { return boundaries.front(); }
  double hi() const { return boundaries.back(); }

  // Part index for a value in [lo, hi]; -1 if outside.
  int cell_of(double v) const {
    if (v < lo() || v > hi()) return -1;
    if (v == hi()) return static_cast<int>(size()) - 1;
    auto it = std::upper_bound(boundaries.begin(), boundaries.end(), v);
    return static_cast<int>(it - boundaries.begin()) - 1;
  }
};

// rows partitions the y-axis (k parts), cols the x-axis (l parts).
struct Grid {
  AxisPartition rows;
  AxisPartition cols;

  std::size_t k() const { return rows.size(); }
  std::size_t l() const { return cols.size(); }
};

struct CountMatrix {
  std::size_t k = 0, l = 0;
  std::vector<std::int64_t> counts;  // row-major, k*l
  std::int64_t total = 0;

  CountMatrix() = default;
  CountMatrix(std::size_t k_, std::size_t l_)
      : k(k_), l(l_), counts(k_ * l_, 0), total(0) {}

  std::int64_t& at(std::size_t i, std::size_t j) { return counts[i * l + j]; }
  std::int64_t at(std::size_t i, std::size_t j) const { return counts[i * l + j]; }

  void recompute_total() {
    total = std::accumulate(counts.begin(), counts.end(), std::int64_t{0});
  }
};

// Nonnegative real weights over a k x l grid of cells, with a normalized view.
struct NormalizedMatrix {
  std::size_t k = 0, l = 0;
  std::vector<double> probs;  // row-major, sums to 1

  NormalizedMatrix() = default;

  static NormalizedMatrix from_counts(const CountMatrix& c) {
    if (c.total <= 0)
      throw std::invalid_argument("NormalizedMatrix: zero total count");
    NormalizedMatrix m;
    m.k = c.k;
    m.l = c.l;
    m.probs.resize(c.counts.size());
    const double inv = 1.0 / static_cast<double>(c.total);
    for (std::size_t i = 0; i < c.counts.size(); ++i)
      m.probs[i] = static_cast<double>(c.counts[i]) * inv;
    return m;
  }

  static NormalizedMatrix from_weights(std::size_t k, std::size_t l,
                                       const std::vector<double>& w) {
    if (w.size() != k * l)
      throw std::invalid_argument("NormalizedMatrix: size mismatch");
    double s = 0.0;
    for (double v : w) {
      if (v < 0.0) throw std::invalid_argument("NormalizedMatrix: negative weight");
      s += v;
    }
    if (s <= 0.0) throw std::invalid_argument("NormalizedMatrix: zero mass");
    NormalizedMatrix m;
    m.k = k;
    m.l = l;
    m.probs.resize(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) m.probs[i] = w[i] / s;
    return m;
  }

  double at(std::size_t i, std::size_t j) const { return probs[i * l + j]; }

  std::vector<double> row_sums() const {
    std::vector<double> r(k, 0.0);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < l; ++j) r[i] += at(i, j);
    return r;
  }
  std::vector<double> col_sums() const {
    std::vector<double> c(l, 0.0);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < l; ++j) c[j] += at(i, j);
    return c;
  }
};

// Size-`parts` partition of [lo, hi] into equal-width intervals. The last
// boundary is exactly hi.
inline AxisPartition range_equipartition(double lo, double hi, std::size_t parts) {
  if (!(lo < hi)) throw std::invalid_argument("range_equipartition: degenerate interval");
  if (parts == 0) throw std::invalid_argument("range_equipartition: zero parts");
  std::vector<double> b(parts + 1);
  const double w = hi - lo;
  for (std::size_t i = 0; i <= parts; ++i)
    b[i] = lo + w * (static_cast<double>(i) / static_cast<double>(parts));
  b[0] = lo;
  b[parts] = hi;
  return AxisPartition(std::move(b));
}

// Point counts per part for a size-`parts` mass equipartition of n points:
// parts 1..l-1 hold ceil(n/l) points each and the last part the remainder.
// When that rule would leave trailing parts empty, counts are balanced
// instead (sizes differ by at most one) so every part is nonempty.
inline std::vector<std::int64_t> mass_part_counts(std::int64_t n, std::int64_t parts) {
  if (parts < 1 || parts > n)
    throw std::invalid_argument("mass_part_counts: need 1 <= parts <= n");
  const std::int64_t q = (n + parts - 1) / parts;  // ceil(n/parts)
  const std::int64_t rem = n - q * (parts - 1);
  std::vector<std::int64_t> c(parts);
  if (rem >= 1) {
    std::fill(c.begin(), c.end() - 1, q);
    c.back() = rem;
  } else {
    const std::int64_t lo = n / parts, extra = n % parts;
    for (std::int64_t i = 0; i < parts; ++i) c[i] = lo + (i < extra ? 1 : 0);
  }
  return c;
}

// Stable rank order of `values`: ties broken by original index.
inline std::vector<std::size_t> stable_rank_order(const std::vector<double>& values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  return order;
}

// Part index per original point for a size-`parts` mass equipartition,
// assigning by (tie-perturbed) rank. This is the normative cell assignment
// for mass-equipartition grids; interval boundaries are a derived view.
inline std::vector<int> mass_equipartition_cells(const std::vector<double>& values,
                                                 std::size_t parts) {
  const auto counts = mass_part_counts(static_cast<std::int64_t>(values.size()),
                                       static_cast<std::int64_t>(parts));
  const auto order = stable_rank_order(values);
  std::vector<int> cell(values.size());
  std::size_t pos = 0;
  for (std::size_t p = 0; p < counts.size(); ++p)
    for (std::int64_t c = 0; c < counts[p]; ++c)
      cell[order[pos++]] = static_cast<int>(p);
  return cell;
}

// Interval boundaries of the mass equipartition over the values' covering
// interval. Internal boundaries sit at midpoints between adjacent ranked
// values; exact ties are nudged minimally to keep boundaries increasing.
inline AxisPartition mass_equipartition(const std::vector<double>& values,
                                        std::size_t parts) {
  if (values.empty()) throw std::invalid_argument("mass_equipartition: empty values");
  if (parts < 1 || parts > values.size())
    throw std::invalid_argument("mass_equipartition: need 1 <= parts <= n");
  const auto counts = mass_part_counts(static_cast<std::int64_t>(values.size()),
                                       static_cast<std::int64_t>(parts));
  const auto order = stable_rank_order(values);
  std::vector<double> b;
  b.reserve(parts + 1);
  const double lo = values[order.front()];
  const double hi = values[order.back()];
  if (!(lo < hi))
    throw std::invalid_argument("mass_equipartition: all values equal");
  b.push_back(lo);
  std::size_t pos = 0;
  for (std::size_t p = 0; p + 1 < counts.size(); ++p) {
    pos += static_cast<std::size_t>(counts[p]);
    double m = 0.5 * (values[order[pos - 1]] + values[order[pos]]);
    if (m <= b.back()) m = std::nextafter(b.back(), hi);
    b.push_back(m);
  }
  if (b.back() >= hi) {
    // Pathological tie pile-up; fall back to spreading within the interval.
    for (std::size_t i = 1; i < b.size(); ++i)
      b[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(parts);
  }
  b.push_back(hi);
  return AxisPartition(std::move(b));
}

// Count matrix via the point-to-cell map. Row 0 is the lowest y-interval.
inline CountMatrix count_matrix(const Dataset& d, const Grid& g) {
  CountMatrix m(g.k(), g.l());
  for (std::size_t idx = 0; idx < d.points.size(); ++idx) {
    const int j = g.cols.cell_of(d.points[idx].x);
    const int i = g.rows.cell_of(d.points[idx].y);
    if (i < 0 || j < 0)
      throw std::invalid_argument("count_matrix: point " + std::to_string(idx) +
                                  " outside grid range");
    ++m.at(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  }
  m.total = static_cast<std::int64_t>(d.points.size());
  return m;
}

namespace detail {

// Maps each sub-partition boundary onto the index of the coinciding master
// boundary; throws if any sub boundary is not aligned.
inline std::vector<std::size_t> boundary_alignment(const AxisPartition& master,
                                                   const AxisPartition& sub) {
  std::vector<std::size_t> idx;
  idx.reserve(sub.boundaries.size());
  std::size_t m = 0;
  for (double sb : sub.boundaries) {
    while (m < master.boundaries.size() && master.boundaries[m] < sb) ++m;
    if (m >= master.boundaries.size() || master.boundaries[m] != sb)
      throw std::invalid_argument("coarsen: sub boundary not aligned with master");
    idx.push_back(m);
  }
  return idx;
}

}  // namespace detail

// Sums adjacent master-cell blocks into the cells of the aligned subgrid.
inline CountMatrix coarsen(const CountMatrix& master_counts, const Grid& master,
                           const Grid& sub) {
  if (master_counts.k != master.k() || master_counts.l != master.l())
    throw std::invalid_argument("coarsen: count matrix does not match master grid");
  const auto ri = detail::boundary_alignment(master.rows, sub.rows);
  const auto ci = detail::boundary_alignment(master.cols, sub.cols);
  CountMatrix out(sub.k(), sub.l());
  for (std::size_t i = 0; i + 1 < ri.size(); ++i)
    for (std::size_t j = 0; j + 1 < ci.size(); ++j) {
      std::int64_t s = 0;
      for (std::size_t a = ri[i]; a < ri[i + 1]; ++a)
        for (std::size_t b = ci[j]; b < ci[j + 1]; ++b) s += master_counts.at(a, b);
      out.at(i, j) = s;
    }
  out.recompute_total();
  return out;
}

// C(j-1, k-1): the number of size-k subpartitions of a size-j partition.
inline std::uint64_t subpartition_count(std::size_t master_size, std::size_t parts) {
  if (parts < 2 || parts > master_size)
    throw std::invalid_argument("subpartition_count: need 2 <= parts <= master_size");
  const std::size_t n = master_size - 1;
  std::size_t r = parts - 1;
  r = std::min(r, n - r);
  std::uint64_t c = 1;
  for (std::size_t i = 1; i <= r; ++i) c = c * (n - r + i) / i;
  return c;
}

}  // namespace dpmic
