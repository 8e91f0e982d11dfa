#pragma once

// Experiment plumbing: CSV ingestion, range-bound construction, tuned
// parameter lookup, bias/variance sweeps, score binning, and sensitivity
// fuzzing.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "dpmic/bench.hpp"
#include "dpmic/dp.hpp"
#include "dpmic/grid.hpp"
#include "dpmic/mic.hpp"
#include "dpmic/rng.hpp"

namespace dpmic {

enum class PairingMode {
  kIndexVsColumn,  // x = 1..n time indices, one dataset per column
  kAllPairs,       // one dataset per unordered column pair
};

struct ColumnCollection {
  std::string name;
  std::vector<std::string> column_names;
  std::vector<std::vector<double>> columns;  // common length
  std::size_t dropped_rows = 0;

  std::size_t n_rows() const { return columns.empty() ? 0 : columns[0].size(); }
};

namespace csv_detail {

inline std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

inline bool is_blank(const std::string& s) {
  return s.find_first_not_of(" \t") == std::string::npos;
}

}  // namespace csv_detail

// Parses a header-row CSV of real-valued columns. Rows containing a blank
// cell are dropped (counted in dropped_rows); any other unparseable cell is
// an error naming its row and column.
inline ColumnCollection ingest_csv(std::istream& in, const std::string& name) {
  ColumnCollection cc;
  cc.name = name;
  std::string line;
  if (!std::getline(in, line))
    throw std::invalid_argument("ingest_csv: empty input");
  cc.column_names = csv_detail::split_row(line);
  const std::size_t w = cc.column_names.size();
  cc.columns.assign(w, {});
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (csv_detail::is_blank(line)) continue;
    const auto cells = csv_detail::split_row(line);
    if (cells.size() != w)
      throw std::invalid_argument("ingest_csv: ragged row " + std::to_string(row) +
                                  " (" + std::to_string(cells.size()) + " cells, expected " +
                                  std::to_string(w) + ")");
    bool missing = false;
    std::vector<double> vals(w);
    for (std::size_t c = 0; c < w; ++c) {
      if (csv_detail::is_blank(cells[c])) {
        missing = true;
        break;
      }
      std::size_t used = 0;
      try {
        vals[c] = std::stod(cells[c], &used);
      } catch (const std::exception&) {
        throw std::invalid_argument("ingest_csv: unparseable cell at row " +
                                    std::to_string(row) + ", column " +
                                    cc.column_names[c]);
      }
      if (!csv_detail::is_blank(cells[c].substr(used)))
        throw std::invalid_argument("ingest_csv: unparseable cell at row " +
                                    std::to_string(row) + ", column " +
                                    cc.column_names[c]);
      if (std::isnan(vals[c]))
        throw std::invalid_argument("ingest_csv: NaN at row " + std::to_string(row) +
                                    ", column " + cc.column_names[c]);
    }
    if (missing) {
      ++cc.dropped_rows;
      continue;
    }
    for (std::size_t c = 0; c < w; ++c) cc.columns[c].push_back(vals[c]);
  }
  if (cc.n_rows() == 0) throw std::invalid_argument("ingest_csv: no data rows");
  return cc;
}

inline ColumnCollection ingest_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("ingest_csv: cannot open " + path);
  return ingest_csv(in, path);
}

// (min - span/100, max + span/100); errors on constant columns, which need
// user-supplied bounds.
inline std::pair<double, double> padded_bounds(const std::vector<double>& values) {
  if (values.empty()) throw std::invalid_argument("padded_bounds: empty values");
  const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
  const double span = *mx - *mn;
  if (span <= 0.0)
    throw std::invalid_argument(
        "padded_bounds: constant column; supply explicit bounds");
  return {*mn - span / 100.0, *mx + span / 100.0};
}

struct PairedDataset {
  std::string id;
  Dataset data;
  RangeBounds bounds;
};

// Expands a column collection into datasets per the pairing mode. For
// kIndexVsColumn, x is the 1-based row index with bounds [0, n+1]. When
// global_bounds is set (kAllPairs only), one padded bound over all columns
// is shared on both axes.
inline std::vector<PairedDataset> make_datasets(const ColumnCollection& cc,
                                                PairingMode mode,
                                                bool global_bounds = false) {
  std::vector<PairedDataset> out;
  const std::size_t n = cc.n_rows();
  if (mode == PairingMode::kIndexVsColumn) {
    for (std::size_t c = 0; c < cc.columns.size(); ++c) {
      const auto [ylo, yhi] = padded_bounds(cc.columns[c]);
      RangeBounds b(0.0, static_cast<double>(n + 1), ylo, yhi);
      std::vector<Point> pts(n);
      for (std::size_t i = 0; i < n; ++i)
        pts[i] = {static_cast<double>(i + 1), cc.columns[c][i]};
      out.push_back({cc.column_names[c], Dataset(std::move(pts), b), b});
    }
    return out;
  }
  std::optional<std::pair<double, double>> global;
  if (global_bounds) {
    std::vector<double> all;
    for (const auto& col : cc.columns) all.insert(all.end(), col.begin(), col.end());
    global = padded_bounds(all);
  }
  for (std::size_t a = 0; a < cc.columns.size(); ++a)
    for (std::size_t b2 = a + 1; b2 < cc.columns.size(); ++b2) {
      const auto bx = global ? *global : padded_bounds(cc.columns[a]);
      const auto by = global ? *global : padded_bounds(cc.columns[b2]);
      RangeBounds b(bx.first, bx.second, by.first, by.second);
      std::vector<Point> pts(n);
      for (std::size_t i = 0; i < n; ++i)
        pts[i] = {cc.columns[a][i], cc.columns[b2][i]};
      out.push_back({cc.column_names[a] + ":" + cc.column_names[b2],
                     Dataset(std::move(pts), b), b});
    }
  return out;
}

enum class Mechanism { kMice, kMicr, kMiceLap, kMicrLap, kMicrGeom };

inline std::string mechanism_name(Mechanism m) {
  switch (m) {
    case Mechanism::kMice: return "mice";
    case Mechanism::kMicr: return "micr";
    case Mechanism::kMiceLap: return "mice-lap";
    case Mechanism::kMicrLap: return "micr-lap";
    case Mechanism::kMicrGeom: return "micr-geom";
  }
  return "?";
}

struct TunedParams {
  double c = 0.0;
  std::int64_t B = 0;
};

// Tuned (c, B) per mechanism, epsilon and n, from the benchmark sweep.
// Between tabulated n values, B interpolates linearly (rounded) and c comes
// from the lower bracket; above the largest n the last row applies; the two
// tabulated epsilons are matched by nearest value.
inline TunedParams table3_params(Mechanism mech, double epsilon, std::int64_t n) {
  if (mech != Mechanism::kMicrLap && mech != Mechanism::kMicrGeom)
    throw std::invalid_argument("table3_params: tuned values exist only for "
                                "micr-lap and micr-geom");
  if (n < 25)
    throw std::invalid_argument("table3_params: n below tuned range (min 25)");
  const bool high_eps = epsilon >= 0.55;  // nearest of {0.1, 1.0}
  struct Row { std::int64_t n; TunedParams geom1, geom01, lap1, lap01; };
  static const Row kRows[] = {
      {25,    {2, 12},  {2, 6},  {5, 8},   {5, 6}},
      {250,   {1, 40},  {2, 10}, {5, 40},  {5, 40}},
      {500,   {1, 40},  {2, 20}, {5, 60},  {5, 80}},
      {1000,  {1, 60},  {2, 40}, {5, 80},  {5, 100}},
      {5000,  {1, 150}, {1, 40}, {5, 150}, {5, 125}},
      {10000, {1, 150}, {1, 80}, {5, 150}, {5, 150}},
  };
  auto pick = [&](const Row& r) -> const TunedParams& {
    if (mech == Mechanism::kMicrGeom) return high_eps ? r.geom1 : r.geom01;
    return high_eps ? r.lap1 : r.lap01;
  };
  const std::size_t m = std::size(kRows);
  if (n >= kRows[m - 1].n) return pick(kRows[m - 1]);
  std::size_t hi = 1;
  while (kRows[hi].n < n) ++hi;
  const Row& a = kRows[hi - 1];
  const Row& b = kRows[hi];
  if (n == a.n) return pick(a);
  if (n == b.n) return pick(b);
  const double t = static_cast<double>(n - a.n) / static_cast<double>(b.n - a.n);
  TunedParams out;
  out.c = pick(a).c;  // small-integer valued; no interpolation
  out.B = static_cast<std::int64_t>(std::llround(
      static_cast<double>(pick(a).B) +
      t * static_cast<double>(pick(b).B - pick(a).B)));
  return out;
}

struct ExperimentConfig {
  Mechanism mechanism = Mechanism::kMicrLap;
  double epsilon = 1.0;
  std::size_t iterations = 50;
  bool use_table3 = true;      // else explicit_params applies
  EstimatorParams explicit_params;
  std::uint64_t seed = 0;
};

struct ResultRow {
  std::string id;
  Mechanism mechanism;
  double epsilon = 0.0;
  std::int64_t B = 0;
  double c = 0.0;
  double reference = 0.0;
  std::vector<double> outputs;  // raw per-run outputs, always persisted
  double bias = 0.0;            // mean signed error wrt reference
  double variance = 0.0;        // population variance of the runs
  double avg_unsigned_error = 0.0;
};

namespace harness_detail {

inline void finalize_row(ResultRow& row) {
  const double m = static_cast<double>(row.outputs.size());
  double mean = 0.0;
  for (double v : row.outputs) mean += v;
  mean /= m;
  double var = 0.0, aue = 0.0;
  for (double v : row.outputs) {
    var += (v - mean) * (v - mean);
    aue += std::abs(v - row.reference);
  }
  row.bias = mean - row.reference;
  row.variance = var / m;
  row.avg_unsigned_error = aue / m;
}

inline double run_mechanism(Mechanism mech, const Dataset& d,
                            const RangeBounds& bounds,
                            const EstimatorParams& params,
                            const PrivacyParams& priv) {
  switch (mech) {
    case Mechanism::kMice: return mice(d, params).value;
    case Mechanism::kMicr: return micr(d, bounds, params).value;
    case Mechanism::kMiceLap: return mice_lap(d, params, priv);
    case Mechanism::kMicrLap: return micr_lap(d, bounds, params, priv);
    case Mechanism::kMicrGeom: return micr_geom(d, bounds, params, priv).value;
  }
  throw std::logic_error("run_mechanism: unknown mechanism");
}

}  // namespace harness_detail

struct SyntheticTarget {
  std::string id;
  NoisyDistribution dist;
  std::size_t n = 0;
  double reference = 0.0;  // MIC* estimate
};

struct FixedTarget {
  std::string id;
  Dataset data;
  RangeBounds bounds;
  double reference = 0.0;  // non-private MICe score
};

using ExperimentTarget = std::variant<SyntheticTarget, FixedTarget>;

// Runs `config.iterations` mechanism evaluations per target. Synthetic
// targets resample a fresh dataset each iteration; fixed targets reuse the
// dataset and vary only the noise. Sub-seeds are derived from the master
// seed by (target index, iteration), so results do not depend on scheduling.
inline std::vector<ResultRow> run_bias_variance(
    const ExperimentConfig& config, const std::vector<ExperimentTarget>& targets) {
  if (config.iterations < 1)
    throw std::invalid_argument("run_bias_variance: iterations must be >= 1");
  std::vector<ResultRow> rows;
  rows.reserve(targets.size());
  for (std::size_t t = 0; t < targets.size(); ++t) {
    ResultRow row;
    row.mechanism = config.mechanism;
    row.epsilon = config.epsilon;
    const bool synthetic = std::holds_alternative<SyntheticTarget>(targets[t]);
    std::size_t n = 0;
    if (synthetic) {
      const auto& st = std::get<SyntheticTarget>(targets[t]);
      row.id = st.id;
      row.reference = st.reference;
      n = st.n;
    } else {
      const auto& ft = std::get<FixedTarget>(targets[t]);
      row.id = ft.id;
      row.reference = ft.reference;
      n = ft.data.n();
    }
    EstimatorParams params = config.explicit_params;
    if (config.use_table3) {
      const TunedParams tuned = table3_params(config.mechanism, config.epsilon,
                                              static_cast<std::int64_t>(n));
      params.B = tuned.B;
      params.c = tuned.c;
    }
    row.B = params.B;
    row.c = params.c;
    row.outputs.reserve(config.iterations);
    for (std::size_t it = 0; it < config.iterations; ++it) {
      PrivacyParams priv;
      priv.epsilon = config.epsilon;
      priv.rng_seed = mix_keys(config.seed, {t, it, 0x707269767aULL});
      double out;
      if (synthetic) {
        const auto& st = std::get<SyntheticTarget>(targets[t]);
        Rng srng = Rng::substream(config.seed, {t, it, 0x73616d70ULL});
        const Dataset d = sample(st.dist, st.n, srng);
        out = harness_detail::run_mechanism(config.mechanism, d, st.dist.bounds,
                                            params, priv);
      } else {
        const auto& ft = std::get<FixedTarget>(targets[t]);
        out = harness_detail::run_mechanism(config.mechanism, ft.data, ft.bounds,
                                            params, priv);
      }
      row.outputs.push_back(out);
    }
    harness_detail::finalize_row(row);
    rows.push_back(std::move(row));
  }
  return rows;
}

struct BinSummary {
  double lo = 0.0, hi = 0.0;
  std::size_t count = 0;
  double median_bias = 0.0;
  double median_variance = 0.0;
  double bias_iqr = 0.0;
};

namespace harness_detail {

inline double quantile_sorted(const std::vector<double>& v, double q) {
  if (v.empty()) return 0.0;
  const double pos = q * static_cast<double>(v.size() - 1);
  const std::size_t i = static_cast<std::size_t>(pos);
  const double frac = pos - static_cast<double>(i);
  if (i + 1 >= v.size()) return v.back();
  return v[i] * (1.0 - frac) + v[i + 1] * frac;
}

inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return quantile_sorted(v, 0.5);
}

}  // namespace harness_detail

// Bins result rows by a per-row score (typically the non-private MICe
// value). Bins are half-open with a closed last bin.
inline std::vector<BinSummary> bin_by_mice(const std::vector<double>& scores,
                                           const std::vector<ResultRow>& rows,
                                           const std::vector<double>& endpoints) {
  if (scores.size() != rows.size())
    throw std::invalid_argument("bin_by_mice: score/row size mismatch");
  if (endpoints.size() < 2 || endpoints.front() != 0.0 || endpoints.back() != 1.0 ||
      !std::is_sorted(endpoints.begin(), endpoints.end()) ||
      std::adjacent_find(endpoints.begin(), endpoints.end()) != endpoints.end())
    throw std::invalid_argument(
        "bin_by_mice: endpoints must strictly increase from 0 to 1");
  const std::size_t nbins = endpoints.size() - 1;
  std::vector<std::vector<double>> biases(nbins), variances(nbins);
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const double s = scores[i];
    if (s < 0.0 || s > 1.0) throw std::logic_error("bin_by_mice: score outside [0,1]");
    std::size_t b = nbins - 1;
    for (std::size_t j = 0; j < nbins; ++j)
      if (s >= endpoints[j] && (s < endpoints[j + 1] || j == nbins - 1)) {
        b = j;
        break;
      }
    biases[b].push_back(rows[i].bias);
    variances[b].push_back(rows[i].variance);
  }
  std::vector<BinSummary> out(nbins);
  for (std::size_t b = 0; b < nbins; ++b) {
    out[b].lo = endpoints[b];
    out[b].hi = endpoints[b + 1];
    out[b].count = biases[b].size();
    if (out[b].count == 0) continue;
    std::sort(biases[b].begin(), biases[b].end());
    out[b].median_bias = harness_detail::quantile_sorted(biases[b], 0.5);
    out[b].bias_iqr = harness_detail::quantile_sorted(biases[b], 0.75) -
                      harness_detail::quantile_sorted(biases[b], 0.25);
    out[b].median_variance = harness_detail::median(variances[b]);
  }
  return out;
}

enum class FuzzStatistic { kMice, kMicr };

struct FuzzResult {
  double max_delta = 0.0;
  double bound = 0.0;
  bool pass = false;
  std::size_t trials = 0;
};

// Empirically probes the sensitivity bound: random datasets, one point
// perturbed per trial (uniform re-draw, corner jump, or a nudge across a
// master cell boundary), statistic recomputed, max |delta| vs the bound.
inline FuzzResult fuzz_sensitivity(FuzzStatistic stat, std::size_t n,
                                   std::size_t trials,
                                   const EstimatorParams& params,
                                   std::uint64_t seed) {
  const RangeBounds box(0.0, 1.0, 0.0, 1.0);
  FuzzResult res;
  res.trials = trials;
  res.bound = stat == FuzzStatistic::kMicr
                  ? micr_sensitivity(static_cast<std::int64_t>(n))
                  : mice_sensitivity(static_cast<std::int64_t>(n), params.B);
  auto eval = [&](const Dataset& d) {
    return stat == FuzzStatistic::kMicr ? micr(d, box, params).value
                                        : mice(d, params).value;
  };
  for (std::size_t t = 0; t < trials; ++t) {
    Rng rng = Rng::substream(seed, {t});
    std::vector<Point> pts(n);
    for (auto& p : pts) p = {rng.uniform01(), rng.uniform01()};
    const Dataset d(pts);
    const double v0 = eval(d);
    const std::size_t idx = rng.uniform_index(n);
    Point moved = pts[idx];
    switch (t % 3) {
      case 0:  // uniform re-draw
        moved = {rng.uniform01(), rng.uniform01()};
        break;
      case 1:  // corner jump
        moved = {rng.uniform01() < 0.5 ? 0.0 : 1.0,
                 rng.uniform01() < 0.5 ? 0.0 : 1.0};
        break;
      default: {  // nudge across a nearby master cell boundary
        const std::size_t parts = std::max<std::size_t>(
            2, static_cast<std::size_t>(std::ceil(params.c * 4.0)));
        const double w = 1.0 / static_cast<double>(parts);
        const double target = std::clamp(
            std::round(moved.x / w) * w + (moved.x < 0.5 ? 1e-9 : -1e-9), 0.0, 1.0);
        moved.x = target;
        break;
      }
    }
    pts[idx] = moved;
    const double v1 = eval(Dataset(pts));
    res.max_delta = std::max(res.max_delta, std::abs(v1 - v0));
  }
  res.pass = res.max_delta <= res.bound;
  return res;
}

// Fixed-header result CSV. Per-run outputs are serialized in a trailing
// semicolon-separated field so reported summaries stay recomputable.
inline void write_results_csv(std::ostream& os, const std::vector<ResultRow>& rows) {
  os << "id,mechanism,epsilon,B,c,reference,iterations,bias,variance,"
        "avg_unsigned_error,outputs\n";
  os << std::setprecision(17);
  for (const ResultRow& r : rows) {
    os << r.id << ',' << mechanism_name(r.mechanism) << ',' << r.epsilon << ','
       << r.B << ',' << r.c << ',' << r.reference << ',' << r.outputs.size()
       << ',' << r.bias << ',' << r.variance << ',' << r.avg_unsigned_error
       << ',';
    for (std::size_t i = 0; i < r.outputs.size(); ++i) {
      if (i) os << ';';
      os << r.outputs[i];
    }
    os << '\n';
  }
}

}  // namespace dpmic
