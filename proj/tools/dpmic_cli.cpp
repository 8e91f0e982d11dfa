// Command-line front end: single-statistic computation, synthetic benchmark
// management, bias/variance experiments, sensitivity fuzzing, and (B, c)
// tuning via the WSUM objective.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dpmic/bench.hpp"
#include "dpmic/dp.hpp"
#include "dpmic/harness.hpp"
#include "dpmic/mic.hpp"
#include "dpmic/registry.hpp"

namespace {

using namespace dpmic;

Mechanism parse_mechanism(const std::string& s) {
  if (s == "mice") return Mechanism::kMice;
  if (s == "micr") return Mechanism::kMicr;
  if (s == "mice-lap") return Mechanism::kMiceLap;
  if (s == "micr-lap") return Mechanism::kMicrLap;
  if (s == "micr-geom") return Mechanism::kMicrGeom;
  throw CLI::ValidationError("--mechanism", "unknown mechanism: " + s);
}

std::vector<double> parse_double_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
  return out;
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(std::stoi(tok));
  return out;
}

struct CommonOpts {
  std::string mechanism = "micr";
  double epsilon = 1.0;
  std::int64_t B = 0;
  double c = 0.0;
  double alpha = 0.0;
  std::string bounds_str;
  std::string master_sizing = "clumped";
  std::uint64_t seed = 0;
  std::string out;
};

void add_common(CLI::App* app, CommonOpts& o) {
  app->add_option("--mechanism", o.mechanism,
                  "mice, micr, mice-lap, micr-lap, micr-geom");
  app->add_option("--epsilon", o.epsilon, "privacy parameter");
  app->add_option("--B", o.B, "max total grid cells");
  app->add_option("--c", o.c, "master partition multiplier");
  app->add_option("--alpha", o.alpha, "shortcut: B = floor(n^alpha)");
  app->add_option("--bounds", o.bounds_str, "x_lo,x_hi,y_lo,y_hi range bounds");
  app->add_option("--master-sizing", o.master_sizing, "full or clumped");
  app->add_option("--seed", o.seed, "rng seed");
  app->add_option("--out", o.out, "output file path");
}

EstimatorParams resolve_params(const CommonOpts& o, std::size_t n,
                               Mechanism mech) {
  EstimatorParams p;
  p.master_sizing =
      o.master_sizing == "full" ? MasterSizing::kFull : MasterSizing::kClumped;
  if (o.B > 0) {
    p.B = o.B;
  } else {
    const double a = o.alpha > 0.0 ? o.alpha : 0.6;
    p.B = b_of(static_cast<std::int64_t>(n), a);
  }
  if (o.c > 0.0) {
    p.c = o.c;
  } else {
    // Defaults: 15 for the mass-equipartition family, 1 otherwise.
    p.c = (mech == Mechanism::kMice || mech == Mechanism::kMiceLap) ? 15.0 : 1.0;
  }
  return p;
}

std::optional<RangeBounds> parse_bounds(const std::string& s) {
  if (s.empty()) return std::nullopt;
  const auto v = parse_double_list(s);
  if (v.size() != 4)
    throw CLI::ValidationError("--bounds", "expected x_lo,x_hi,y_lo,y_hi");
  return RangeBounds(v[0], v[1], v[2], v[3]);
}

void write_or_print(const std::string& out, const std::string& content) {
  if (out.empty()) {
    std::cout << content;
  } else {
    std::ofstream f(out);
    if (!f) throw std::runtime_error("cannot open output file " + out);
    f << content;
  }
}

// ---- mic ----------------------------------------------------------------

int cmd_mic(const CommonOpts& o, const std::string& input, const std::string& xcol,
            const std::string& ycol, bool padded) {
  const ColumnCollection cc = ingest_csv_file(input);
  auto col = [&](const std::string& name) -> const std::vector<double>& {
    for (std::size_t i = 0; i < cc.column_names.size(); ++i)
      if (cc.column_names[i] == name) return cc.columns[i];
    throw std::runtime_error("no column named '" + name + "' in " + input);
  };
  const auto& xs = col(xcol);
  const auto& ys = col(ycol);
  std::vector<Point> pts(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) pts[i] = {xs[i], ys[i]};

  const Mechanism mech = parse_mechanism(o.mechanism);
  const EstimatorParams params = resolve_params(o, pts.size(), mech);
  std::optional<RangeBounds> bounds = parse_bounds(o.bounds_str);
  const bool needs_bounds = mech == Mechanism::kMicr ||
                            mech == Mechanism::kMicrLap ||
                            mech == Mechanism::kMicrGeom;
  if (needs_bounds && !bounds) {
    if (!padded)
      throw std::runtime_error(
          "range-based mechanisms need --bounds or --padded-bounds");
    const auto bx = padded_bounds(xs);
    const auto by = padded_bounds(ys);
    bounds = RangeBounds(bx.first, bx.second, by.first, by.second);
  }
  const Dataset d(std::move(pts), bounds);
  PrivacyParams priv{o.epsilon, o.seed};
  const double value = [&] {
    switch (mech) {
      case Mechanism::kMice: return mice(d, params).value;
      case Mechanism::kMicr: return micr(d, *bounds, params).value;
      case Mechanism::kMiceLap: return mice_lap(d, params, priv);
      case Mechanism::kMicrLap: return micr_lap(d, *bounds, params, priv);
      case Mechanism::kMicrGeom: return micr_geom(d, *bounds, params, priv).value;
    }
    return 0.0;
  }();
  std::ostringstream os;
  os << std::setprecision(17) << mechanism_name(mech) << ' ' << value << '\n';
  write_or_print(o.out, os.str());
  return 0;
}

// ---- synth --------------------------------------------------------------

int cmd_synth(const std::string& registry_path, const std::vector<int>& functions,
              const std::vector<double>& r2s, bool with_micstar,
              std::size_t sample_n, std::uint64_t seed, const std::string& out) {
  DistributionRegistry reg(registry_path);
  std::ostringstream os;
  os << std::setprecision(17);
  if (sample_n > 0) {
    if (functions.size() != 1 || r2s.size() != 1)
      throw std::runtime_error("--sample needs exactly one function and one r2");
    const NoisyDistribution dist = reg.distribution(functions[0], r2s[0]);
    Rng rng(seed);
    const Dataset d = sample(dist, sample_n, rng);
    os << "x,y\n";
    for (const Point& p : d.points) os << p.x << ',' << p.y << '\n';
    write_or_print(out, os.str());
    return 0;
  }
  os << "function,r_squared,sigma";
  if (with_micstar) os << ",mic_star";
  os << '\n';
  for (int id : functions)
    for (double r2 : r2s) {
      const NoisyDistribution dist = reg.distribution(id, r2);
      os << 'F' << id << ',' << r2 << ',' << dist.sigma;
      if (with_micstar) os << ',' << reg.mic_star_value(id, r2);
      os << '\n';
      std::cerr << "F" << id << " r2=" << r2 << " done\n";
    }
  write_or_print(out, os.str());
  return 0;
}

// ---- experiment ---------------------------------------------------------

int cmd_experiment(const CommonOpts& o, bool synthetic,
                   const std::vector<int>& functions,
                   const std::vector<double>& r2s, std::size_t n,
                   const std::string& registry_path, const std::string& input,
                   const std::string& pairs_mode, bool global_bounds,
                   std::size_t iterations, bool use_table3,
                   const std::string& bin_endpoints_str,
                   const std::string& raw_out) {
  ExperimentConfig cfg;
  cfg.mechanism = parse_mechanism(o.mechanism);
  cfg.epsilon = o.epsilon;
  cfg.iterations = iterations;
  cfg.seed = o.seed;
  cfg.use_table3 = use_table3;

  std::vector<ExperimentTarget> targets;
  std::vector<double> mice_scores;  // real-data binning scores
  if (synthetic) {
    DistributionRegistry reg(registry_path);
    if (!use_table3)
      cfg.explicit_params = resolve_params(o, n, cfg.mechanism);
    for (int id : functions)
      for (double r2 : r2s) {
        SyntheticTarget t;
        t.id = "F" + std::to_string(id) + "/r2=" + std::to_string(r2);
        t.dist = reg.distribution(id, r2);
        t.n = n;
        t.reference = reg.mic_star_value(id, r2);
        targets.push_back(std::move(t));
        std::cerr << "target " << targets.size() << " prepared\n";
      }
  } else {
    const ColumnCollection cc = ingest_csv_file(input);
    if (cc.dropped_rows > 0)
      std::cerr << "dropped " << cc.dropped_rows << " rows with missing values\n";
    const PairingMode pm = pairs_mode == "index" ? PairingMode::kIndexVsColumn
                                                 : PairingMode::kAllPairs;
    auto ds = make_datasets(cc, pm, global_bounds);
    if (!use_table3)
      cfg.explicit_params = resolve_params(o, cc.n_rows(), cfg.mechanism);
    // Reference: the non-private mass-equipartition score at its suggested
    // defaults B = n^0.6, c = 15.
    EstimatorParams ref_params;
    ref_params.B = b_of(static_cast<std::int64_t>(cc.n_rows()), 0.6);
    ref_params.c = 15.0;
    for (auto& pd : ds) {
      FixedTarget t;
      t.id = pd.id;
      t.reference = mice(pd.data, ref_params).value;
      mice_scores.push_back(t.reference);
      t.data = std::move(pd.data);
      t.bounds = pd.bounds;
      targets.push_back(std::move(t));
    }
  }

  const auto rows = run_bias_variance(cfg, targets);
  std::ostringstream os;
  write_results_csv(os, rows);
  write_or_print(o.out, os.str());
  if (!raw_out.empty()) {
    std::ofstream f(raw_out);
    f << std::setprecision(17) << "id,iteration,output\n";
    for (const auto& r : rows)
      for (std::size_t i = 0; i < r.outputs.size(); ++i)
        f << r.id << ',' << i << ',' << r.outputs[i] << '\n';
  }

  // Aligned plain-text summary.
  std::vector<double> biases;
  for (const auto& r : rows) biases.push_back(r.bias);
  std::sort(biases.begin(), biases.end());
  std::cerr << std::setprecision(4) << "targets=" << rows.size()
            << " median_bias=" << (biases.empty() ? 0.0 : biases[biases.size() / 2])
            << '\n';
  if (!bin_endpoints_str.empty() && !mice_scores.empty()) {
    const auto eps = parse_double_list(bin_endpoints_str);
    const auto bins = bin_by_mice(mice_scores, rows, eps);
    std::ostringstream bs;
    bs << std::setprecision(6);
    bs << std::left << std::setw(16) << "bin" << std::setw(8) << "count"
       << std::setw(14) << "median_bias" << std::setw(14) << "median_var"
       << std::setw(14) << "bias_iqr" << '\n';
    for (const auto& b : bins) {
      std::ostringstream rng;
      rng << '[' << b.lo << ',' << b.hi << ')';
      bs << std::left << std::setw(16) << rng.str() << std::setw(8) << b.count;
      if (b.count > 0)
        bs << std::setw(14) << b.median_bias << std::setw(14) << b.median_variance
           << std::setw(14) << b.bias_iqr;
      bs << '\n';
    }
    std::cout << bs.str();
  }
  return 0;
}

// ---- fuzz ---------------------------------------------------------------

int cmd_fuzz(const CommonOpts& o, const std::string& statistic, std::size_t n,
             std::size_t trials) {
  const FuzzStatistic st =
      statistic == "mice" ? FuzzStatistic::kMice : FuzzStatistic::kMicr;
  EstimatorParams params = resolve_params(
      o, n, st == FuzzStatistic::kMice ? Mechanism::kMice : Mechanism::kMicr);
  const FuzzResult res = fuzz_sensitivity(st, n, trials, params, o.seed);
  std::ostringstream os;
  os << std::setprecision(6) << "statistic=" << statistic << " n=" << n
     << " trials=" << res.trials << " max_delta=" << res.max_delta
     << " bound=" << res.bound << ' ' << (res.pass ? "PASS" : "FAIL") << '\n';
  write_or_print(o.out, os.str());
  return res.pass ? 0 : 1;
}

// ---- tune ---------------------------------------------------------------

int cmd_tune(const CommonOpts& o, const std::vector<int>& functions,
             const std::vector<double>& r2s, std::size_t n,
             const std::string& b_list, const std::string& c_list,
             std::size_t iterations, const std::string& registry_path) {
  const Mechanism mech = parse_mechanism(o.mechanism);
  DistributionRegistry reg(registry_path);

  struct Dist {
    NoisyDistribution dist;
    double star;
  };
  std::vector<Dist> dists;
  for (int id : functions)
    for (double r2 : r2s)
      dists.push_back({reg.distribution(id, r2), reg.mic_star_value(id, r2)});
  std::sort(dists.begin(), dists.end(),
            [](const Dist& a, const Dist& b) { return a.star < b.star; });
  std::vector<double> stars;
  for (const auto& d : dists) stars.push_back(d.star);

  std::ostringstream os;
  os << std::setprecision(6) << "B,c,wsum\n";
  double best = 1e9;
  std::int64_t best_b = 0;
  double best_c = 0.0;
  for (double c : parse_double_list(c_list))
    for (int b : parse_int_list(b_list)) {
      ExperimentConfig cfg;
      cfg.mechanism = mech;
      cfg.epsilon = o.epsilon;
      cfg.iterations = iterations;
      cfg.seed = o.seed;
      cfg.use_table3 = false;
      cfg.explicit_params = {b, c,
                             o.master_sizing == "full" ? MasterSizing::kFull
                                                       : MasterSizing::kClumped};
      std::vector<ExperimentTarget> targets;
      for (const auto& d : dists)
        targets.push_back(SyntheticTarget{"", d.dist, n, d.star});
      const auto rows = run_bias_variance(cfg, targets);
      std::vector<double> errs;
      for (const auto& r : rows) errs.push_back(r.avg_unsigned_error);
      const double w = wsum_objective(stars, errs);
      os << b << ',' << c << ',' << w << '\n';
      std::cerr << "B=" << b << " c=" << c << " wsum=" << w << '\n';
      if (w < best) {
        best = w;
        best_b = b;
        best_c = c;
      }
    }
  os << "# best B=" << best_b << " c=" << best_c << " wsum=" << best << '\n';
  write_or_print(o.out, os.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MIC statistics and differentially private variants"};
  app.set_config("--config");
  app.require_subcommand(1);

  CommonOpts mic_o, exp_o, fuzz_o, tune_o;
  std::string input, xcol = "x", ycol = "y";
  bool padded = false;
  auto* mic_cmd = app.add_subcommand("mic", "compute one statistic on a CSV pair");
  add_common(mic_cmd, mic_o);
  mic_cmd->add_option("--input", input, "CSV file")->required();
  mic_cmd->add_option("--xcol", xcol, "x column name");
  mic_cmd->add_option("--ycol", ycol, "y column name");
  mic_cmd->add_flag("--padded-bounds", padded,
                    "derive bounds by min/max with 1% padding");

  std::string registry, functions_str = "all", r2_str = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9";
  bool with_micstar = false;
  std::size_t sample_n = 0;
  std::uint64_t synth_seed = 0;
  std::string synth_out;
  auto* synth_cmd =
      app.add_subcommand("synth", "calibrate/benchmark the synthetic distributions");
  synth_cmd->add_option("--registry", registry, "sigma/oracle cache file");
  synth_cmd->add_option("--functions", functions_str, "comma list of ids or 'all'");
  synth_cmd->add_option("--r2", r2_str, "comma list of target R^2 values");
  synth_cmd->add_flag("--micstar", with_micstar, "also compute the oracle value");
  synth_cmd->add_option("--sample", sample_n, "emit a sample dataset of this size");
  synth_cmd->add_option("--seed", synth_seed, "rng seed for --sample");
  synth_cmd->add_option("--out", synth_out, "output file");

  bool synthetic = false, global_bounds = false, explicit_params = false;
  std::size_t exp_n = 1000, iterations = 50;
  std::string pairs_mode = "all", bin_endpoints, raw_out, exp_input,
      exp_functions = "all", exp_r2 = "0.5", exp_registry;
  auto* exp_cmd = app.add_subcommand("experiment", "bias/variance sweep");
  add_common(exp_cmd, exp_o);
  exp_cmd->add_flag("--synthetic", synthetic, "synthetic targets (else --input)");
  exp_cmd->add_option("--functions", exp_functions, "synthetic: function ids or 'all'");
  exp_cmd->add_option("--r2", exp_r2, "synthetic: R^2 list");
  exp_cmd->add_option("--n", exp_n, "synthetic: sample size per iteration");
  exp_cmd->add_option("--registry", exp_registry, "sigma/oracle cache file");
  exp_cmd->add_option("--input", exp_input, "real data CSV");
  exp_cmd->add_option("--pairs", pairs_mode, "index or all");
  exp_cmd->add_flag("--global-bounds", global_bounds,
                    "share one padded bound across all columns");
  exp_cmd->add_option("--iterations", iterations, "private runs per target");
  exp_cmd->add_flag("--explicit-params", explicit_params,
                    "use --B/--c/--alpha instead of the tuned table");
  exp_cmd->add_option("--bin-endpoints", bin_endpoints,
                      "bin real-data results by reference score");
  exp_cmd->add_option("--raw-out", raw_out, "per-run raw output CSV");

  std::string fuzz_stat = "micr";
  std::size_t fuzz_n = 200, fuzz_trials = 1000;
  auto* fuzz_cmd = app.add_subcommand("fuzz", "sensitivity fuzzing");
  add_common(fuzz_cmd, fuzz_o);
  fuzz_cmd->add_option("--statistic", fuzz_stat, "mice or micr");
  fuzz_cmd->add_option("--n", fuzz_n, "dataset size");
  fuzz_cmd->add_option("--trials", fuzz_trials, "neighbor trials");

  std::string b_list = "20,40,80", c_list = "1,2,5", tune_functions = "all",
      tune_r2 = "0.1,0.5,0.9", tune_registry;
  std::size_t tune_n = 1000, tune_iters = 10;
  auto* tune_cmd = app.add_subcommand("tune", "WSUM grid search over (B, c)");
  add_common(tune_cmd, tune_o);
  tune_cmd->add_option("--functions", tune_functions, "function ids or 'all'");
  tune_cmd->add_option("--r2", tune_r2, "R^2 list");
  tune_cmd->add_option("--n", tune_n, "sample size");
  tune_cmd->add_option("--B-list", b_list, "candidate B values");
  tune_cmd->add_option("--c-list", c_list, "candidate c values");
  tune_cmd->add_option("--iterations", tune_iters, "runs per distribution");
  tune_cmd->add_option("--registry", tune_registry, "sigma/oracle cache file");

  CLI11_PARSE(app, argc, argv);

  auto expand_functions = [](const std::string& s) {
    if (s == "all") {
      std::vector<int> all(kNumBenchFunctions);
      for (int i = 0; i < kNumBenchFunctions; ++i) all[i] = i + 1;
      return all;
    }
    return parse_int_list(s);
  };

  try {
    if (mic_cmd->parsed()) return cmd_mic(mic_o, input, xcol, ycol, padded);
    if (synth_cmd->parsed())
      return cmd_synth(registry, expand_functions(functions_str),
                       parse_double_list(r2_str), with_micstar, sample_n,
                       synth_seed, synth_out);
    if (exp_cmd->parsed())
      return cmd_experiment(exp_o, synthetic, expand_functions(exp_functions),
                            parse_double_list(exp_r2), exp_n, exp_registry,
                            exp_input, pairs_mode, global_bounds, iterations,
                            !explicit_params, bin_endpoints, raw_out);
    if (fuzz_cmd->parsed()) return cmd_fuzz(fuzz_o, fuzz_stat, fuzz_n, fuzz_trials);
    if (tune_cmd->parsed())
      return cmd_tune(tune_o, expand_functions(tune_functions),
                      parse_double_list(tune_r2), tune_n, b_list, c_list,
                      tune_iters, tune_registry);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
