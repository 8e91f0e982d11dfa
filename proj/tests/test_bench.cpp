#include <catch_amalgamated.hpp>

#include <fstream>
#include <sstream>

#include "dpmic/bench.hpp"
#include "dpmic/registry.hpp"

using namespace dpmic;

TEST_CASE("function family matches independently generated golden values") {
  std::ifstream in("data/bench_golden.csv");
  REQUIRE(in.good());
  std::string line;
  std::getline(in, line);  // header
  std::size_t checked = 0;
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::string fid, xs, fxs;
    std::getline(ss, fid, ',');
    std::getline(ss, xs, ',');
    std::getline(ss, fxs, ',');
    const int id = std::stoi(fid);
    const double x = std::stod(xs);
    const double fx = std::stod(fxs);
    INFO("function " << id << " at x=" << x);
    CHECK(bench_eval(id, x) == Catch::Approx(fx).margin(1e-12));
    ++checked;
  }
  CHECK(checked == 21 * 12);
}

TEST_CASE("bench_eval input validation") {
  CHECK_THROWS(bench_eval(0, 0.5));
  CHECK_THROWS(bench_eval(22, 0.5));
  CHECK_THROWS(bench_eval(1, -0.1));
  CHECK_THROWS(bench_eval(1, 1.1));
}

TEST_CASE("noiseless distribution lies exactly on the graph") {
  const NoisyDistribution d = make_distribution(12, 1.0);
  CHECK(d.sigma == 0.0);
  REQUIRE(d.centers.size() == kMixtureCenters);
  for (const Point& c : d.centers)
    CHECK(c.y == Catch::Approx(bench_eval(12, c.x)).margin(1e-15));
  Rng rng(4);
  const Dataset s = sample(d, 500, rng);
  for (const Point& p : s.points)
    CHECK(p.y == Catch::Approx(bench_eval(12, p.x)).margin(1e-12));
}

TEST_CASE("samples are deterministic and respect the bounds") {
  const NoisyDistribution d = make_distribution(5, 0.3, 0.4);
  Rng r1(10), r2(10), r3(11);
  const Dataset a = sample(d, 2000, r1);
  const Dataset b = sample(d, 2000, r2);
  const Dataset c = sample(d, 2000, r3);
  bool identical = true, differs = false;
  for (std::size_t i = 0; i < 2000; ++i) {
    identical = identical && a.points[i].x == b.points[i].x &&
                a.points[i].y == b.points[i].y;
    differs = differs || a.points[i].x != c.points[i].x;
    CHECK(d.bounds.contains(a.points[i]));
  }
  CHECK(identical);
  CHECK(differs);
}

TEST_CASE("sigma calibration hits the target R^2 and decreases with it") {
  const NoisyDistribution strong = make_distribution(12, 0.8);
  const NoisyDistribution weak = make_distribution(12, 0.3);
  CHECK(strong.sigma > 0.0);
  CHECK(weak.sigma > strong.sigma);
  const double r2 = bench_detail::empirical_r2(
      strong, 200000, mix_keys(kCalibrationSeed, {12, 800}));
  CHECK(r2 == Catch::Approx(0.8).margin(0.02));
}

TEST_CASE("large-sample oracle: identity high, independence low") {
  // Perfect functional dependence on a modest surrogate sample.
  std::vector<double> xs(20000), ys(20000);
  Rng rng(6);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    xs[i] = rng.uniform01();
    ys[i] = xs[i];
  }
  // 60x80 masters on 20k points leave a little discretization slack; the
  // full-size oracle (260x360 on 1e6 points) lands above 0.999.
  CHECK(mic_star_from_sample(xs, ys, 60, 80).value >= 0.99);
  for (auto& y : ys) y = rng.uniform01();
  CHECK(mic_star_from_sample(xs, ys, 60, 80).value <= 0.05);
}

TEST_CASE("wsum weights come from adjacent midpoints") {
  const std::vector<double> stars{0.3, 0.4, 0.9};
  const auto w = wsum_weights(stars);
  REQUIRE(w.size() == 3);
  CHECK(w[0] == Catch::Approx(0.35).margin(1e-15));
  CHECK(w[1] == Catch::Approx(0.30).margin(1e-15));
  CHECK(w[2] == Catch::Approx(0.35).margin(1e-15));
  const std::vector<double> errs{0.1, 0.2, 0.3};
  CHECK(wsum_objective(stars, errs) ==
        Catch::Approx(0.35 * 0.1 + 0.30 * 0.2 + 0.35 * 0.3).margin(1e-15));
  CHECK_THROWS(wsum_objective({0.4, 0.3}, {0.1, 0.1}));
  CHECK_THROWS(wsum_objective({0.3}, {0.1, 0.2}));
}

TEST_CASE("registry caches sigma and oracle values across instances") {
  const std::string path = "registry_test.tmp";
  std::remove(path.c_str());
  {
    DistributionRegistry reg(path);
    const NoisyDistribution d = reg.distribution(13, 0.5);
    CHECK(d.sigma > 0.0);
  }
  {
    std::ifstream in(path);
    REQUIRE(in.good());
  }
  {
    DistributionRegistry reg(path);
    // Hits the cache: must not re-run the (slow) calibration. We can't time
    // it portably, but the sigma must match the persisted value.
    std::ifstream in(path);
    std::string header, line;
    std::getline(in, header);
    std::getline(in, line);
    std::istringstream ss(line);
    int id;
    double r2, sigma;
    std::string star;
    ss >> id >> r2 >> sigma >> star;
    CHECK(id == 13);
    CHECK(r2 == 0.5);
    CHECK(reg.distribution(13, 0.5).sigma == sigma);
    CHECK(std::isnan(std::stod(star)));
  }
  std::remove(path.c_str());
}
