#include <catch_amalgamated.hpp>

#include <cmath>

#include "dpmic/dp.hpp"
#include "dpmic/rng.hpp"

using namespace dpmic;

namespace {

Dataset random_cloud(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Point> pts(n);
  for (auto& p : pts) p = {rng.uniform01(), rng.uniform01()};
  return Dataset(std::move(pts));
}

}  // namespace

TEST_CASE("sensitivity bound values") {
  CHECK(micr_sensitivity(5000) ==
        Catch::Approx(0.011030169903639558).margin(1e-15));
  CHECK(micr_sensitivity(200) == Catch::Approx(0.18287712379549448).margin(1e-15));
  CHECK(mice_sensitivity(5000, 165) ==
        Catch::Approx(0.9693890170502636).margin(1e-15));
  CHECK(mice_sensitivity(100, 20) ==
        Catch::Approx(3.6175424759098895).margin(1e-15));
  CHECK_THROWS(micr_sensitivity(3));
  CHECK_THROWS(mice_sensitivity(5, 10));
  CHECK_THROWS(mice_sensitivity(10, 0));
}

TEST_CASE("laplace sampler: mean, variance and symmetry") {
  Rng rng(123);
  const double b = 0.25;
  const std::size_t n = 500000;
  double sum = 0.0, sq = 0.0;
  std::size_t pos = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = laplace_sample(b, rng);
    sum += v;
    sq += v * v;
    if (v > 0) ++pos;
  }
  const double mean = sum / n;
  const double var = sq / n - mean * mean;
  CHECK(std::abs(mean) < 0.003);
  CHECK(var == Catch::Approx(2.0 * b * b).epsilon(0.02));
  CHECK(std::abs(static_cast<double>(pos) / n - 0.5) < 0.005);
}

TEST_CASE("truncated geometric pmf: closed form, normalization, dp ratio") {
  for (double eps : {0.1, 0.5, 1.0, 3.0}) {
    for (std::int64_t n : {5, 20, 100}) {
      for (std::int64_t f : {std::int64_t{0}, n / 2, n}) {
        const TruncGeomDist dist(eps, n, f);
        const double rho = std::exp(-eps);
        double total = 0.0;
        for (std::int64_t i = 0; i <= n; ++i) {
          double expect;
          if (i == 0)
            expect = std::pow(rho, static_cast<double>(f)) / (1.0 + rho);
          else if (i == n)
            expect = std::pow(rho, static_cast<double>(n - f)) / (1.0 + rho);
          else
            expect = (1.0 - rho) / (1.0 + rho) *
                     std::pow(rho, static_cast<double>(std::llabs(f - i)));
          CHECK(dist.pmf[static_cast<std::size_t>(i)] ==
                Catch::Approx(expect).margin(1e-12));
          total += dist.pmf[static_cast<std::size_t>(i)];
        }
        CHECK(total == Catch::Approx(1.0).margin(1e-9));
      }
      // Neighboring centers: pmf ratio bounded by e^eps everywhere.
      const TruncGeomDist a(eps, n, n / 2), b(eps, n, n / 2 + 1);
      for (std::int64_t i = 0; i <= n; ++i) {
        const double ratio = a.pmf[static_cast<std::size_t>(i)] /
                             b.pmf[static_cast<std::size_t>(i)];
        CHECK(ratio <= std::exp(eps) * (1.0 + 1e-12));
        CHECK(ratio >= std::exp(-eps) * (1.0 - 1e-12));
      }
    }
  }
  CHECK(TruncGeomDist(1.0, 10, 0).pmf[0] ==
        Catch::Approx(0.7310585786300049).margin(1e-12));
}

TEST_CASE("truncated geometric sampling matches its pmf") {
  const TruncGeomDist dist(0.8, 12, 4);
  Rng rng(55);
  const std::size_t n = 200000;
  std::vector<double> freq(13, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::int64_t v = truncgeom_sample(dist, rng);
    REQUIRE(v >= 0);
    REQUIRE(v <= 12);
    freq[static_cast<std::size_t>(v)] += 1.0 / n;
  }
  for (std::size_t i = 0; i <= 12; ++i)
    CHECK(freq[i] == Catch::Approx(dist.pmf[i]).margin(0.005));
}

TEST_CASE("private mechanisms are clamped, seeded and reproducible") {
  const Dataset d = random_cloud(200, 9);
  const RangeBounds box(0, 1, 0, 1);
  EstimatorParams params{24, 2.0};
  PrivacyParams priv{1.0, 77};
  const double a1 = mice_lap(d, params, priv);
  const double a2 = mice_lap(d, params, priv);
  const double b1 = micr_lap(d, box, params, priv);
  const GeomResult g1 = micr_geom(d, box, params, priv);
  const GeomResult g2 = micr_geom(d, box, params, priv);
  CHECK(a1 == a2);
  CHECK(b1 == micr_lap(d, box, params, priv));
  CHECK(g1.value == g2.value);
  for (double v : {a1, b1, g1.value}) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
  // At eps=1 the mass-family noise scale dwarfs [0, 1]; both runs clamp to an
  // endpoint. A large eps keeps the noise visible so seeds can be compared.
  PrivacyParams other{50.0, 78};
  PrivacyParams gentle{50.0, 77};
  CHECK(mice_lap(d, params, other) != mice_lap(d, params, gentle));
  CHECK(micr_lap(d, box, params, other) != micr_lap(d, box, params, gentle));
}

TEST_CASE("geometric mechanism converges to the plain statistic as eps grows") {
  const Dataset d = random_cloud(500, 13);
  const RangeBounds box(0, 1, 0, 1);
  EstimatorParams params{24, 1.0};
  const double base = micr(d, box, params).value;
  PrivacyParams priv{200.0, 5};
  const GeomResult g = micr_geom(d, box, params, priv);
  CHECK_FALSE(g.degenerate);
  CHECK(g.value == Catch::Approx(base).margin(1e-9));
}

TEST_CASE("laplace mechanisms add unbiased noise before clamping") {
  const Dataset d = random_cloud(300, 21);
  const RangeBounds box(0, 1, 0, 1);
  EstimatorParams params{24, 1.0};
  const double base = micr(d, box, params).value;
  double acc = 0.0;
  const std::size_t runs = 400;
  for (std::size_t i = 0; i < runs; ++i) {
    PrivacyParams priv{4.0, 1000 + i};
    acc += micr_lap(d, box, params, priv);
  }
  // eps=4 at n=300: scale ~0.03; clamping at 0 leaves only a small upward
  // shift, so the mean stays near the base value.
  CHECK(acc / runs == Catch::Approx(base).margin(0.03));
}

TEST_CASE("privacy parameter validation") {
  const Dataset d = random_cloud(50, 1);
  EstimatorParams params{16, 1.0};
  PrivacyParams bad{0.0, 1};
  CHECK_THROWS(mice_lap(d, params, bad));
  CHECK_THROWS(micr_geom(d, RangeBounds(0, 1, 0, 1), params, bad));
  CHECK_THROWS(TruncGeomDist(1.0, 5, 7));
  CHECK_THROWS(TruncGeomDist(0.0, 5, 2));
}
