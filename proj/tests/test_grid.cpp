#include <catch_amalgamated.hpp>

#include "dpmic/grid.hpp"
#include "dpmic/rng.hpp"

using namespace dpmic;

TEST_CASE("range_equipartition produces exact even boundaries") {
  const AxisPartition p = range_equipartition(0.0, 1.0, 4);
  REQUIRE(p.size() == 4);
  CHECK(p.boundaries.front() == 0.0);
  CHECK(p.boundaries.back() == 1.0);
  CHECK(p.boundaries[2] == Catch::Approx(0.5).margin(1e-15));
  CHECK(p.cell_of(0.0) == 0);
  CHECK(p.cell_of(0.25) == 1);   // half-open parts
  CHECK(p.cell_of(1.0) == 3);    // closed last part
  CHECK(p.cell_of(1.0001) == -1);
  CHECK(p.cell_of(-0.0001) == -1);
}

TEST_CASE("range_equipartition rejects bad input") {
  CHECK_THROWS(range_equipartition(1.0, 1.0, 3));
  CHECK_THROWS(range_equipartition(2.0, 1.0, 3));
  CHECK_THROWS(range_equipartition(0.0, 1.0, 0));
}

TEST_CASE("mass_part_counts follows the ceil rule") {
  CHECK(mass_part_counts(7, 3) == std::vector<std::int64_t>{3, 3, 1});
  CHECK(mass_part_counts(10, 2) == std::vector<std::int64_t>{5, 5});
  CHECK(mass_part_counts(10, 3) == std::vector<std::int64_t>{4, 4, 2});
  CHECK(mass_part_counts(5, 5) == std::vector<std::int64_t>{1, 1, 1, 1, 1});
}

TEST_CASE("mass_part_counts: every part nonempty and sums to n") {
  for (std::int64_t n = 1; n <= 30; ++n)
    for (std::int64_t l = 1; l <= n; ++l) {
      const auto c = mass_part_counts(n, l);
      REQUIRE(c.size() == static_cast<std::size_t>(l));
      std::int64_t sum = 0;
      for (std::int64_t v : c) {
        CHECK(v >= 1);
        sum += v;
      }
      CHECK(sum == n);
      // When the ceil rule leaves a positive remainder it is followed exactly.
      const std::int64_t q = (n + l - 1) / l;
      if (n - q * (l - 1) >= 1)
        for (std::size_t i = 0; i + 1 < c.size(); ++i) CHECK(c[i] == q);
    }
  CHECK_THROWS(mass_part_counts(3, 4));
  CHECK_THROWS(mass_part_counts(3, 0));
}

TEST_CASE("mass_equipartition_cells matches the part counts and rank order") {
  const std::vector<double> v{5.0, 1.0, 3.0, 2.0, 4.0, 0.5, 6.0};
  const auto cell = mass_equipartition_cells(v, 3);
  // ranks: 0.5,1,2 | 3,4,5 | 6
  CHECK(cell == std::vector<int>{1, 0, 1, 0, 1, 0, 2});
}

TEST_CASE("mass_equipartition_cells breaks ties by original index") {
  const std::vector<double> v{1.0, 1.0, 1.0, 1.0};
  CHECK(mass_equipartition_cells(v, 2) == std::vector<int>{0, 0, 1, 1});
}

TEST_CASE("mass equipartition cells are invariant under increasing maps") {
  Rng rng(11);
  std::vector<double> v(40);
  for (auto& x : v) x = rng.uniform01();
  for (std::size_t parts : {2, 3, 7, 13}) {
    const auto base = mass_equipartition_cells(v, parts);
    std::vector<double> cubed(v.size()), scaled(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      cubed[i] = v[i] * v[i] * v[i];
      scaled[i] = 3.5 * v[i] - 7.0;
    }
    CHECK(mass_equipartition_cells(cubed, parts) == base);
    CHECK(mass_equipartition_cells(scaled, parts) == base);
  }
}

TEST_CASE("mass_equipartition boundaries agree with the cell map on distinct values") {
  Rng rng(23);
  std::vector<double> v(50);
  for (auto& x : v) x = rng.uniform01();
  for (std::size_t parts : {2, 5, 9}) {
    const AxisPartition p = mass_equipartition(v, parts);
    const auto cell = mass_equipartition_cells(v, parts);
    for (std::size_t i = 0; i < v.size(); ++i)
      CHECK(p.cell_of(v[i]) == cell[i]);
  }
}

TEST_CASE("count_matrix tallies every point") {
  std::vector<Point> pts{{0.1, 0.1}, {0.9, 0.9}, {0.1, 0.9}, {0.6, 0.2}};
  Dataset d(pts);
  Grid g{range_equipartition(0.0, 1.0, 2), range_equipartition(0.0, 1.0, 2)};
  const CountMatrix m = count_matrix(d, g);
  CHECK(m.total == 4);
  CHECK(m.at(0, 0) == 1);
  CHECK(m.at(0, 1) == 1);
  CHECK(m.at(1, 0) == 1);
  CHECK(m.at(1, 1) == 1);
}

TEST_CASE("coarsen equals counting on the subgrid directly") {
  Rng rng(7);
  std::vector<Point> pts(200);
  for (auto& p : pts) p = {rng.uniform01(), rng.uniform01()};
  Dataset d(pts);
  Grid master{range_equipartition(0.0, 1.0, 12), range_equipartition(0.0, 1.0, 8)};
  const CountMatrix mc = count_matrix(d, master);
  // Subgrid picks every 3rd row boundary and every 2nd column boundary.
  std::vector<double> rb, cb;
  for (std::size_t i = 0; i < master.rows.boundaries.size(); i += 3)
    rb.push_back(master.rows.boundaries[i]);
  for (std::size_t i = 0; i < master.cols.boundaries.size(); i += 2)
    cb.push_back(master.cols.boundaries[i]);
  Grid sub{AxisPartition(rb), AxisPartition(cb)};
  const CountMatrix via_master = coarsen(mc, master, sub);
  const CountMatrix direct = count_matrix(d, sub);
  REQUIRE(via_master.counts == direct.counts);
  CHECK(via_master.total == 200);
}

TEST_CASE("coarsen rejects unaligned boundaries") {
  Grid master{range_equipartition(0.0, 1.0, 4), range_equipartition(0.0, 1.0, 4)};
  CountMatrix mc(4, 4);
  Grid sub{AxisPartition({0.0, 0.3, 1.0}), range_equipartition(0.0, 1.0, 2)};
  CHECK_THROWS(coarsen(mc, master, sub));
}

TEST_CASE("subpartition_count binomials") {
  CHECK(subpartition_count(4, 2) == 3);
  CHECK(subpartition_count(10, 4) == 84);
  CHECK(subpartition_count(7, 7) == 1);
  CHECK(subpartition_count(5, 2) == 4);
  CHECK_THROWS(subpartition_count(3, 4));
}

TEST_CASE("Dataset validates declared bounds") {
  CHECK_THROWS(Dataset(std::vector<Point>{}));
  CHECK_THROWS(Dataset({{2.0, 0.5}}, RangeBounds(0, 1, 0, 1)));
  CHECK_NOTHROW(Dataset({{1.0, 0.5}}, RangeBounds(0, 1, 0, 1)));
}
