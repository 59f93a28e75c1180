#include "tpnet/sampling.hpp"

#include <doctest.h>

#include <set>
#include <sstream>

using namespace tpnet;

TEST_CASE("1-D grid [0,1] with 3 points") {
  const Domain dom = Domain::box(Vec::Constant(1, 0.0), Vec::Constant(1, 1.0));
  const auto set = sample_uniform_grid(dom, {3});
  REQUIRE(set.n_interior() == 1);
  REQUIRE(set.n_boundary() == 2);
  CHECK(set.interior(0, 0) == doctest::Approx(0.5));
  CHECK(set.boundary.col(0).minCoeff() == 0.0);
  CHECK(set.boundary.col(0).maxCoeff() == 1.0);
}

TEST_CASE("2-D 101x101 grid splits 400 boundary points") {
  const Domain dom = Domain::box(Vec::Constant(2, -1.0), Vec::Constant(2, 1.0));
  const auto set = sample_uniform_grid(dom, {101, 101});
  CHECK(set.n_boundary() == 4 * 101 - 4);
  CHECK(set.n_interior() == 101 * 101 - 400);
  CHECK(set.n_initial() == 0);
  CHECK(set.total() == 101 * 101);
}

TEST_CASE("time grid tags the whole t=0 face as initial") {
  const Domain dom = Domain::box_time(Vec::Constant(2, 0.0), Vec::Constant(2, 1.0), 0.0, 1.0);
  const auto set = sample_uniform_grid(dom, {51, 51, 51});
  CHECK(set.n_initial() == 51 * 51);
  // Spatial rim on the 50 remaining time levels.
  CHECK(set.n_boundary() == (4 * 51 - 4) * 50);
  CHECK(set.total() == 51 * 51 * 51);
  CHECK(set.initial.col(2).cwiseAbs().maxCoeff() == 0.0);  // t = 0 exactly
  // Interior includes the t = tf level (the PDE holds on (0, tf]).
  CHECK(set.interior.col(2).maxCoeff() == 1.0);
  CHECK(set.interior.col(2).minCoeff() > 0.0);
}

TEST_CASE("grid rejects degenerate requests") {
  const Domain dom = Domain::box(Vec::Constant(2, 0.0), Vec::Constant(2, 1.0));
  CHECK_THROWS_AS(sample_uniform_grid(dom, {1, 3}), InvalidSpecError);
  CHECK_THROWS_AS(sample_uniform_grid(dom, {3}), InvalidSpecError);
  CHECK_THROWS_AS(Domain::box(Vec::Constant(2, 1.0), Vec::Constant(2, 0.0)), InvalidSpecError);
}

TEST_CASE("lhs interior marginals hit every bin exactly once") {
  const Domain dom = Domain::box(Vec::Constant(5, -1.0), Vec::Constant(5, 1.0));
  const Index n = 200;
  const auto set = sample_lhs(dom, n, 2 * 5 * 10, 77);
  REQUIRE(set.n_interior() == n);
  for (Index j = 0; j < 5; ++j) {
    std::set<Index> bins;
    for (Index i = 0; i < n; ++i) {
      const Real unit = (set.interior(i, j) + 1.0) / 2.0;
      CHECK(unit >= 0.0);
      CHECK(unit < 1.0);
      bins.insert(static_cast<Index>(unit * static_cast<Real>(n)));
    }
    CHECK(bins.size() == static_cast<std::size_t>(n));  // all n strata hit once
  }
}

TEST_CASE("lhs boundary splits evenly per face: d=5, 1000 points") {
  const Domain dom = Domain::box(Vec::Constant(5, -1.0), Vec::Constant(5, 1.0));
  const auto set = sample_lhs(dom, 100, 1000, 3);
  REQUIRE(set.n_boundary() == 1000);
  // 100 per face: count points with each coordinate pinned to each bound.
  for (Index axis = 0; axis < 5; ++axis) {
    Index lo = 0, hi = 0;
    for (Index i = 0; i < set.n_boundary(); ++i) {
      if (set.boundary(i, axis) == -1.0) ++lo;
      if (set.boundary(i, axis) == 1.0) ++hi;
    }
    CHECK(lo == 100);
    CHECK(hi == 100);
  }
}

TEST_CASE("lhs d=1 degenerates to the endpoints") {
  const Domain dom = Domain::box(Vec::Constant(1, 2.0), Vec::Constant(1, 3.0));
  const auto set = sample_lhs(dom, 10, 2, 5);
  REQUIRE(set.n_boundary() == 2);
  CHECK(set.boundary(0, 0) == 2.0);
  CHECK(set.boundary(1, 0) == 3.0);
}

TEST_CASE("lhs is deterministic per seed and rejects bad splits") {
  const Domain dom = Domain::box(Vec::Constant(3, 0.0), Vec::Constant(3, 1.0));
  const auto a = sample_lhs(dom, 50, 12, 9);
  const auto b = sample_lhs(dom, 50, 12, 9);
  CHECK(a.interior == b.interior);
  CHECK(a.boundary == b.boundary);
  const auto c = sample_lhs(dom, 50, 12, 10);
  CHECK(a.interior != c.interior);
  CHECK_THROWS_AS(sample_lhs(dom, 50, 13, 9), InvalidSpecError);
}

TEST_CASE("collocation csv export carries roles and full precision") {
  const Domain dom = Domain::box(Vec::Constant(1, 0.0), Vec::Constant(1, 1.0));
  const auto set = sample_uniform_grid(dom, {3});
  std::ostringstream out;
  write_csv(set, out);
  const std::string text = out.str();
  CHECK(text.find("role,x0\n") == 0);
  CHECK(text.find("interior,5.0000000000000000e-01") != std::string::npos);
  CHECK(text.find("boundary,0.0000000000000000e+00") != std::string::npos);
}

TEST_CASE("system csv export") {
  Mat a(2, 2);
  a << 1, 2, 3, 4;
  Vec f(2);
  f << 5, 6;
  std::ostringstream out;
  write_csv(a, f, out);
  CHECK(out.str().find("a0,a1,f\n") == 0);
  CHECK(out.str().find("3.0000000000000000e+00") != std::string::npos);
}
