#include "tpnet/problem.hpp"
#include "tpnet/selfcheck.hpp"

#include <doctest.h>

#include <random>

using namespace tpnet;

namespace {

constexpr Real kPi = 3.14159265358979323846;

Mat interior_points(const PdeProblem& problem, Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Mat pts(n, problem.domain.dim());
  for (Index j = 0; j < problem.domain.dim(); ++j) {
    std::uniform_real_distribution<Real> dist(problem.domain.lower(j) + 1e-3,
                                              problem.domain.upper(j) - 1e-3);
    for (Index i = 0; i < n; ++i) pts(i, j) = dist(rng);
  }
  return pts;
}

/// Hand-built polynomial basis tables {1, x, x^2, y^2} on given 2-D points.
BasisTables polynomial_tables_2d(const Mat& pts) {
  const Index n = pts.rows();
  BasisTables t;
  t.values.resize(n, 4);
  t.values.col(0).setOnes();
  t.values.col(1) = pts.col(0);
  t.values.col(2) = pts.col(0).array().square();
  t.values.col(3) = pts.col(1).array().square();
  t.deriv1.assign(2, Mat::Zero(n, 4));
  t.deriv2.assign(2, Mat::Zero(n, 4));
  t.deriv1[0].col(1).setOnes();
  t.deriv1[0].col(2) = 2 * pts.col(0);
  t.deriv1[1].col(3) = 2 * pts.col(1);
  t.deriv2[0].col(2).setConstant(2.0);
  t.deriv2[1].col(3).setConstant(2.0);
  return t;
}

}  // namespace

TEST_CASE("helmholtz source term matches the closed form") {
  const auto problem = catalog("helmholtz2d");
  Vec x(2);
  x << 0.3, -0.7;
  const Real expected =
      (1.0 - kPi * kPi - 16 * kPi * kPi) * std::sin(kPi * 0.3) * std::sin(4 * kPi * -0.7);
  CHECK(problem.source(x) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("poisson_hd source matches (1/d)(sin(mean) - 2)") {
  const auto problem = catalog_poisson_hd(10);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<Real> dist(-1, 1);
  Vec x(10);
  for (Index i = 0; i < 10; ++i) x(i) = dist(rng);
  CHECK(problem.source(x) == doctest::Approx((std::sin(x.mean()) - 2.0) / 10.0).epsilon(1e-13));
}

TEST_CASE("burgers nonlinearity is u (u_x + u_y) with zero source") {
  const auto problem = catalog("burgers2d");
  REQUIRE(!problem.is_linear());
  Vec u(2);
  u << 2.0, -1.0;
  Mat du(2, 3);
  du << 1, 2, 9, 3, 4, 9;  // time column must be ignored
  const Vec nl = problem.nonlinear(u, du);
  CHECK(nl(0) == doctest::Approx(2.0 * 3.0));
  CHECK(nl(1) == doctest::Approx(-1.0 * 7.0));
  Vec x(3);
  x << 0.5, 0.5, 0.5;
  CHECK(problem.source(x) == 0.0);
}

TEST_CASE("catalog self-consistency: exact solutions satisfy their PDEs") {
  for (const auto& name : catalog_names()) {
    const auto problem = catalog(name);
    const Real residual = check::manufactured_residual(problem, interior_points(problem, 100, 8));
    CAPTURE(name);
    CHECK(residual <= 1e-6);
  }
}

TEST_CASE("unknown catalog names raise") {
  CHECK_THROWS_AS(catalog("not_a_problem"), UnknownNameError);
}

TEST_CASE("assembly stacks interior, boundary, initial rows in order") {
  const auto problem = catalog("heat2d");
  const CollocationSet colloc =
      sample_uniform_grid(problem.domain, std::vector<Index>{5, 5, 5});
  const TensorBasis basis =
      make_tensor_basis(Architecture::kElm, 3, 4, InitScheme::kXavier, 31);
  const auto sys = assemble_linear_system(problem, basis, colloc);

  CHECK(sys.rows_interior == colloc.n_interior());
  CHECK(sys.rows_boundary == colloc.n_boundary());
  CHECK(sys.rows_initial == colloc.n_initial());
  CHECK(sys.rows_velocity == 0);
  CHECK(sys.A.rows() == colloc.total());
  CHECK(sys.A.cols() == 16);

  // Boundary block rows are plain basis values; initial block rows too.
  const JetBatch a = eval_jets(basis.first.spec, basis.first.params, colloc.boundary);
  const JetBatch b = eval_jets(basis.second.spec, basis.second.params, colloc.boundary);
  const Mat expected = tensor_basis_values(a, b);
  CHECK((sys.A.middleRows(sys.rows_interior, sys.rows_boundary) - expected)
            .cwiseAbs()
            .maxCoeff() < 1e-14);

  // F carries g on the boundary block.
  const Vec g = evaluate_field(problem.boundary_data, colloc.boundary);
  CHECK((sys.F.segment(sys.rows_interior, sys.rows_boundary) - g).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("wave assembly appends initial-velocity rows") {
  const auto problem = catalog("wave2d");
  REQUIRE(problem.has_initial_velocity);
  const CollocationSet colloc =
      sample_uniform_grid(problem.domain, std::vector<Index>{4, 4, 4});
  const TensorBasis basis =
      make_tensor_basis(Architecture::kElm, 3, 3, InitScheme::kXavier, 5);
  const auto sys = assemble_linear_system(problem, basis, colloc);
  CHECK(sys.rows_velocity == colloc.n_initial());
  CHECK(sys.A.rows() == colloc.total() + colloc.n_initial());

  // The velocity block applies d/dt to the basis at the initial points.
  const JetBatch a = eval_jets(basis.first.spec, basis.first.params, colloc.initial);
  const JetBatch b = eval_jets(basis.second.spec, basis.second.params, colloc.initial);
  const Mat expected = tensor_basis_deriv1(a, b, 2);
  CHECK((sys.A.bottomRows(sys.rows_velocity) - expected).cwiseAbs().maxCoeff() < 1e-14);
  const Vec w = evaluate_field(problem.initial_velocity, colloc.initial);
  CHECK((sys.F.tail(sys.rows_velocity) - w).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("poisson interior rows are the negative laplacian columns") {
  const auto problem = catalog_poisson_hd(2);
  Mat pts = interior_points(problem, 6, 17);
  const TensorBasis basis = make_tensor_basis(Architecture::kMlp, 2, 3, InitScheme::kXavier, 3);
  const JetBatch a = eval_jets(basis.first.spec, basis.first.params, pts);
  const JetBatch b = eval_jets(basis.second.spec, basis.second.params, pts);
  const Mat rows = operator_rows(problem.interior_op, a, b);
  const Mat expected = -(tensor_basis_deriv2(a, b, 0) + tensor_basis_deriv2(a, b, 1));
  CHECK((rows - expected).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("helmholtz interior rows are laplacian plus k^2 value") {
  const auto problem = catalog("helmholtz2d");
  const TensorBasis basis = make_tensor_basis(Architecture::kElm, 2, 4, InitScheme::kKaiming, 2);
  const Mat pts = interior_points(problem, 5, 23);
  const JetBatch a = eval_jets(basis.first.spec, basis.first.params, pts);
  const JetBatch b = eval_jets(basis.second.spec, basis.second.params, pts);
  const Mat rows = operator_rows(problem.interior_op, a, b);
  const Mat expected = tensor_basis_deriv2(a, b, 0) + tensor_basis_deriv2(a, b, 1) +
                       tensor_basis_values(a, b);  // k = 1
  CHECK((rows - expected).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("manufactured solution on an injected polynomial basis is exact") {
  // -Laplace u = f with u = x^2 + y^2 lies in span{1, x, x^2, y^2}.
  const Domain dom = Domain::box(Vec::Constant(2, -1.0), Vec::Constant(2, 1.0));
  const CollocationSet colloc = sample_uniform_grid(dom, {9, 9});

  LinearOperator minus_laplace = LinearOperator::laplacian(2, 2, -1.0);
  const Mat a_int = apply_operator(minus_laplace, polynomial_tables_2d(colloc.interior));
  const Mat a_bc =
      apply_operator(LinearOperator::identity(), polynomial_tables_2d(colloc.boundary));

  Mat a(colloc.total(), 4);
  a << a_int, a_bc;
  Vec f(colloc.total());
  f.head(colloc.n_interior()).setConstant(-4.0);  // -Laplace(x^2+y^2)
  f.tail(colloc.n_boundary()) =
      colloc.boundary.col(0).array().square() + colloc.boundary.col(1).array().square();

  const auto r = solve_lstsq(a, f);
  CHECK(r.residual_norm <= 1e-12);
  Vec expected(4);
  expected << 0, 0, 1, 1;
  CHECK((r.coefficients - expected).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("operator linearity: assembled rows scale with the basis") {
  const TensorBasis basis = make_tensor_basis(Architecture::kElm, 2, 3, InitScheme::kXavier, 13);
  const Mat pts = interior_points(catalog("helmholtz2d"), 8, 29);
  JetBatch a = eval_jets(basis.first.spec, basis.first.params, pts);
  const JetBatch b = eval_jets(basis.second.spec, basis.second.params, pts);
  const auto op = catalog("helmholtz2d").interior_op;
  const Mat before = operator_rows(op, a, b);
  a.values *= 3.0;
  for (auto& g : a.grad) g *= 3.0;
  for (auto& h : a.diag2) h *= 3.0;
  const Mat after = operator_rows(op, a, b);
  CHECK((after - 3.0 * before).cwiseAbs().maxCoeff() < 1e-11);
}

TEST_CASE("operator dimension mismatches are unsupported") {
  LinearOperator op;
  op.deriv2 = Vec::Ones(3);  // 3 coefficients against a 2-D basis
  const TensorBasis basis = make_tensor_basis(Architecture::kElm, 2, 2, InitScheme::kKaiming, 1);
  const Mat pts = Mat::Zero(2, 2);
  const JetBatch a = eval_jets(basis.first.spec, basis.first.params, pts);
  const JetBatch b = eval_jets(basis.second.spec, basis.second.params, pts);
  CHECK_THROWS_AS(operator_rows(op, a, b), UnsupportedOperatorError);
}
