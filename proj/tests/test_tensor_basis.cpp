#include "tpnet/operators.hpp"
#include "tpnet/selfcheck.hpp"

#include <doctest.h>

#include <random>

using namespace tpnet;

namespace {

JetBatch constant_jet(Index n, Index d, const Vec& values) {
  JetBatch jet;
  jet.values = values.transpose().replicate(n, 1);
  jet.grad.assign(static_cast<std::size_t>(d), Mat::Zero(n, values.size()));
  jet.diag2.assign(static_cast<std::size_t>(d), Mat::Zero(n, values.size()));
  return jet;
}

Mat random_points(std::uint64_t seed, Index n, Index d) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<Real> dist(-1, 1);
  Mat pts(n, d);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < d; ++j) pts(i, j) = dist(rng);
  return pts;
}

}  // namespace

TEST_CASE("p=1 scalar product") {
  Vec a(1), b(1);
  a << 3.0;
  b << 5.0;
  const Mat values = tensor_basis_values(constant_jet(1, 1, a), constant_jet(1, 1, b));
  REQUIRE(values.rows() == 1);
  REQUIRE(values.cols() == 1);
  CHECK(values(0, 0) == 15.0);
}

TEST_CASE("p=2 flat ordering m*p+n") {
  Vec a(2), b(2);
  a << 1, 2;
  b << 3, 4;
  const Mat values = tensor_basis_values(constant_jet(1, 1, a), constant_jet(1, 1, b));
  REQUIRE(values.cols() == 4);
  CHECK(values(0, 0) == 3);  // (m=0,n=0)
  CHECK(values(0, 1) == 4);  // (m=0,n=1)
  CHECK(values(0, 2) == 6);  // (m=1,n=0)
  CHECK(values(0, 3) == 8);  // (m=1,n=1)
}

TEST_CASE("p=10 yields M=100 basis columns") {
  const TensorBasis basis = make_tensor_basis(Architecture::kElm, 2, 10, InitScheme::kKaiming, 4);
  CHECK(basis.basis_count() == 100);
  const auto a = eval_jets(basis.first.spec, basis.first.params, random_points(1, 3, 2));
  const auto b = eval_jets(basis.second.spec, basis.second.params, random_points(1, 3, 2));
  CHECK(tensor_basis_values(a, b).cols() == 100);
}

TEST_CASE("deriv1 vanishes when both factors are constant along the axis") {
  Vec a(2), b(2);
  a << 1, 2;
  b << 3, 4;
  const Mat d1 = tensor_basis_deriv1(constant_jet(5, 2, a), constant_jet(5, 2, b), 1);
  CHECK(d1.isZero(0));
}

TEST_CASE("d=1 odd-function pair has zero value and derivative at the origin") {
  // phi1 = tanh(x), phi2 = tanh(2x): at x=0 the product rule gives 1*0 + 0*2.
  auto elm = [](Real w, std::uint64_t seed) {
    SubnetworkSpec spec = SubnetworkSpec::elm(1, 1, InitScheme::kKaiming, seed);
    SubnetworkParams params;
    params.weights = {Mat::Constant(1, 1, w)};
    params.biases = {Vec::Zero(1)};
    params.proj_weights.resize(1);
    params.proj_biases.resize(1);
    return std::pair{spec, params};
  };
  const auto [s1, p1] = elm(1.0, 0);
  const auto [s2, p2] = elm(2.0, 1);
  const auto j1 = eval_jets(s1, p1, Mat::Zero(1, 1));
  const auto j2 = eval_jets(s2, p2, Mat::Zero(1, 1));
  CHECK(tensor_basis_values(j1, j2)(0, 0) == 0.0);
  CHECK(tensor_basis_deriv1(j1, j2, 0)(0, 0) == 0.0);
}

TEST_CASE("injected linear jets reproduce (x^2)'' = 2") {
  // f = g = x as hand-built jets: value x, slope 1, curvature 0.
  JetBatch lin;
  lin.values = Mat::Constant(1, 1, 0.7);
  lin.grad = {Mat::Constant(1, 1, 1.0)};
  lin.diag2 = {Mat::Zero(1, 1)};
  const Mat d2 = tensor_basis_deriv2(lin, lin, 0);
  CHECK(d2(0, 0) == doctest::Approx(2.0));
}

TEST_CASE("tensor derivatives match finite differences of the values") {
  std::mt19937_64 rng(21);
  for (const Architecture arch :
       {Architecture::kElm, Architecture::kMlp, Architecture::kResNet}) {
    const TensorBasis basis = make_tensor_basis(arch, 2, 4, InitScheme::kXavier, rng());
    const auto err = check::tensor_fd_errors(basis, random_points(rng(), 20, 2));
    CAPTURE(to_string(arch));
    CHECK(err.grad <= 1e-6);
    CHECK(err.diag2 <= 1e-4);
  }
}

TEST_CASE("scaling one factor scales values and all derivative columns") {
  const TensorBasis basis = make_tensor_basis(Architecture::kMlp, 2, 3, InitScheme::kXavier, 8);
  const Mat pts = random_points(5, 6, 2);
  JetBatch a = eval_jets(basis.first.spec, basis.first.params, pts);
  const JetBatch b = eval_jets(basis.second.spec, basis.second.params, pts);

  const Mat v = tensor_basis_values(a, b);
  const Mat d1 = tensor_basis_deriv1(a, b, 0);
  const Mat d2 = tensor_basis_deriv2(a, b, 1);

  constexpr Real c = -2.5;
  a.values *= c;
  for (auto& g : a.grad) g *= c;
  for (auto& h : a.diag2) h *= c;

  CHECK((tensor_basis_values(a, b) - c * v).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((tensor_basis_deriv1(a, b, 0) - c * d1).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((tensor_basis_deriv2(a, b, 1) - c * d2).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("swapping the subnetworks permutes columns by (m,n)->(n,m)") {
  const TensorBasis basis = make_tensor_basis(Architecture::kElm, 2, 4, InitScheme::kKaiming, 33);
  const Mat pts = random_points(11, 8, 2);
  const JetBatch a = eval_jets(basis.first.spec, basis.first.params, pts);
  const JetBatch b = eval_jets(basis.second.spec, basis.second.params, pts);
  const Index p = 4;

  // Swapped sums re-associate (f''g + 2f'g' + fg'' vs g''f + ...), so match
  // to roundoff rather than bitwise.
  auto check_permuted = [&](const Mat& ab, const Mat& ba) {
    for (Index m = 0; m < p; ++m)
      for (Index n = 0; n < p; ++n)
        CHECK((ab.col(m * p + n) - ba.col(n * p + m)).cwiseAbs().maxCoeff() <= 1e-14);
  };
  check_permuted(tensor_basis_values(a, b), tensor_basis_values(b, a));
  check_permuted(tensor_basis_deriv1(a, b, 0), tensor_basis_deriv1(b, a, 0));
  check_permuted(tensor_basis_deriv2(a, b, 1), tensor_basis_deriv2(b, a, 1));
}

TEST_CASE("mismatched jet batches are rejected") {
  const TensorBasis b1 = make_tensor_basis(Architecture::kElm, 2, 3, InitScheme::kKaiming, 1);
  const auto a = eval_jets(b1.first.spec, b1.first.params, random_points(1, 4, 2));
  const auto b = eval_jets(b1.second.spec, b1.second.params, random_points(2, 5, 2));
  CHECK_THROWS_AS(tensor_basis_values(a, b), ShapeError);  // different N

  const auto c = eval_jets(b1.second.spec, b1.second.params, random_points(3, 4, 2));
  CHECK_THROWS_AS(tensor_basis_deriv1(a, c, 2), ShapeError);  // axis out of range
}

TEST_CASE("factored apply matches the materialized table") {
  const TensorBasis basis = make_tensor_basis(Architecture::kResNet, 2, 4, InitScheme::kXavier, 6);
  const Mat pts = random_points(9, 10, 2);
  const JetBatch a = eval_jets(basis.first.spec, basis.first.params, pts);
  const JetBatch b = eval_jets(basis.second.spec, basis.second.params, pts);
  std::mt19937_64 rng(12);
  std::normal_distribution<Real> nd;
  Vec w(16);
  for (Index i = 0; i < w.size(); ++i) w(i) = nd(rng);

  CHECK((tensor_basis_apply(a, b, w) - tensor_basis_values(a, b) * w).cwiseAbs().maxCoeff() <
        1e-13);
  CHECK((tensor_basis_apply_deriv1(a, b, w, 1) - tensor_basis_deriv1(a, b, 1) * w)
            .cwiseAbs()
            .maxCoeff() < 1e-13);
}

TEST_CASE("panel operator rows equal the reference table route") {
  const TensorBasis basis = make_tensor_basis(Architecture::kMlp, 3, 4, InitScheme::kXavier, 44);
  const Mat pts = random_points(50, 12, 3);
  const JetBatch a = eval_jets(basis.first.spec, basis.first.params, pts);
  const JetBatch b = eval_jets(basis.second.spec, basis.second.params, pts);

  LinearOperator op;
  op.value = 0.5;
  op.deriv1 = Vec::Zero(3);
  op.deriv1(2) = 1.0;
  op.deriv2 = Vec::Constant(3, -0.25);

  const Mat direct = operator_rows(op, a, b);
  const Mat reference = apply_operator(op, tensor_basis_tables(a, b));
  CHECK((direct - reference).cwiseAbs().maxCoeff() < 1e-12);
}
