#include "tpnet/problem.hpp"

#include <cmath>

namespace tpnet {

namespace {

constexpr Real kPi = 3.14159265358979323846;

PdeProblem make_func2d() {
  PdeProblem p;
  p.name = "func2d";
  p.domain = Domain::box(Vec::Constant(2, -1.0), Vec::Constant(2, 1.0));
  // Pure approximation: every collocation point is a plain value row.
  p.interior_op = LinearOperator::identity();
  p.boundary_op = LinearOperator::identity();
  auto u = [](const Vec& x) { return std::sin(kPi * x(0)) * std::sin(4 * kPi * x(1)); };
  p.exact = u;
  p.source = u;
  p.boundary_data = u;
  p.default_init = InitScheme::kKaiming;
  p.default_grid = {101, 101};
  return p;
}

PdeProblem make_helmholtz2d() {
  constexpr Real a1 = 1, a2 = 4, k = 1;
  PdeProblem p;
  p.name = "helmholtz2d";
  p.domain = Domain::box(Vec::Constant(2, -1.0), Vec::Constant(2, 1.0));
  // Delta u + k^2 u = q
  p.interior_op = LinearOperator::laplacian(2, 2);
  p.interior_op.value = k * k;
  auto u = [](const Vec& x) { return std::sin(a1 * kPi * x(0)) * std::sin(a2 * kPi * x(1)); };
  p.exact = u;
  p.source = [u](const Vec& x) {
    return (k * k - (a1 * kPi) * (a1 * kPi) - (a2 * kPi) * (a2 * kPi)) * u(x);
  };
  p.boundary_data = u;
  p.default_init = InitScheme::kKaiming;
  p.default_grid = {101, 101};
  return p;
}

PdeProblem make_heat2d() {
  PdeProblem p;
  p.name = "heat2d";
  p.domain = Domain::box_time(Vec::Constant(2, 0.0), Vec::Constant(2, 1.0), 0.0, 1.0);
  // u_t - Delta u = f
  p.interior_op = LinearOperator::laplacian(3, 2, -1.0);
  p.interior_op.deriv1 = Vec::Zero(3);
  p.interior_op.deriv1(2) = 1.0;
  auto u = [](const Vec& x) {
    return 2 * std::exp(-x(2)) * std::sin(kPi / 2 * x(0)) * std::sin(kPi / 2 * x(1));
  };
  p.exact = u;
  // u_t = -u and Delta u = -(pi^2/2) u, so f = (pi^2/2 - 1) u.
  p.source = [u](const Vec& x) { return (kPi * kPi / 2 - 1) * u(x); };
  p.boundary_data = u;
  p.initial_data = [u](const Vec& x) { return u(x); };
  p.default_init = InitScheme::kXavier;
  p.default_grid = {51, 51, 51};
  return p;
}

PdeProblem make_wave2d() {
  PdeProblem p;
  p.name = "wave2d";
  p.domain = Domain::box_time(Vec::Constant(2, 0.0), Vec::Constant(2, 1.0), 0.0, 1.0);
  // u_tt - Delta u = f
  p.interior_op = LinearOperator::laplacian(3, 2, -1.0);
  p.interior_op.deriv2(2) = 1.0;
  p.has_initial_velocity = true;
  auto u = [](const Vec& x) {
    return std::sin(kPi / 2 * x(0)) * std::sin(kPi / 2 * x(1)) * std::sin(kPi / 2 * x(2));
  };
  p.exact = u;
  // u_tt = -(pi/2)^2 u, Delta u = -2 (pi/2)^2 u, so f = (pi^2/4) u.
  p.source = [u](const Vec& x) { return kPi * kPi / 4 * u(x); };
  p.boundary_data = u;
  p.initial_data = [](const Vec&) { return 0.0; };
  p.initial_velocity = [](const Vec& x) {
    return kPi / 2 * std::sin(kPi / 2 * x(0)) * std::sin(kPi / 2 * x(1));
  };
  p.default_init = InitScheme::kXavier;
  p.default_grid = {51, 51, 51};
  return p;
}

PdeProblem make_burgers2d() {
  constexpr Real zeta = 1.0;
  PdeProblem p;
  p.name = "burgers2d";
  p.domain = Domain::box_time(Vec::Constant(2, 0.0), Vec::Constant(2, 1.0), 0.0, 1.0);
  // u_t + u (u_x + u_y) - zeta Delta u = 0; linear part u_t - zeta Delta u.
  p.interior_op = LinearOperator::laplacian(3, 2, -zeta);
  p.interior_op.deriv1 = Vec::Zero(3);
  p.interior_op.deriv1(2) = 1.0;
  p.nonlinear = [](const Vec& u, const Mat& du) -> Vec {
    return u.array() * (du.col(0).array() + du.col(1).array());
  };
  auto u = [](const Vec& x) { return 1.0 / (1.0 + std::exp((x(0) + x(1) - x(2)) / (2 * zeta))); };
  p.exact = u;
  p.source = [](const Vec&) { return 0.0; };
  p.boundary_data = u;
  p.initial_data = [u](const Vec& x) { return u(x); };
  p.default_init = InitScheme::kXavier;
  p.default_grid = {51, 51, 51};
  return p;
}

PdeProblem make_diffusion1d() {
  constexpr Real nu = 0.01;
  PdeProblem p;
  p.name = "diffusion1d";
  p.domain = Domain::box_time(Vec::Constant(1, 0.0), Vec::Constant(1, 5.0), 0.0, 10.0);
  // u_t - nu u_xx = f
  p.interior_op.deriv1 = Vec::Zero(2);
  p.interior_op.deriv1(1) = 1.0;
  p.interior_op.deriv2 = Vec::Zero(2);
  p.interior_op.deriv2(0) = -nu;
  auto profile = [](Real s) {
    return 2 * std::cos(kPi * s + kPi / 5) + 1.5 * std::cos(2 * kPi * s - 3 * kPi / 5);
  };
  auto dprofile = [](Real s) {
    return -2 * kPi * std::sin(kPi * s + kPi / 5) - 3 * kPi * std::sin(2 * kPi * s - 3 * kPi / 5);
  };
  auto d2profile = [](Real s) {
    return -2 * kPi * kPi * std::cos(kPi * s + kPi / 5) -
           6 * kPi * kPi * std::cos(2 * kPi * s - 3 * kPi / 5);
  };
  auto u = [profile](const Vec& x) { return profile(x(0)) * profile(x(1)); };
  p.exact = u;
  p.source = [profile, dprofile, d2profile](const Vec& x) {
    return profile(x(0)) * dprofile(x(1)) - nu * d2profile(x(0)) * profile(x(1));
  };
  p.boundary_data = u;
  p.initial_data = u;
  p.default_init = InitScheme::kXavier;
  p.default_grid = {101, 101};
  return p;
}

}  // namespace

PdeProblem catalog_poisson_hd(Index dim) {
  if (dim < 1) throw InvalidSpecError("poisson_hd: dimension must be >= 1");
  PdeProblem p;
  p.name = "poisson_hd";
  p.domain = Domain::box(Vec::Constant(dim, -1.0), Vec::Constant(dim, 1.0));
  // -Delta u = f
  p.interior_op = LinearOperator::laplacian(dim, dim, -1.0);
  const Real d = static_cast<Real>(dim);
  auto u = [](const Vec& x) {
    const Real mean = x.mean();
    return mean * mean + std::sin(mean);
  };
  p.exact = u;
  p.source = [d](const Vec& x) { return (std::sin(x.mean()) - 2.0) / d; };
  p.boundary_data = u;
  p.default_init = InitScheme::kXavier;
  p.default_lhs_interior = 10000;
  p.default_lhs_boundary = 200 * dim;
  return p;
}

PdeProblem catalog(const std::string& name) {
  if (name == "func2d") return make_func2d();
  if (name == "helmholtz2d") return make_helmholtz2d();
  if (name == "heat2d") return make_heat2d();
  if (name == "wave2d") return make_wave2d();
  if (name == "burgers2d") return make_burgers2d();
  if (name == "poisson_hd") return catalog_poisson_hd(5);
  if (name == "diffusion1d") return make_diffusion1d();
  throw UnknownNameError("unknown problem: " + name);
}

std::vector<std::string> catalog_names() {
  return {"func2d", "helmholtz2d", "heat2d", "wave2d", "burgers2d", "poisson_hd", "diffusion1d"};
}

Vec evaluate_field(const ScalarField& field, const Mat& points) {
  Vec out(points.rows());
  for (Index i = 0; i < points.rows(); ++i) out(i) = field(points.row(i).transpose());
  return out;
}

namespace {

Mat basis_rows(const LinearOperator& op, const Basis& basis, const Mat& points) {
  if (const auto* tb = std::get_if<TensorBasis>(&basis)) {
    const JetBatch a = eval_jets(tb->first.spec, tb->first.params, points);
    const JetBatch b = eval_jets(tb->second.spec, tb->second.params, points);
    return operator_rows(op, a, b);
  }
  const auto& db = std::get<DirectBasis>(basis);
  return operator_rows(op, eval_jets(db.sub.spec, db.sub.params, points));
}

LinearOperator time_derivative_op(Index dims) {
  LinearOperator op;
  op.deriv1 = Vec::Zero(dims);
  op.deriv1(dims - 1) = 1.0;
  return op;
}

}  // namespace

AssembledSystem assemble_linear_system(const PdeProblem& problem, const Basis& basis,
                                       const CollocationSet& colloc) {
  const Index m = basis_count(basis);
  AssembledSystem sys;
  sys.rows_interior = colloc.n_interior();
  sys.rows_boundary = colloc.n_boundary();
  sys.rows_initial = colloc.n_initial();
  sys.rows_velocity = problem.has_initial_velocity ? colloc.n_initial() : 0;
  const Index rows = sys.rows_interior + sys.rows_boundary + sys.rows_initial + sys.rows_velocity;
  if (rows == 0) throw InvalidSpecError("assemble_linear_system: empty collocation set");

  sys.A.resize(rows, m);
  Index row = 0;
  if (sys.rows_interior > 0) {
    sys.A.middleRows(row, sys.rows_interior) =
        basis_rows(problem.interior_op, basis, colloc.interior);
    row += sys.rows_interior;
  }
  if (sys.rows_boundary > 0) {
    sys.A.middleRows(row, sys.rows_boundary) =
        basis_rows(problem.boundary_op, basis, colloc.boundary);
    row += sys.rows_boundary;
  }
  if (sys.rows_initial > 0) {
    sys.A.middleRows(row, sys.rows_initial) =
        basis_rows(LinearOperator::identity(), basis, colloc.initial);
    row += sys.rows_initial;
  }
  if (sys.rows_velocity > 0) {
    sys.A.middleRows(row, sys.rows_velocity) =
        basis_rows(time_derivative_op(problem.domain.dim()), basis, colloc.initial);
  }
  sys.F = assemble_rhs(problem, colloc);
  return sys;
}

Vec assemble_rhs(const PdeProblem& problem, const CollocationSet& colloc,
                 const Vec* nonlinear_interior, const Vec* initial_override) {
  const Index n_vel = problem.has_initial_velocity ? colloc.n_initial() : 0;
  Vec f(colloc.total() + n_vel);
  Index row = 0;
  if (colloc.n_interior() > 0) {
    f.segment(row, colloc.n_interior()) = evaluate_field(problem.source, colloc.interior);
    if (nonlinear_interior != nullptr) {
      if (nonlinear_interior->size() != colloc.n_interior())
        throw ShapeError("assemble_rhs: nonlinear term length mismatch");
      f.segment(row, colloc.n_interior()) -= *nonlinear_interior;
    }
    row += colloc.n_interior();
  }
  if (colloc.n_boundary() > 0) {
    f.segment(row, colloc.n_boundary()) = evaluate_field(problem.boundary_data, colloc.boundary);
    row += colloc.n_boundary();
  }
  if (colloc.n_initial() > 0) {
    if (initial_override != nullptr) {
      if (initial_override->size() != colloc.n_initial())
        throw ShapeError("assemble_rhs: initial override length mismatch");
      f.segment(row, colloc.n_initial()) = *initial_override;
    } else {
      f.segment(row, colloc.n_initial()) = evaluate_field(problem.initial_data, colloc.initial);
    }
    row += colloc.n_initial();
  }
  if (n_vel > 0)
    f.segment(row, n_vel) = evaluate_field(problem.initial_velocity, colloc.initial);
  return f;
}

}  // namespace tpnet
