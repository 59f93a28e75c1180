#pragma once

#include "tpnet/operators.hpp"
#include "tpnet/sampling.hpp"

#include <functional>
#include <string>

namespace tpnet {

/// Scalar field over the full coordinate vector (time included when present).
using ScalarField = std::function<Real(const Vec&)>;

/// Nonlinear term evaluator: given u and its first partials at a batch of
/// points (u is N, du is N x d), returns N[u] per point.
using NonlinearTerm = std::function<Vec(const Vec& u, const Mat& du)>;

/// A PDE (or plain approximation) problem:
///   L u + N[u] = f   in the domain interior,
///   B u = g          on the spatial boundary,
///   I u = h          at t = t0 (time-dependent problems),
///   u_t = w          at t = t0 (only when has_initial_velocity).
struct PdeProblem {
  std::string name;
  Domain domain;
  LinearOperator interior_op;
  LinearOperator boundary_op = LinearOperator::identity();
  bool has_initial_velocity = false;

  ScalarField source;            // f
  ScalarField boundary_data;     // g
  ScalarField initial_data;      // h
  ScalarField initial_velocity;  // w

  NonlinearTerm nonlinear;  // empty for linear problems
  ScalarField exact;        // empty when no closed form is known

  // Defaults mirroring the reference experiments.
  InitScheme default_init = InitScheme::kKaiming;
  std::vector<Index> default_grid;  // empty means LHS sampling
  Index default_lhs_interior = 0;
  Index default_lhs_boundary = 0;

  bool is_linear() const { return !nonlinear; }
  bool time_dependent() const { return domain.has_time; }
};

/// Named problems: func2d, helmholtz2d, heat2d, wave2d, burgers2d,
/// poisson_hd (dim defaults to 5), diffusion1d. Throws UnknownNameError.
PdeProblem catalog(const std::string& name);

/// poisson_hd at an explicit dimension.
PdeProblem catalog_poisson_hd(Index dim);

std::vector<std::string> catalog_names();

/// Design matrix and right-hand side. Row blocks are stacked in the
/// normative order: interior (L), boundary (B), initial value (I), initial
/// velocity (u_t) when present; F carries f, g, h, w in matching order.
struct AssembledSystem {
  Mat A;
  Vec F;
  Index rows_interior = 0;
  Index rows_boundary = 0;
  Index rows_initial = 0;
  Index rows_velocity = 0;
};

AssembledSystem assemble_linear_system(const PdeProblem& problem, const Basis& basis,
                                       const CollocationSet& colloc);

/// Right-hand side only. When `nonlinear_interior` is given its entries are
/// subtracted from the interior block (the Picard linearization); when
/// `initial_override` is given it replaces h at the initial points (time
/// marching chains blocks this way).
Vec assemble_rhs(const PdeProblem& problem, const CollocationSet& colloc,
                 const Vec* nonlinear_interior = nullptr, const Vec* initial_override = nullptr);

/// f, g, h, w evaluated row by row (helper shared by assemble_rhs and tests).
Vec evaluate_field(const ScalarField& field, const Mat& points);

}  // namespace tpnet
