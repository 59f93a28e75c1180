#pragma once

#include "tpnet/solver.hpp"

#include <string>
#include <vector>

namespace tpnet::check {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

/// Largest mixed relative deviation between two matrices:
/// max |a - b| / max(1, ||a||_inf).
Real max_rel_error(const Mat& reference, const Mat& candidate);

struct FdErrors {
  Real grad = 0;
  Real diag2 = 0;
};

/// Central finite differences of eval_values against the analytic jets.
/// grad uses step h1, diag2 uses step h2.
FdErrors jet_fd_errors(const SubnetworkSpec& spec, const SubnetworkParams& params,
                       const Mat& points, Real h1 = 1e-4, Real h2 = 1e-3);

/// Central finite differences of tensor_basis_values against
/// tensor_basis_deriv1/deriv2.
FdErrors tensor_fd_errors(const TensorBasis& basis, const Mat& points, Real h1 = 1e-4,
                          Real h2 = 1e-3);

/// Derivative oracle suite: `cases` random (seed, point-batch) pairs per
/// architecture plus the tensor-product operators.
std::vector<CheckResult> derivative_suite(Index cases);

std::vector<CheckResult> lstsq_suite();
std::vector<CheckResult> sampling_suite();

/// Substitutes each catalog exact solution into its own operator via finite
/// differences and checks the pointwise residual.
std::vector<CheckResult> catalog_suite();

std::vector<CheckResult> determinism_suite();

std::vector<CheckResult> run_all(Index fd_cases = 100);

/// Prints one line per result; returns true when everything passed.
bool report(const std::vector<CheckResult>& results, std::ostream& out);

/// Finite-difference residual of the exact solution under the problem's
/// operator at `points`: max over points of
/// |L u* + N[u*] - f| (interior form). Shared by tests.
Real manufactured_residual(const PdeProblem& problem, const Mat& points, Real h = 1e-3);

}  // namespace tpnet::check
