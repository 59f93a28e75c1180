#pragma once

#include "tpnet/lstsq.hpp"
#include "tpnet/problem.hpp"

#include <optional>
#include <string>

namespace tpnet {

struct PicardOptions {
  Index k_max = 100;
  Real eps = 1e-16;
  InitScheme w0_init = InitScheme::kXavier;
};

struct PicardDiagnostics {
  Index iterations = 0;
  /// Increment dropped below eps.
  bool tolerance_met = false;
  /// Increment stopped improving its running minimum for several
  /// consecutive iterations: the iteration reached its floating-point floor
  /// and further passes cannot extract more.
  bool stagnated = false;
  /// tolerance_met || stagnated. When false after k_max iterations, the
  /// solve carries this as a non-convergence warning and the caller decides.
  bool converged = false;
  bool increments_non_increasing = false;  // over the last three iterations
  Real final_increment = 0;
  std::vector<Real> increments;
};

struct SamplingConfig {
  std::vector<Index> grid;  // per-axis counts; empty selects LHS
  Index lhs_interior = 0;
  Index lhs_boundary = 0;
};

struct SolverConfig {
  Architecture arch = Architecture::kElm;
  std::optional<Architecture> second_arch;  // heterogeneous tensor pairs
  /// Subnetwork output width p for tensor-product architectures (M = p*p);
  /// for hlconc this is the total basis count M directly.
  Index p = 10;
  InitScheme init = InitScheme::kKaiming;
  bool init_set = false;  // when false, solve() adopts the problem default
  std::uint64_t seed = 0;
  SamplingConfig sampling;
  PicardOptions picard;
  Index btm_blocks = 1;
  LstsqOptions lstsq;

  Index basis_count() const { return arch == Architecture::kHLConc ? p : p * p; }
};

/// A solved problem: the frozen basis, the fitted coefficients, and solve
/// diagnostics. Block time-marching solutions hold one child per time block
/// (ordered); plain solves have no children.
struct Solution {
  Basis basis;
  Vec coefficients;
  LstsqResult lstsq;
  Domain domain;
  Real wall_time = 0;  // basis init through solve, per the training-time convention
  PicardDiagnostics picard;
  Mat training_points;  // default evaluation set for error reports
  std::vector<Solution> blocks;

  bool is_btm() const { return !blocks.empty(); }
};

struct ErrorReport {
  Real l_inf = 0;
  Real l_2 = 0;  // unnormalized root-sum-of-squares
  Index n_eval = 0;
  Real wall_time = 0;  // evaluation time; training time lives on the Solution
};

/// Linear PDE solve: init subnetworks, build jets, assemble, least squares.
Solution solve_linear(const PdeProblem& problem, const SolverConfig& config);

/// Picard iteration for L u + N[u] = f: the factorization of A is computed
/// once and reused; each iteration rebuilds F with the lagged nonlinear
/// term. Stops when ||w_k - w_{k+1}||_2 < eps, when the increments stagnate
/// at their floating-point floor, or at k_max (a non-convergence warning the
/// caller decides about).
Solution solve_nonlinear_picard(const PdeProblem& problem, const SolverConfig& config);

/// Sequential time blocks of size (tf - t0)/D_t; block k > 0 takes its
/// initial data from the previous block's solution evaluated at t_k, and each
/// block draws fresh subnetworks from block_seed(master, k).
Solution block_time_march(const PdeProblem& problem, const SolverConfig& config);

/// Dispatches on problem type and config (nonlinear -> Picard, btm_blocks > 1
/// -> time marching, otherwise plain linear).
Solution solve(const PdeProblem& problem, const SolverConfig& config);

/// u at arbitrary points. Time-marching solutions route each point to the
/// covering block: t in (t_k, t_{k+1}] belongs to block k, t = t0 to block 0.
Vec evaluate(const Solution& solution, const Mat& points);

/// L_inf and unnormalized L_2 error against the exact solution over
/// `eval_points` (or, by default, the training collocation set).
ErrorReport compute_errors(const Solution& solution, const PdeProblem& problem,
                           const Mat& eval_points);
ErrorReport compute_errors(const Solution& solution, const PdeProblem& problem);

/// Generic Picard loop on a fixed factorization: rhs_builder maps the current
/// coefficients to the full right-hand side. Exposed for direct testing
/// against hand-computed iterates.
Vec picard_iterate(const SvdFactor& factor,
                   const std::function<Vec(const Vec&)>& rhs_builder, Vec w0,
                   const PicardOptions& options, PicardDiagnostics* diagnostics);

/// Xavier/Kaiming draw for the Picard start vector, treated as a 1 x M layer.
Vec draw_w0(Index m, InitScheme scheme, std::uint64_t seed);

/// Self-describing binary container: config echo (JSON), per block the domain,
/// subnetwork param containers, coefficients, and diagnostics.
void save_solution(const Solution& solution, const std::string& path,
                   const std::string& config_echo);
std::pair<Solution, std::string> load_solution(const std::string& path);

/// JSON snapshot of a config, for embedding in solution containers.
std::string config_echo_json(const SolverConfig& config, const std::string& problem_name);

}  // namespace tpnet
