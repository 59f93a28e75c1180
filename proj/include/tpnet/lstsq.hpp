#pragma once

#include "tpnet/common.hpp"

#include <optional>

namespace tpnet {

struct LstsqOptions {
  /// Relative singular-value cutoff: directions with sigma <= rcond *
  /// sigma_max are discarded. Defaults to 0, i.e. untruncated least squares.
  /// The random tensor bases here are numerically rank-deficient by design
  /// and their accuracy lives in the small singular directions; a cutoff of
  /// eps*max(N,M) costs three to four orders of magnitude of accuracy.
  /// Pass an explicit rcond to get classic truncated minimum-norm behavior.
  std::optional<Real> rcond;
  /// Ridge parameter lambda >= 0; 0 keeps the plain minimum-norm solve.
  Real ridge = 0;
  /// Scale columns to unit l2 norm before solving, unscale afterwards.
  bool equilibrate = false;
  /// Try a blocked QR solve first and keep it when nothing would be
  /// truncated (rcond = 0, or a condition estimate clears the cutoff with
  /// margin); otherwise fall back to the SVD route on the reduced system.
  bool qr_fast_path = true;
};

struct LstsqResult {
  Vec coefficients;
  Real residual_norm = 0;
  Index effective_rank = 0;
  Real rcond_used = 0;
  Real wall_time = 0;  // seconds
};

/// Least-squares solve of A w = F, SVD-backed: singular values at or below
/// rcond * sigma_max are discarded and the minimum-norm solution over the
/// kept directions is returned (rcond = 0 keeps everything positive). With
/// ridge > 0 the row-augmented system [A; sqrt(lambda) I] w = [F; 0] is
/// solved instead. residual_norm is ||A w - F|| on the original system
/// either way.
LstsqResult solve_lstsq(const Mat& A, const Vec& F, const LstsqOptions& options = {});

/// Economy SVD of A, reusable across many right-hand sides (Picard keeps the
/// factorization fixed and only swaps F). solve() applies the rcond-truncated
/// pseudoinverse, matching solve_lstsq semantics.
class SvdFactor {
 public:
  SvdFactor(const Mat& A, std::optional<Real> rcond = {});

  Vec solve(const Vec& F) const;
  /// ||A w - F|| computed through the factors (A is not retained).
  Real residual_norm(const Vec& w, const Vec& F) const;

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  Index effective_rank() const { return rank_; }
  Real rcond_used() const { return rcond_used_; }
  const Vec& singular_values() const { return singular_values_; }

 private:
  Mat u_;   // rows x min(rows, cols)
  Mat vt_;  // min(rows, cols) x cols
  Vec singular_values_;
  Index rows_ = 0, cols_ = 0, rank_ = 0;
  Real rcond_used_ = 0;
};

}  // namespace tpnet
