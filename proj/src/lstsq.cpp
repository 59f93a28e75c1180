#include "tpnet/lstsq.hpp"

#include <lapacke.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <limits>

extern "C" char* openblas_get_corename(void);

namespace tpnet {
namespace {

// The sandbox this project targets sometimes masks CPUID vendor strings, in
// which case OpenBLAS's dynamic dispatch lands on its generic Prescott
// kernels (~2x-4x slower). Steer it to the real ISA before the first BLAS
// call unless the user already chose a core type.
struct BlasCoreSetup {
  BlasCoreSetup() {
    if (std::getenv("OPENBLAS_CORETYPE") != nullptr) return;
#if defined(__x86_64__)
    if (__builtin_cpu_supports("avx512f"))
      setenv("OPENBLAS_CORETYPE", "SKYLAKEX", 0);
    else if (__builtin_cpu_supports("avx2"))
      setenv("OPENBLAS_CORETYPE", "HASWELL", 0);
#endif
  }
};
const BlasCoreSetup blas_core_setup;

using clock_type = std::chrono::steady_clock;

void check_inputs(const Mat& A, const Vec& F) {
  if (A.rows() < 1 || A.cols() < 1) throw ShapeError("solve_lstsq: A must be at least 1x1");
  if (F.size() != A.rows())
    throw ShapeError("solve_lstsq: F has " + std::to_string(F.size()) + " entries for " +
                     std::to_string(A.rows()) + " rows");
  if (!A.allFinite() || !F.allFinite()) throw InputError("solve_lstsq: non-finite input");
}

Vec dgelsd_solve(Mat& a, Vec rhs, Real rcond, Index* rank_out) {
  const auto rows = static_cast<lapack_int>(a.rows());
  const auto cols = static_cast<lapack_int>(a.cols());
  rhs.conservativeResize(std::max<Index>(rows, cols));
  Vec sv(std::min(rows, cols));
  lapack_int rank = 0;
  const lapack_int info = LAPACKE_dgelsd(LAPACK_COL_MAJOR, rows, cols, 1, a.data(), rows,
                                         rhs.data(), std::max(rows, cols), sv.data(), rcond,
                                         &rank);
  if (info != 0) throw std::runtime_error("dgelsd failed: info=" + std::to_string(info));
  if (rank == 0) throw RankZeroError("solve_lstsq: all singular values below cutoff");
  *rank_out = rank;
  return rhs.head(cols);
}

/// Rank-aware solve of `work` (column-major, destroyed). Overdetermined
/// systems go through a blocked QR first; the triangular solve is kept when
/// nothing would be truncated (rcond = 0, or a condition estimate clears the
/// cutoff with margin), otherwise the reduced cols x cols system falls back
/// to the SVD route. argmin ||A w - F|| = argmin ||R w - Q^T F||, so the
/// solutions coincide.
Vec dense_min_norm_solve(Mat& work, Vec rhs, Real rcond, bool qr_fast_path, Index* rank_out) {
  const auto rows = static_cast<lapack_int>(work.rows());
  const auto cols = static_cast<lapack_int>(work.cols());

  if (qr_fast_path && rows >= cols) {
    Vec tau(cols);
    lapack_int info = LAPACKE_dgeqrf(LAPACK_COL_MAJOR, rows, cols, work.data(), rows, tau.data());
    if (info != 0) throw std::runtime_error("dgeqrf failed: info=" + std::to_string(info));
    Real rcond_est = 0;
    info = LAPACKE_dtrcon(LAPACK_COL_MAJOR, '1', 'U', 'N', cols, work.data(), rows, &rcond_est);
    if (info != 0) throw std::runtime_error("dtrcon failed: info=" + std::to_string(info));
    info = LAPACKE_dormqr(LAPACK_COL_MAJOR, 'L', 'T', rows, 1, cols, work.data(), rows, tau.data(),
                          rhs.data(), rows);
    if (info != 0) throw std::runtime_error("dormqr failed: info=" + std::to_string(info));

    constexpr Real kFullRankMargin = 10.0;
    const Real certify = rcond > 0 ? kFullRankMargin * rcond : 0.0;
    if (rcond_est > certify) {
      Vec x = rhs.head(cols);
      info = LAPACKE_dtrtrs(LAPACK_COL_MAJOR, 'U', 'N', 'N', cols, 1, work.data(), rows, x.data(),
                            cols);
      if (info == 0 && x.allFinite()) {
        *rank_out = cols;
        return x;
      }
    }
    Mat r = work.topRows(cols).triangularView<Eigen::Upper>();
    Vec rb = rhs.head(cols);
    return dgelsd_solve(r, std::move(rb), rcond, rank_out);
  }

  return dgelsd_solve(work, std::move(rhs), rcond, rank_out);
}

}  // namespace

LstsqResult solve_lstsq(const Mat& A, const Vec& F, const LstsqOptions& options) {
  const auto t_start = clock_type::now();
  check_inputs(A, F);
  if (options.ridge < 0) throw InvalidSpecError("solve_lstsq: ridge must be >= 0");

  const Index n = A.rows();
  const Index m = A.cols();
  const Real rcond = options.rcond.value_or(0.0);

  Vec col_scale;
  if (options.equilibrate) {
    col_scale = A.colwise().norm();
    for (Index j = 0; j < m; ++j)
      if (col_scale(j) == 0) col_scale(j) = 1;
  }

  const bool ridged = options.ridge > 0;
  const Index work_rows = ridged ? n + m : n;
  Mat work(work_rows, m);
  work.topRows(n) = A;
  if (options.equilibrate) work.topRows(n).array().rowwise() /= col_scale.transpose().array();
  if (ridged) {
    work.bottomRows(m).setZero();
    work.bottomRows(m).diagonal().setConstant(std::sqrt(options.ridge));
  }
  Vec rhs = Vec::Zero(work_rows);
  rhs.head(n) = F;

  LstsqResult result;
  Index rank = 0;
  result.coefficients =
      dense_min_norm_solve(work, std::move(rhs), rcond, options.qr_fast_path, &rank);
  if (options.equilibrate) result.coefficients.array() /= col_scale.array();
  result.effective_rank = rank;
  result.rcond_used = rcond;
  result.residual_norm = (A * result.coefficients - F).norm();
  result.wall_time = std::chrono::duration<Real>(clock_type::now() - t_start).count();
  return result;
}

SvdFactor::SvdFactor(const Mat& A, std::optional<Real> rcond) {
  if (A.rows() < 1 || A.cols() < 1) throw ShapeError("SvdFactor: A must be at least 1x1");
  if (!A.allFinite()) throw InputError("SvdFactor: non-finite input");
  rows_ = A.rows();
  cols_ = A.cols();
  const auto n = static_cast<lapack_int>(rows_);
  const auto m = static_cast<lapack_int>(cols_);
  const lapack_int mn = std::min(n, m);

  Mat work = A;  // dgesdd destroys its input
  u_.resize(rows_, mn);
  vt_.resize(mn, cols_);
  singular_values_.resize(mn);
  const lapack_int info =
      LAPACKE_dgesdd(LAPACK_COL_MAJOR, 'S', n, m, work.data(), n, singular_values_.data(),
                     u_.data(), n, vt_.data(), mn);
  if (info != 0) throw std::runtime_error("dgesdd failed: info=" + std::to_string(info));

  rcond_used_ = rcond.value_or(0.0);
  const Real cutoff = rcond_used_ * singular_values_(0);
  rank_ = 0;
  while (rank_ < mn && singular_values_(rank_) > cutoff) ++rank_;
  if (rank_ == 0) throw RankZeroError("SvdFactor: all singular values below cutoff");
}

Vec SvdFactor::solve(const Vec& F) const {
  if (F.size() != rows_) throw ShapeError("SvdFactor::solve: rhs length mismatch");
  Vec c = u_.leftCols(rank_).transpose() * F;
  c.array() /= singular_values_.head(rank_).array();
  return vt_.topRows(rank_).transpose() * c;
}

Real SvdFactor::residual_norm(const Vec& w, const Vec& F) const {
  if (w.size() != cols_) throw ShapeError("SvdFactor::residual_norm: w length mismatch");
  Vec t = vt_ * w;
  t.array() *= singular_values_.array();
  return (u_ * t - F).norm();
}

}  // namespace tpnet
