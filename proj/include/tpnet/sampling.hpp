#pragma once

#include "tpnet/common.hpp"

#include <iosfwd>
#include <vector>

namespace tpnet {

/// Axis-aligned box, optionally with a trailing time coordinate. When
/// has_time is true the last coordinate is t and its bounds are [t0, tf]
/// (for a time-marching block, [t_k, t_{k+1}]).
struct Domain {
  Vec lower;
  Vec upper;
  bool has_time = false;

  Index dim() const { return lower.size(); }
  Index spatial_dim() const { return has_time ? dim() - 1 : dim(); }
  Real t0() const { return lower(dim() - 1); }
  Real tf() const { return upper(dim() - 1); }

  void validate() const;

  static Domain box(Vec lo, Vec hi);
  static Domain box_time(Vec lo_space, Vec hi_space, Real t_start, Real t_final);

  /// Same spatial box restricted to [t_start, t_final]; requires has_time.
  Domain time_slab(Real t_start, Real t_final) const;
};

/// Collocation points split by role. For time-dependent domains the whole
/// t = t0 face (spatial rim included) is the initial set, spatial-boundary
/// points at t > t0 form the boundary set, and the rest (including t = tf)
/// are interior. For plain boxes: any coordinate on a bound means boundary,
/// corner points appearing once.
struct CollocationSet {
  Mat interior;
  Mat boundary;
  Mat initial;

  Index n_interior() const { return interior.rows(); }
  Index n_boundary() const { return boundary.rows(); }
  Index n_initial() const { return initial.rows(); }
  Index total() const { return n_interior() + n_boundary() + n_initial(); }

  /// interior, boundary, initial stacked in that (normative) row order.
  Mat stacked() const;
};

/// Full tensor grid with endpoints; counts are per axis (each >= 2).
CollocationSet sample_uniform_grid(const Domain& domain, const std::vector<Index>& counts);

/// Latin hypercube interior sample plus per-face LHS boundary samples.
/// n_boundary must divide evenly over the 2*spatial_dim faces. For
/// time-dependent domains the faces include the t = t0 face (reported as the
/// initial set) and exclude t = tf. Deterministic for a given seed.
CollocationSet sample_lhs(const Domain& domain, Index n_interior, Index n_boundary,
                          std::uint64_t seed);

/// CSV with a role column and one coordinate column per axis; 17 significant
/// digits.
void write_csv(const CollocationSet& colloc, std::ostream& out);

/// Design matrix and right-hand side as CSV (columns a0..a{M-1}, f).
void write_csv(const Mat& A, const Vec& F, std::ostream& out);

}  // namespace tpnet
