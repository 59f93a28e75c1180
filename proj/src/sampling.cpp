#include "tpnet/sampling.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <random>

namespace tpnet {

namespace {
constexpr Real kBoundTol = 1e-12;

void print_row(std::ostream& out, const char* role, const Mat& points, Index row) {
  out << role;
  char buf[32];
  for (Index j = 0; j < points.cols(); ++j) {
    std::snprintf(buf, sizeof(buf), ",%.16e", points(row, j));
    out << buf;
  }
  out << '\n';
}
}  // namespace

void Domain::validate() const {
  if (lower.size() != upper.size() || lower.size() == 0)
    throw InvalidSpecError("domain bounds must be non-empty and equally sized");
  for (Index i = 0; i < lower.size(); ++i)
    if (!(lower(i) < upper(i)))
      throw InvalidSpecError("domain bound " + std::to_string(i) + " has lower >= upper");
  if (has_time && dim() < 2) throw InvalidSpecError("time-dependent domain needs a spatial axis");
}

Domain Domain::box(Vec lo, Vec hi) {
  Domain d;
  d.lower = std::move(lo);
  d.upper = std::move(hi);
  d.has_time = false;
  d.validate();
  return d;
}

Domain Domain::box_time(Vec lo_space, Vec hi_space, Real t_start, Real t_final) {
  Domain d;
  d.lower.resize(lo_space.size() + 1);
  d.upper.resize(hi_space.size() + 1);
  d.lower << lo_space, t_start;
  d.upper << hi_space, t_final;
  d.has_time = true;
  d.validate();
  return d;
}

Domain Domain::time_slab(Real t_start, Real t_final) const {
  if (!has_time) throw InvalidSpecError("time_slab on a domain without time");
  Domain d = *this;
  d.lower(dim() - 1) = t_start;
  d.upper(dim() - 1) = t_final;
  d.validate();
  return d;
}

Mat CollocationSet::stacked() const {
  const Index cols = interior.cols() > 0   ? interior.cols()
                     : boundary.cols() > 0 ? boundary.cols()
                                           : initial.cols();
  Mat all(total(), cols);
  Index row = 0;
  for (const Mat* part : {&interior, &boundary, &initial}) {
    if (part->rows() > 0) all.middleRows(row, part->rows()) = *part;
    row += part->rows();
  }
  return all;
}

CollocationSet sample_uniform_grid(const Domain& domain, const std::vector<Index>& counts) {
  domain.validate();
  const Index d = domain.dim();
  if (static_cast<Index>(counts.size()) != d)
    throw InvalidSpecError("sample_uniform_grid: counts size must match domain dimension");
  Index total = 1;
  for (Index c : counts) {
    if (c < 2) throw InvalidSpecError("sample_uniform_grid: counts must be >= 2 per axis");
    total *= c;
  }

  std::vector<Vec> axes(static_cast<std::size_t>(d));
  for (Index i = 0; i < d; ++i)
    axes[static_cast<std::size_t>(i)] =
        Vec::LinSpaced(counts[static_cast<std::size_t>(i)], domain.lower(i), domain.upper(i));

  std::vector<Index> idx(static_cast<std::size_t>(d), 0);
  std::vector<Real> point(static_cast<std::size_t>(d));
  std::vector<std::vector<Real>> interior, boundary, initial;
  interior.reserve(static_cast<std::size_t>(total));

  for (Index flat = 0; flat < total; ++flat) {
    bool spatial_bound = false;
    for (Index i = 0; i < domain.spatial_dim(); ++i) {
      const Real x = axes[static_cast<std::size_t>(i)](idx[static_cast<std::size_t>(i)]);
      point[static_cast<std::size_t>(i)] = x;
      if (std::abs(x - domain.lower(i)) <= kBoundTol || std::abs(x - domain.upper(i)) <= kBoundTol)
        spatial_bound = true;
    }
    bool at_t0 = false;
    if (domain.has_time) {
      const Index ti = d - 1;
      const Real t = axes[static_cast<std::size_t>(ti)](idx[static_cast<std::size_t>(ti)]);
      point[static_cast<std::size_t>(ti)] = t;
      at_t0 = std::abs(t - domain.t0()) <= kBoundTol;
    }
    // The whole starting-time face carries the initial condition; spatial
    // boundary rows then cover t in (t0, tf].
    if (at_t0)
      initial.push_back(point);
    else if (spatial_bound)
      boundary.push_back(point);
    else
      interior.push_back(point);

    for (Index i = d - 1; i >= 0; --i) {
      auto& k = idx[static_cast<std::size_t>(i)];
      if (++k < counts[static_cast<std::size_t>(i)]) break;
      k = 0;
    }
  }

  auto to_mat = [d](const std::vector<std::vector<Real>>& rows) {
    Mat m(static_cast<Index>(rows.size()), d);
    for (Index r = 0; r < m.rows(); ++r)
      for (Index c = 0; c < d; ++c)
        m(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
    return m;
  };
  CollocationSet set;
  set.interior = to_mat(interior);
  set.boundary = to_mat(boundary);
  set.initial = to_mat(initial);
  return set;
}

namespace {

/// One Latin hypercube sample: n points in [0,1)^k, every axis marginal
/// hitting each of the n equal bins exactly once.
Mat lhs_unit(Index n, Index k, std::mt19937_64& rng) {
  Mat u(n, k);
  std::uniform_real_distribution<Real> unit(0.0, 1.0);
  std::vector<Index> perm(static_cast<std::size_t>(n));
  for (Index j = 0; j < k; ++j) {
    std::iota(perm.begin(), perm.end(), Index{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    for (Index i = 0; i < n; ++i)
      u(i, j) = (static_cast<Real>(perm[static_cast<std::size_t>(i)]) + unit(rng)) /
                static_cast<Real>(n);
  }
  return u;
}

}  // namespace

CollocationSet sample_lhs(const Domain& domain, Index n_interior, Index n_boundary,
                          std::uint64_t seed) {
  domain.validate();
  const Index d = domain.dim();
  const Index n_faces = 2 * d;  // time face pairs included for box x time
  if (n_interior < 1) throw InvalidSpecError("sample_lhs: need at least one interior point");
  if (n_boundary % n_faces != 0)
    throw InvalidSpecError("sample_lhs: boundary count " + std::to_string(n_boundary) +
                           " not divisible by 2*d = " + std::to_string(n_faces));

  std::mt19937_64 rng(seed);
  const Vec span = domain.upper - domain.lower;

  CollocationSet set;
  set.interior = lhs_unit(n_interior, d, rng);
  set.interior.array().rowwise() *= span.transpose().array();
  set.interior.array().rowwise() += domain.lower.transpose().array();

  const Index per_face = n_boundary / n_faces;
  std::vector<std::vector<Real>> boundary, initial;
  for (Index axis = 0; axis < d; ++axis) {
    for (int side = 0; side < 2; ++side) {
      const Real fixed = side == 0 ? domain.lower(axis) : domain.upper(axis);
      Mat face = per_face > 0 && d > 1 ? lhs_unit(per_face, d - 1, rng) : Mat(per_face, 0);
      for (Index i = 0; i < per_face; ++i) {
        std::vector<Real> point(static_cast<std::size_t>(d));
        Index fc = 0;
        for (Index j = 0; j < d; ++j) {
          if (j == axis) {
            point[static_cast<std::size_t>(j)] = fixed;
          } else {
            point[static_cast<std::size_t>(j)] =
                domain.lower(j) + face(i, fc) * span(j);
            ++fc;
          }
        }
        const bool is_t0_face = domain.has_time && axis == d - 1 && side == 0;
        const bool is_tf_face = domain.has_time && axis == d - 1 && side == 1;
        if (is_t0_face)
          initial.push_back(std::move(point));
        else if (!is_tf_face)  // t = tf is interior territory, skip that face
          boundary.push_back(std::move(point));
      }
    }
  }

  auto to_mat = [d](const std::vector<std::vector<Real>>& rows) {
    Mat m(static_cast<Index>(rows.size()), d);
    for (Index r = 0; r < m.rows(); ++r)
      for (Index c = 0; c < d; ++c)
        m(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
    return m;
  };
  set.boundary = to_mat(boundary);
  set.initial = to_mat(initial);
  return set;
}

void write_csv(const CollocationSet& colloc, std::ostream& out) {
  const Index d = colloc.stacked().cols();
  out << "role";
  for (Index j = 0; j < d; ++j) out << ",x" << j;
  out << '\n';
  for (Index i = 0; i < colloc.n_interior(); ++i) print_row(out, "interior", colloc.interior, i);
  for (Index i = 0; i < colloc.n_boundary(); ++i) print_row(out, "boundary", colloc.boundary, i);
  for (Index i = 0; i < colloc.n_initial(); ++i) print_row(out, "initial", colloc.initial, i);
}

void write_csv(const Mat& A, const Vec& F, std::ostream& out) {
  if (F.size() != A.rows()) throw ShapeError("write_csv: A and F row counts differ");
  for (Index j = 0; j < A.cols(); ++j) out << 'a' << j << ',';
  out << "f\n";
  char buf[32];
  for (Index i = 0; i < A.rows(); ++i) {
    for (Index j = 0; j < A.cols(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.16e,", A(i, j));
      out << buf;
    }
    std::snprintf(buf, sizeof(buf), "%.16e\n", F(i));
    out << buf;
  }
}

}  // namespace tpnet
