#pragma once

#include "tpnet/tensor_basis.hpp"

namespace tpnet {

/// Constant-coefficient linear differential operator
///   L u = value * u + sum_i deriv1[i] u_{x_i} + sum_i deriv2[i] u_{x_i x_i}.
/// Coefficient vectors may be empty (no terms of that order). Mixed second
/// partials are outside the jet contract and cannot be expressed.
struct LinearOperator {
  Real value = 0;
  Vec deriv1;
  Vec deriv2;

  static LinearOperator identity() {
    LinearOperator op;
    op.value = 1;
    return op;
  }

  /// c * sum over the first `spatial_dims` coordinates of d^2/dx_i^2.
  static LinearOperator laplacian(Index dims, Index spatial_dims, Real c = 1) {
    LinearOperator op;
    op.deriv2 = Vec::Zero(dims);
    op.deriv2.head(spatial_dims).setConstant(c);
    return op;
  }

  void check_dims(Index d) const {
    if (deriv1.size() != 0 && deriv1.size() != d)
      throw UnsupportedOperatorError("operator first-derivative coefficients sized " +
                                     std::to_string(deriv1.size()) + " for dimension " +
                                     std::to_string(d));
    if (deriv2.size() != 0 && deriv2.size() != d)
      throw UnsupportedOperatorError("operator second-derivative coefficients sized " +
                                     std::to_string(deriv2.size()) + " for dimension " +
                                     std::to_string(d));
  }

  bool is_value_only() const {
    return (deriv1.size() == 0 || deriv1.isZero(0)) && (deriv2.size() == 0 || deriv2.isZero(0));
  }
};

/// Fully materialized basis tables at a point set: values plus per-axis first
/// and pure second derivative matrices, all N x M. Convenient for tests and
/// small problems; large assemblies go through operator_rows instead.
struct BasisTables {
  Mat values;
  std::vector<Mat> deriv1;
  std::vector<Mat> deriv2;

  Index points() const { return values.rows(); }
  Index count() const { return values.cols(); }
  Index dims() const { return static_cast<Index>(deriv1.size()); }
};

inline BasisTables tensor_basis_tables(const JetBatch& a, const JetBatch& b) {
  BasisTables t;
  t.values = tensor_basis_values(a, b);
  for (Index i = 0; i < a.dims(); ++i) {
    t.deriv1.push_back(tensor_basis_deriv1(a, b, i));
    t.deriv2.push_back(tensor_basis_deriv2(a, b, i));
  }
  return t;
}

inline BasisTables direct_basis_tables(const JetBatch& jet) {
  BasisTables t;
  t.values = jet.values;
  t.deriv1 = jet.grad;
  t.deriv2 = jet.diag2;
  return t;
}

/// Applies the operator to explicit basis tables; the straightforward
/// reference route, linear in every table entry.
inline Mat apply_operator(const LinearOperator& op, const BasisTables& tables) {
  op.check_dims(tables.dims());
  Mat out = Mat::Zero(tables.points(), tables.count());
  if (op.value != 0) out = op.value * tables.values;
  for (Index i = 0; i < op.deriv1.size(); ++i)
    if (op.deriv1(i) != 0) out += op.deriv1(i) * tables.deriv1[static_cast<std::size_t>(i)];
  for (Index i = 0; i < op.deriv2.size(); ++i)
    if (op.deriv2(i) != 0) out += op.deriv2(i) * tables.deriv2[static_cast<std::size_t>(i)];
  return out;
}

/// Applies the operator to a tensor-product basis directly from the two
/// subnetwork jets, accumulating p-wide column panels. Same result as
/// apply_operator over tensor_basis_tables but with O(N*p) extra memory
/// instead of (2d+1) full N x M tables.
inline Mat operator_rows(const LinearOperator& op, const JetBatch& a, const JetBatch& b) {
  detail::require_compatible(a, b);
  op.check_dims(a.dims());
  const Index p = a.width();
  Mat out = Mat::Zero(a.points(), p * p);
  if (op.value != 0) detail::add_product_panels(out, a.values, b.values, op.value);
  for (Index i = 0; i < op.deriv1.size(); ++i) {
    const Real c = op.deriv1(i);
    if (c == 0) continue;
    const auto iu = static_cast<std::size_t>(i);
    detail::add_product_panels(out, a.grad[iu], b.values, c);
    detail::add_product_panels(out, a.values, b.grad[iu], c);
  }
  for (Index i = 0; i < op.deriv2.size(); ++i) {
    const Real c = op.deriv2(i);
    if (c == 0) continue;
    const auto iu = static_cast<std::size_t>(i);
    detail::add_product_panels(out, a.diag2[iu], b.values, c);
    detail::add_product_panels(out, a.grad[iu], b.grad[iu], 2 * c);
    detail::add_product_panels(out, a.values, b.diag2[iu], c);
  }
  return out;
}

/// Direct-basis variant: the operator is a linear combination of the jet
/// matrices themselves.
inline Mat operator_rows(const LinearOperator& op, const JetBatch& jet) {
  op.check_dims(jet.dims());
  Mat out = Mat::Zero(jet.points(), jet.width());
  if (op.value != 0) out = op.value * jet.values;
  for (Index i = 0; i < op.deriv1.size(); ++i)
    if (op.deriv1(i) != 0) out += op.deriv1(i) * jet.grad[static_cast<std::size_t>(i)];
  for (Index i = 0; i < op.deriv2.size(); ++i)
    if (op.deriv2(i) != 0) out += op.deriv2(i) * jet.diag2[static_cast<std::size_t>(i)];
  return out;
}

}  // namespace tpnet
