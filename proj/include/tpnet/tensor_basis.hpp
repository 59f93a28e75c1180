#pragma once

#include "tpnet/jets.hpp"

#include <optional>
#include <variant>

namespace tpnet {

template <class Scalar>
struct SubnetworkT {
  SubnetworkSpec spec;
  SubnetworkParamsT<Scalar> params;
};

using Subnetwork = SubnetworkT<Real>;

/// Basis built from the pairwise products of two subnetworks' outputs.
/// Both subnetworks must share the output width p; the basis has M = p*p
/// functions and basis (m, n) lives at flat column m*p + n. That flat order
/// is normative for coefficient vectors and serialized solutions.
template <class Scalar>
struct TensorBasisT {
  SubnetworkT<Scalar> first;
  SubnetworkT<Scalar> second;

  Index width() const { return first.spec.output_width(); }
  Index basis_count() const { return width() * width(); }
  Index input_dim() const { return first.spec.input_dim; }

  void validate() const {
    first.spec.validate();
    second.spec.validate();
    if (first.spec.output_width() != second.spec.output_width())
      throw InvalidSpecError("tensor basis subnetworks must share the output width");
    if (first.spec.input_dim != second.spec.input_dim)
      throw InvalidSpecError("tensor basis subnetworks must share the input dimension");
  }
};

/// Basis taken directly from one subnetwork's outputs (the HLConc baseline).
template <class Scalar>
struct DirectBasisT {
  SubnetworkT<Scalar> sub;

  Index basis_count() const { return sub.spec.output_width(); }
  Index input_dim() const { return sub.spec.input_dim; }
};

using TensorBasis = TensorBasisT<Real>;
using DirectBasis = DirectBasisT<Real>;
using Basis = std::variant<TensorBasis, DirectBasis>;

inline Index basis_count(const Basis& basis) {
  return std::visit([](const auto& b) { return b.basis_count(); }, basis);
}

inline Index basis_input_dim(const Basis& basis) {
  return std::visit([](const auto& b) { return b.input_dim(); }, basis);
}

/// Tensor-product pair with both subnetworks of architecture `arch` and width
/// p. Seeds: first subnetwork uses `master_seed`, second uses paired_seed().
template <class Scalar = Real>
TensorBasisT<Scalar> make_tensor_basis(Architecture arch, Index d, Index p, InitScheme init,
                                       std::uint64_t master_seed,
                                       std::optional<Architecture> second_arch = {}) {
  TensorBasisT<Scalar> basis;
  basis.first.spec = SubnetworkSpec::make(arch, d, p, init, master_seed);
  basis.second.spec =
      SubnetworkSpec::make(second_arch.value_or(arch), d, p, init, paired_seed(master_seed));
  basis.validate();
  basis.first.params = init_subnetwork<Scalar>(basis.first.spec);
  basis.second.params = init_subnetwork<Scalar>(basis.second.spec);
  return basis;
}

template <class Scalar = Real>
DirectBasisT<Scalar> make_direct_basis(Architecture arch, Index d, Index m, InitScheme init,
                                       std::uint64_t master_seed) {
  DirectBasisT<Scalar> basis;
  basis.sub.spec = SubnetworkSpec::make(arch, d, m, init, master_seed);
  basis.sub.params = init_subnetwork<Scalar>(basis.sub.spec);
  return basis;
}

namespace detail {

template <class Scalar>
void require_compatible(const JetBatchT<Scalar>& a, const JetBatchT<Scalar>& b) {
  if (a.points() != b.points())
    throw ShapeError("tensor basis: jet batches evaluated at different point counts");
  if (a.width() != b.width())
    throw ShapeError("tensor basis: jet batches have different output widths");
  if (a.dims() != b.dims())
    throw ShapeError("tensor basis: jet batches have different input dimensions");
}

template <class Scalar>
void require_axis(const JetBatchT<Scalar>& a, Index axis) {
  if (axis < 0 || axis >= a.dims())
    throw ShapeError("tensor basis: axis " + std::to_string(axis) + " out of range for dim " +
                     std::to_string(a.dims()));
}

/// out(:, m*p+n) += left(:, m) .* right(:, n), accumulated panel by panel.
template <class Scalar>
void add_product_panels(MatX<Scalar>& out, const MatX<Scalar>& left, const MatX<Scalar>& right,
                        Scalar coeff) {
  const Index p = left.cols();
  for (Index m = 0; m < p; ++m)
    out.middleCols(m * p, p).array() +=
        coeff * (right.array().colwise() * left.col(m).array());
}

}  // namespace detail

/// Basis values: entry (k, m*p+n) = phi1_m(x_k) * phi2_n(x_k).
template <class Scalar>
MatX<Scalar> tensor_basis_values(const JetBatchT<Scalar>& a, const JetBatchT<Scalar>& b) {
  detail::require_compatible(a, b);
  const Index p = a.width();
  MatX<Scalar> out = MatX<Scalar>::Zero(a.points(), p * p);
  detail::add_product_panels(out, a.values, b.values, Scalar(1));
  return out;
}

/// First partial along `axis` by the product rule:
/// (phi1_m phi2_n)_{x_i} = (phi1_m)_{x_i} phi2_n + phi1_m (phi2_n)_{x_i}.
template <class Scalar>
MatX<Scalar> tensor_basis_deriv1(const JetBatchT<Scalar>& a, const JetBatchT<Scalar>& b,
                                 Index axis) {
  detail::require_compatible(a, b);
  detail::require_axis(a, axis);
  const auto i = static_cast<std::size_t>(axis);
  const Index p = a.width();
  MatX<Scalar> out = MatX<Scalar>::Zero(a.points(), p * p);
  detail::add_product_panels(out, a.grad[i], b.values, Scalar(1));
  detail::add_product_panels(out, a.values, b.grad[i], Scalar(1));
  return out;
}

/// Pure second partial along `axis`:
/// (fg)'' = f'' g + 2 f' g' + f g''.
template <class Scalar>
MatX<Scalar> tensor_basis_deriv2(const JetBatchT<Scalar>& a, const JetBatchT<Scalar>& b,
                                 Index axis) {
  detail::require_compatible(a, b);
  detail::require_axis(a, axis);
  const auto i = static_cast<std::size_t>(axis);
  const Index p = a.width();
  MatX<Scalar> out = MatX<Scalar>::Zero(a.points(), p * p);
  detail::add_product_panels(out, a.diag2[i], b.values, Scalar(1));
  detail::add_product_panels(out, a.grad[i], b.grad[i], Scalar(2));
  detail::add_product_panels(out, a.values, b.diag2[i], Scalar(1));
  return out;
}

/// u(x_k) = sum_{m,n} w[m*p+n] phi1_m(x_k) phi2_n(x_k), evaluated through the
/// factored form (Phi1 W) .* Phi2 without materializing the N x M table.
template <class Scalar>
VecX<Scalar> tensor_basis_apply(const JetBatchT<Scalar>& a, const JetBatchT<Scalar>& b,
                                const VecX<Scalar>& w) {
  detail::require_compatible(a, b);
  const Index p = a.width();
  if (w.size() != p * p) throw ShapeError("tensor_basis_apply: coefficient length is not p*p");
  using RowMajorMap =
      Eigen::Map<const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
  RowMajorMap wmat(w.data(), p, p);
  return ((a.values * wmat).array() * b.values.array()).rowwise().sum();
}

/// Factored combination of raw value matrices (N x p each).
template <class Scalar>
VecX<Scalar> tensor_values_apply(const MatX<Scalar>& v1, const MatX<Scalar>& v2,
                                 const VecX<Scalar>& w) {
  if (v1.rows() != v2.rows() || v1.cols() != v2.cols())
    throw ShapeError("tensor_values_apply: value matrices must have equal shapes");
  const Index p = v1.cols();
  if (w.size() != p * p) throw ShapeError("tensor_values_apply: coefficient length is not p*p");
  using RowMajorMap =
      Eigen::Map<const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
  RowMajorMap wmat(w.data(), p, p);
  return ((v1 * wmat).array() * v2.array()).rowwise().sum();
}

/// d/dx_i of tensor_basis_apply, through the same factored form.
template <class Scalar>
VecX<Scalar> tensor_basis_apply_deriv1(const JetBatchT<Scalar>& a, const JetBatchT<Scalar>& b,
                                       const VecX<Scalar>& w, Index axis) {
  detail::require_compatible(a, b);
  detail::require_axis(a, axis);
  const auto i = static_cast<std::size_t>(axis);
  const Index p = a.width();
  if (w.size() != p * p) throw ShapeError("tensor_basis_apply_deriv1: coefficient length");
  using RowMajorMap =
      Eigen::Map<const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
  RowMajorMap wmat(w.data(), p, p);
  return ((a.grad[i] * wmat).array() * b.values.array()).rowwise().sum() +
         ((a.values * wmat).array() * b.grad[i].array()).rowwise().sum();
}

}  // namespace tpnet
