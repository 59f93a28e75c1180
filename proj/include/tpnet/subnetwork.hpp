#pragma once

#include "tpnet/common.hpp"

#include <cmath>
#include <cstdlib>
#include <iosfwd>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace tpnet {

enum class Architecture { kElm, kMlp, kResNet, kHLConc };
enum class InitScheme { kKaiming, kXavier };

std::string to_string(Architecture arch);
std::string to_string(InitScheme scheme);
Architecture architecture_from_string(const std::string& name);
InitScheme init_scheme_from_string(const std::string& name);

/// Architecture description of one frozen random subnetwork.
///
/// `layer_widths` lists the hidden layers only: ELM has one ({p}); MLP and
/// ResNet default to four equal layers ({p,p,p,p}, the ResNet pairing them
/// into two residual blocks); HLConc has exactly two ({M/2, M/2}) and
/// exposes their concatenation. The subnetwork output is the last hidden
/// layer (HLConc: all hidden layers concatenated) — there is no trained
/// output layer, those coefficients are what the least-squares solve
/// determines.
struct SubnetworkSpec {
  Architecture architecture = Architecture::kElm;
  Index input_dim = 1;
  std::vector<Index> layer_widths;
  InitScheme init = InitScheme::kKaiming;
  std::uint64_t seed = 0;

  Index output_width() const;
  Index layer_count() const { return static_cast<Index>(layer_widths.size()); }
  void validate() const;

  static SubnetworkSpec elm(Index d, Index p, InitScheme init, std::uint64_t seed);
  static SubnetworkSpec mlp(Index d, Index p, InitScheme init, std::uint64_t seed);
  static SubnetworkSpec resnet(Index d, Index p, InitScheme init, std::uint64_t seed);
  static SubnetworkSpec hlconc(Index d, Index m_total, InitScheme init, std::uint64_t seed);

  /// ELM/MLP/ResNet subnetwork of width p; HLConc of total width m_total.
  static SubnetworkSpec make(Architecture arch, Index d, Index width, InitScheme init,
                             std::uint64_t seed);
};

/// Frozen random weights of one subnetwork. Immutable after init_subnetwork.
///
/// weights[l] is m_l x m_{l-1}; biases[l] has m_l entries. ResNet layers whose
/// input and output widths differ carry an affine skip projection in
/// proj_weights/proj_biases (empty matrices where the skip is the identity).
template <class Scalar>
struct SubnetworkParamsT {
  std::vector<MatX<Scalar>> weights;
  std::vector<VecX<Scalar>> biases;
  std::vector<MatX<Scalar>> proj_weights;
  std::vector<VecX<Scalar>> proj_biases;
};

using SubnetworkParams = SubnetworkParamsT<Real>;

namespace detail {

template <class Scalar>
MatX<Scalar> draw_matrix(std::mt19937_64& rng, Index rows, Index cols, InitScheme scheme,
                         Index fan_in, Index fan_out) {
  MatX<Scalar> m(rows, cols);
  if (scheme == InitScheme::kKaiming) {
    std::normal_distribution<double> dist(0.0, std::sqrt(2.0 / static_cast<double>(fan_in)));
    for (Index j = 0; j < cols; ++j)
      for (Index i = 0; i < rows; ++i) m(i, j) = static_cast<Scalar>(dist(rng));
  } else {
    const char* g = std::getenv("TPNET_XAVIER_GAIN");
    const double gain = g != nullptr ? atof(g) : 1.0;
    const double a = gain * std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    std::uniform_real_distribution<double> dist(-a, a);
    for (Index j = 0; j < cols; ++j)
      for (Index i = 0; i < rows; ++i) m(i, j) = static_cast<Scalar>(dist(rng));
  }
  return m;
}

template <class Scalar>
VecX<Scalar> draw_bias(std::mt19937_64& rng, Index n, InitScheme scheme, Index fan_in,
                       Index fan_out) {
  // Kaiming biases follow the usual uniform companion rule on
  // +-1/sqrt(fan_in). Zero biases would leave every tanh feature odd through
  // the origin, which collapses the numerical rank of the basis and caps the
  // attainable accuracy orders of magnitude short of the reference results.
  // Xavier biases share the weight range of their layer (fan_out taken as
  // the layer width).
  VecX<Scalar> b(n);
  if (scheme == InitScheme::kKaiming) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (Index i = 0; i < n; ++i) b(i) = static_cast<Scalar>(dist(rng));
    return b;
  }
  const char* bs = std::getenv("TPNET_XAVIER_BIAS");
  const double a = bs != nullptr ? atof(bs)
                                 : std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  std::uniform_real_distribution<double> dist(-a, a);
  for (Index i = 0; i < n; ++i) b(i) = static_cast<Scalar>(dist(rng));
  return b;
}

}  // namespace detail

/// Draws the frozen weights for `spec`. Deterministic for a given seed: one
/// mt19937_64 stream, per layer weights first (column-major entry order), then
/// bias, then the ResNet projection pair when the layer changes width.
template <class Scalar = Real>
SubnetworkParamsT<Scalar> init_subnetwork(const SubnetworkSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  SubnetworkParamsT<Scalar> params;
  const Index n_layers = spec.layer_count();
  params.weights.reserve(n_layers);
  params.biases.reserve(n_layers);
  params.proj_weights.resize(n_layers);
  params.proj_biases.resize(n_layers);
  Index fan_in = spec.input_dim;
  for (Index l = 0; l < n_layers; ++l) {
    const Index fan_out = spec.layer_widths[static_cast<std::size_t>(l)];
    params.weights.push_back(
        detail::draw_matrix<Scalar>(rng, fan_out, fan_in, spec.init, fan_in, fan_out));
    params.biases.push_back(detail::draw_bias<Scalar>(rng, fan_out, spec.init, fan_in, fan_out));
    if (spec.architecture == Architecture::kResNet && fan_out != fan_in) {
      params.proj_weights[l] =
          detail::draw_matrix<Scalar>(rng, fan_out, fan_in, spec.init, fan_in, fan_out);
      params.proj_biases[l] = detail::draw_bias<Scalar>(rng, fan_out, spec.init, fan_in, fan_out);
    }
    fan_in = fan_out;
  }
  return params;
}

/// Flat binary container: header (arch id, input dim, widths, init scheme,
/// seed) followed by row-major float64 weight/bias blocks in layer order.
void save_params(const SubnetworkSpec& spec, const SubnetworkParams& params,
                 const std::string& path);
std::pair<SubnetworkSpec, SubnetworkParams> load_params(const std::string& path);

void write_params(const SubnetworkSpec& spec, const SubnetworkParams& params, std::ostream& out);
std::pair<SubnetworkSpec, SubnetworkParams> read_params(std::istream& in);

}  // namespace tpnet
