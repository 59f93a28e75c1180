#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace tpnet {

using Index = Eigen::Index;
using Real = double;

template <class Scalar>
using MatX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <class Scalar>
using VecX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Mat = MatX<Real>;
using Vec = VecX<Real>;

/// Spec describes an impossible or inconsistent configuration.
struct InvalidSpecError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Matrix/vector dimensions do not line up.
struct ShapeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Caller passed NaN/Inf where finite values are required.
struct InputError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// A forward pass produced NaN/Inf; carries the offending layer.
struct NumericOverflowError : std::runtime_error {
  explicit NumericOverflowError(int layer_index, const std::string& what)
      : std::runtime_error(what), layer(layer_index) {}
  int layer;
};

/// Every singular value fell below the rcond cutoff.
struct RankZeroError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Lookup by name failed (catalog, CLI enums).
struct UnknownNameError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Operator asks for jet data the basis cannot provide.
struct UnsupportedOperatorError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Seed derivation. One master seed drives everything; derived streams use a
// fixed splitmix64-style gamma so reruns are bit-identical.
inline constexpr std::uint64_t kSeedGamma = 0x9E3779B97F4A7C15ULL;
inline constexpr std::uint64_t kPicardW0Gamma = 0xD1B54A32D192ED03ULL;

/// Seed of the second subnetwork in a tensor-product pair.
inline std::uint64_t paired_seed(std::uint64_t master) { return master ^ kSeedGamma; }

/// Seed of time-marching block `k` (block 0 keeps the master seed).
inline std::uint64_t block_seed(std::uint64_t master, Index k) {
  return master + kSeedGamma * static_cast<std::uint64_t>(k);
}

/// Seed of the Picard start vector w0.
inline std::uint64_t picard_w0_seed(std::uint64_t master) { return master ^ kPicardW0Gamma; }

}  // namespace tpnet
