#include "tpnet/subnetwork.hpp"

#include <doctest.h>

#include <sstream>

using namespace tpnet;

TEST_CASE("init_subnetwork draws the documented shapes") {
  SUBCASE("elm") {
    const auto spec = SubnetworkSpec::elm(2, 10, InitScheme::kKaiming, 7);
    const auto params = init_subnetwork(spec);
    REQUIRE(params.weights.size() == 1);
    CHECK(params.weights[0].rows() == 10);
    CHECK(params.weights[0].cols() == 2);
    CHECK(params.biases[0].size() == 10);
  }
  SUBCASE("mlp has four weight matrices 5x3, 5x5, 5x5, 5x5") {
    const auto spec = SubnetworkSpec::mlp(3, 5, InitScheme::kKaiming, 1);
    const auto params = init_subnetwork(spec);
    REQUIRE(params.weights.size() == 4);
    CHECK(params.weights[0].rows() == 5);
    CHECK(params.weights[0].cols() == 3);
    for (std::size_t l = 1; l < 4; ++l) {
      CHECK(params.weights[l].rows() == 5);
      CHECK(params.weights[l].cols() == 5);
    }
  }
  SUBCASE("resnet projects only where widths change") {
    const auto spec = SubnetworkSpec::resnet(2, 6, InitScheme::kXavier, 3);
    const auto params = init_subnetwork(spec);
    CHECK(params.proj_weights[0].rows() == 6);  // 2 -> 6 needs a projection
    CHECK(params.proj_weights[0].cols() == 2);
    for (std::size_t l = 1; l < 4; ++l) CHECK(params.proj_weights[l].size() == 0);
  }
  SUBCASE("hlconc splits the basis count over two layers") {
    const auto spec = SubnetworkSpec::hlconc(2, 400, InitScheme::kKaiming, 9);
    CHECK(spec.layer_widths == std::vector<Index>{200, 200});
    CHECK(spec.output_width() == 400);
  }
}

TEST_CASE("same seed gives bit-identical params") {
  const auto spec = SubnetworkSpec::elm(2, 10, InitScheme::kKaiming, 7);
  const auto a = init_subnetwork(spec);
  const auto b = init_subnetwork(spec);
  CHECK(a.weights[0] == b.weights[0]);
  CHECK(a.biases[0] == b.biases[0]);

  auto other = spec;
  other.seed = 8;
  const auto c = init_subnetwork(other);
  CHECK(a.weights[0] != c.weights[0]);
}

TEST_CASE("kaiming draws match the variance formula") {
  // 10^6 draws with fan_in = 100: sample variance within 5% of 2/100.
  SubnetworkSpec spec;
  spec.architecture = Architecture::kElm;
  spec.input_dim = 100;
  spec.layer_widths = {10000};
  spec.init = InitScheme::kKaiming;
  spec.seed = 123;
  const auto params = init_subnetwork(spec);
  const auto& w = params.weights[0];
  const Real mean = w.mean();
  const Real var = (w.array() - mean).square().sum() / static_cast<Real>(w.size() - 1);
  CHECK(var == doctest::Approx(2.0 / 100.0).epsilon(0.05));
  // Companion bias rule: uniform on (-1, 1).
  CHECK(params.biases[0].cwiseAbs().maxCoeff() <= 1.0);
  CHECK(params.biases[0].cwiseAbs().maxCoeff() > 0.9);
  CHECK(!params.biases[0].isZero(0));
}

TEST_CASE("xavier draws stay inside the documented range") {
  SubnetworkSpec spec = SubnetworkSpec::elm(4, 500, InitScheme::kXavier, 5);
  const auto params = init_subnetwork(spec);
  const Real limit = std::sqrt(6.0 / (4 + 500));
  CHECK(params.weights[0].cwiseAbs().maxCoeff() <= limit);
  CHECK(params.biases[0].cwiseAbs().maxCoeff() <= limit);
  CHECK(params.weights[0].cwiseAbs().maxCoeff() > 0.5 * limit);  // actually spread out
  CHECK(!params.biases[0].isZero(0));
}

TEST_CASE("invalid specs are rejected") {
  SubnetworkSpec spec;
  spec.layer_widths = {};
  CHECK_THROWS_AS(init_subnetwork(spec), InvalidSpecError);
  spec.layer_widths = {0};
  CHECK_THROWS_AS(init_subnetwork(spec), InvalidSpecError);
  CHECK_THROWS_AS(SubnetworkSpec::hlconc(2, 401, InitScheme::kKaiming, 0), InvalidSpecError);
}

TEST_CASE("params container round-trips bit-exactly") {
  const auto spec = SubnetworkSpec::resnet(3, 5, InitScheme::kXavier, 42);
  const auto params = init_subnetwork(spec);
  std::stringstream buf;
  write_params(spec, params, buf);
  const auto [spec2, params2] = read_params(buf);
  CHECK(spec2.architecture == spec.architecture);
  CHECK(spec2.input_dim == spec.input_dim);
  CHECK(spec2.layer_widths == spec.layer_widths);
  CHECK(spec2.init == spec.init);
  CHECK(spec2.seed == spec.seed);
  for (std::size_t l = 0; l < params.weights.size(); ++l) {
    CHECK(params2.weights[l] == params.weights[l]);
    CHECK(params2.biases[l] == params.biases[l]);
    CHECK(params2.proj_weights[l] == params.proj_weights[l]);
  }
}
