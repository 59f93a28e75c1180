#include "tpnet/subnetwork.hpp"

#include <fstream>
#include <istream>
#include <ostream>

namespace tpnet {

std::string to_string(Architecture arch) {
  switch (arch) {
    case Architecture::kElm: return "elm";
    case Architecture::kMlp: return "mlp";
    case Architecture::kResNet: return "resnet";
    case Architecture::kHLConc: return "hlconc";
  }
  return "?";
}

std::string to_string(InitScheme scheme) {
  return scheme == InitScheme::kKaiming ? "kaiming" : "xavier";
}

Architecture architecture_from_string(const std::string& name) {
  if (name == "elm") return Architecture::kElm;
  if (name == "mlp") return Architecture::kMlp;
  if (name == "resnet") return Architecture::kResNet;
  if (name == "hlconc") return Architecture::kHLConc;
  throw UnknownNameError("unknown architecture: " + name);
}

InitScheme init_scheme_from_string(const std::string& name) {
  if (name == "kaiming") return InitScheme::kKaiming;
  if (name == "xavier") return InitScheme::kXavier;
  throw UnknownNameError("unknown init scheme: " + name);
}

Index SubnetworkSpec::output_width() const {
  if (architecture == Architecture::kHLConc) {
    Index total = 0;
    for (Index w : layer_widths) total += w;
    return total;
  }
  return layer_widths.empty() ? 0 : layer_widths.back();
}

void SubnetworkSpec::validate() const {
  if (input_dim < 1) throw InvalidSpecError("subnetwork input_dim must be >= 1");
  if (layer_widths.empty()) throw InvalidSpecError("subnetwork needs at least one layer");
  for (Index w : layer_widths)
    if (w < 1) throw InvalidSpecError("subnetwork layer widths must be >= 1");
  if (architecture == Architecture::kHLConc && layer_widths.size() != 2)
    throw InvalidSpecError("hlconc has exactly two hidden layers");
  if (architecture == Architecture::kResNet) {
    if (layer_widths.size() % 2 != 0)
      throw InvalidSpecError("resnet needs an even layer count (two-layer residual blocks)");
    for (Index w : layer_widths)
      if (w != layer_widths.front())
        throw InvalidSpecError("resnet layers must share one width");
  }
}

SubnetworkSpec SubnetworkSpec::elm(Index d, Index p, InitScheme init, std::uint64_t seed) {
  return SubnetworkSpec{Architecture::kElm, d, {p}, init, seed};
}

SubnetworkSpec SubnetworkSpec::mlp(Index d, Index p, InitScheme init, std::uint64_t seed) {
  return SubnetworkSpec{Architecture::kMlp, d, {p, p, p, p}, init, seed};
}

SubnetworkSpec SubnetworkSpec::resnet(Index d, Index p, InitScheme init, std::uint64_t seed) {
  return SubnetworkSpec{Architecture::kResNet, d, {p, p, p, p}, init, seed};
}

SubnetworkSpec SubnetworkSpec::hlconc(Index d, Index m_total, InitScheme init,
                                      std::uint64_t seed) {
  if (m_total < 2 || m_total % 2 != 0)
    throw InvalidSpecError("hlconc total width must be a positive even number");
  return SubnetworkSpec{Architecture::kHLConc, d, {m_total / 2, m_total / 2}, init, seed};
}

SubnetworkSpec SubnetworkSpec::make(Architecture arch, Index d, Index width, InitScheme init,
                                    std::uint64_t seed) {
  switch (arch) {
    case Architecture::kElm: return elm(d, width, init, seed);
    case Architecture::kMlp: return mlp(d, width, init, seed);
    case Architecture::kResNet: return resnet(d, width, init, seed);
    case Architecture::kHLConc: return hlconc(d, width, init, seed);
  }
  throw InvalidSpecError("unknown architecture enum value");
}

namespace {

constexpr char kMagic[4] = {'T', 'P', 'N', 'B'};
constexpr std::uint32_t kVersion = 1;

template <class T>
void put(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <class T>
T get(std::istream& in) {
  T value;
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw std::runtime_error("params container: truncated stream");
  return value;
}

// Blocks are stored row-major regardless of Eigen's in-memory layout.
void put_matrix(std::ostream& out, const Mat& m) {
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) put<double>(out, m(i, j));
}

Mat get_matrix(std::istream& in, Index rows, Index cols) {
  Mat m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = get<double>(in);
  return m;
}

void put_vector(std::ostream& out, const Vec& v) {
  for (Index i = 0; i < v.size(); ++i) put<double>(out, v(i));
}

Vec get_vector(std::istream& in, Index n) {
  Vec v(n);
  for (Index i = 0; i < n; ++i) v(i) = get<double>(in);
  return v;
}

}  // namespace

void write_params(const SubnetworkSpec& spec, const SubnetworkParams& params, std::ostream& out) {
  out.write(kMagic, sizeof(kMagic));
  put<std::uint32_t>(out, kVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(spec.architecture));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(spec.init));
  put<std::uint64_t>(out, spec.seed);
  put<std::uint64_t>(out, static_cast<std::uint64_t>(spec.input_dim));
  put<std::uint64_t>(out, static_cast<std::uint64_t>(spec.layer_widths.size()));
  for (Index w : spec.layer_widths) put<std::uint64_t>(out, static_cast<std::uint64_t>(w));
  for (std::size_t l = 0; l < params.weights.size(); ++l) {
    put_matrix(out, params.weights[l]);
    put_vector(out, params.biases[l]);
    const bool has_proj = params.proj_weights[l].size() > 0;
    put<std::uint8_t>(out, has_proj ? 1 : 0);
    if (has_proj) {
      put_matrix(out, params.proj_weights[l]);
      put_vector(out, params.proj_biases[l]);
    }
  }
}

std::pair<SubnetworkSpec, SubnetworkParams> read_params(std::istream& in) {
  char magic[4];
  in.read(magic, sizeof(magic));
  if (!in || std::string(magic, 4) != std::string(kMagic, 4))
    throw std::runtime_error("params container: bad magic");
  if (get<std::uint32_t>(in) != kVersion)
    throw std::runtime_error("params container: unsupported version");
  SubnetworkSpec spec;
  spec.architecture = static_cast<Architecture>(get<std::uint32_t>(in));
  spec.init = static_cast<InitScheme>(get<std::uint32_t>(in));
  spec.seed = get<std::uint64_t>(in);
  spec.input_dim = static_cast<Index>(get<std::uint64_t>(in));
  const auto n_layers = get<std::uint64_t>(in);
  spec.layer_widths.resize(n_layers);
  for (auto& w : spec.layer_widths) w = static_cast<Index>(get<std::uint64_t>(in));
  spec.validate();

  SubnetworkParams params;
  params.proj_weights.resize(n_layers);
  params.proj_biases.resize(n_layers);
  Index fan_in = spec.input_dim;
  for (std::size_t l = 0; l < n_layers; ++l) {
    const Index fan_out = spec.layer_widths[l];
    params.weights.push_back(get_matrix(in, fan_out, fan_in));
    params.biases.push_back(get_vector(in, fan_out));
    if (get<std::uint8_t>(in) != 0) {
      params.proj_weights[l] = get_matrix(in, fan_out, fan_in);
      params.proj_biases[l] = get_vector(in, fan_out);
    }
    fan_in = fan_out;
  }
  return {spec, params};
}

void save_params(const SubnetworkSpec& spec, const SubnetworkParams& params,
                 const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  write_params(spec, params, out);
}

std::pair<SubnetworkSpec, SubnetworkParams> load_params(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_params(in);
}

}  // namespace tpnet
