#include "tpnet/solver.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <random>

namespace tpnet {

namespace {

using clock_type = std::chrono::steady_clock;

Real seconds_since(clock_type::time_point start) {
  return std::chrono::duration<Real>(clock_type::now() - start).count();
}

Basis make_basis(const PdeProblem& problem, const SolverConfig& config, std::uint64_t seed) {
  const Index d = problem.domain.dim();
  const InitScheme init = config.init_set ? config.init : problem.default_init;
  if (config.arch == Architecture::kHLConc)
    return make_direct_basis(Architecture::kHLConc, d, config.p, init, seed);
  return make_tensor_basis(config.arch, d, config.p, init, seed, config.second_arch);
}

CollocationSet sample(const PdeProblem& problem, const SolverConfig& config) {
  const auto& s = config.sampling;
  if (!s.grid.empty()) {
    std::vector<Index> counts = s.grid;
    if (counts.size() == 1)
      counts.assign(static_cast<std::size_t>(problem.domain.dim()), counts[0]);
    return sample_uniform_grid(problem.domain, counts);
  }
  if (s.lhs_interior > 0)
    return sample_lhs(problem.domain, s.lhs_interior, s.lhs_boundary, config.seed);
  if (!problem.default_grid.empty())
    return sample_uniform_grid(problem.domain, problem.default_grid);
  return sample_lhs(problem.domain, problem.default_lhs_interior, problem.default_lhs_boundary,
                    config.seed);
}

struct BasisJets {
  JetBatch a;      // tensor pair, or the single direct-basis jet
  JetBatch b;      // unused for direct bases
  bool tensor = false;
};

BasisJets jets_at(const Basis& basis, const Mat& points) {
  BasisJets jets;
  if (const auto* tb = std::get_if<TensorBasis>(&basis)) {
    jets.tensor = true;
    jets.a = eval_jets(tb->first.spec, tb->first.params, points);
    jets.b = eval_jets(tb->second.spec, tb->second.params, points);
  } else {
    const auto& db = std::get<DirectBasis>(basis);
    jets.a = eval_jets(db.sub.spec, db.sub.params, points);
  }
  return jets;
}

Vec apply_coefficients(const BasisJets& jets, const Vec& w) {
  if (jets.tensor) return tensor_basis_apply(jets.a, jets.b, w);
  return jets.a.values * w;
}

Vec apply_coefficients_deriv1(const BasisJets& jets, const Vec& w, Index axis) {
  if (jets.tensor) return tensor_basis_apply_deriv1(jets.a, jets.b, w, axis);
  return jets.a.grad[static_cast<std::size_t>(axis)] * w;
}

}  // namespace

Vec draw_w0(Index m, InitScheme scheme, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Vec w(m);
  if (scheme == InitScheme::kKaiming) {
    std::normal_distribution<double> dist(0.0, std::sqrt(2.0 / static_cast<double>(m)));
    for (Index i = 0; i < m; ++i) w(i) = dist(rng);
  } else {
    const double a = std::sqrt(6.0 / static_cast<double>(m + 1));
    std::uniform_real_distribution<double> dist(-a, a);
    for (Index i = 0; i < m; ++i) w(i) = dist(rng);
  }
  return w;
}

Solution solve_linear(const PdeProblem& problem, const SolverConfig& config) {
  if (!problem.is_linear())
    throw InvalidSpecError("solve_linear: problem has a nonlinear term, use Picard");
  const auto start = clock_type::now();
  Solution sol;
  sol.domain = problem.domain;
  sol.basis = make_basis(problem, config, config.seed);
  const CollocationSet colloc = sample(problem, config);
  AssembledSystem sys = assemble_linear_system(problem, sol.basis, colloc);
  sol.lstsq = solve_lstsq(sys.A, sys.F, config.lstsq);
  sol.coefficients = sol.lstsq.coefficients;
  sol.wall_time = seconds_since(start);
  sol.training_points = colloc.stacked();
  return sol;
}

Vec picard_iterate(const SvdFactor& factor, const std::function<Vec(const Vec&)>& rhs_builder,
                   Vec w0, const PicardOptions& options, PicardDiagnostics* diagnostics) {
  if (options.k_max < 1) throw InvalidSpecError("picard: k_max must be >= 1");
  if (!(options.eps > 0)) throw InvalidSpecError("picard: eps must be > 0");
  // The iteration has hit its floating-point floor when this many passes in
  // a row fail to improve the smallest increment seen so far.
  constexpr Index kStagnationWindow = 6;

  PicardDiagnostics diag;
  Vec w = std::move(w0);
  Real best_increment = std::numeric_limits<Real>::infinity();
  Index since_improvement = 0;
  for (Index k = 0; k < options.k_max; ++k) {
    Vec w_next = factor.solve(rhs_builder(w));
    const Real increment = (w - w_next).norm();
    diag.increments.push_back(increment);
    diag.final_increment = increment;
    diag.iterations = k + 1;
    w = std::move(w_next);
    if (increment < options.eps) {
      diag.tolerance_met = true;
      break;
    }
    if (increment < best_increment) {
      best_increment = increment;
      since_improvement = 0;
    } else if (++since_improvement >= kStagnationWindow) {
      diag.stagnated = true;
      break;
    }
  }
  diag.converged = diag.tolerance_met || diag.stagnated;
  const auto n = diag.increments.size();
  diag.increments_non_increasing =
      n >= 3 && diag.increments[n - 1] <= diag.increments[n - 2] &&
      diag.increments[n - 2] <= diag.increments[n - 3];
  if (diagnostics != nullptr) *diagnostics = diag;
  return w;
}

Solution solve_nonlinear_picard(const PdeProblem& problem, const SolverConfig& config) {
  if (problem.is_linear())
    throw InvalidSpecError("solve_nonlinear_picard: problem has no nonlinear term");
  const auto start = clock_type::now();
  Solution sol;
  sol.domain = problem.domain;
  sol.basis = make_basis(problem, config, config.seed);
  const CollocationSet colloc = sample(problem, config);
  AssembledSystem sys = assemble_linear_system(problem, sol.basis, colloc);

  // A is fixed across iterations; factor once, swap right-hand sides.
  const SvdFactor factor(sys.A, config.lstsq.rcond);
  sys.A.resize(0, 0);

  const BasisJets interior_jets = jets_at(sol.basis, colloc.interior);
  const Index d = problem.domain.dim();

  auto rhs_builder = [&](const Vec& w) {
    const Vec u = apply_coefficients(interior_jets, w);
    Mat du(colloc.n_interior(), d);
    for (Index i = 0; i < d; ++i) du.col(i) = apply_coefficients_deriv1(interior_jets, w, i);
    const Vec nl = problem.nonlinear(u, du);
    return assemble_rhs(problem, colloc, &nl);
  };

  const Vec w0 =
      draw_w0(basis_count(sol.basis), config.picard.w0_init, picard_w0_seed(config.seed));
  sol.coefficients = picard_iterate(factor, rhs_builder, w0, config.picard, &sol.picard);

  sol.lstsq.coefficients = sol.coefficients;
  sol.lstsq.effective_rank = factor.effective_rank();
  sol.lstsq.rcond_used = factor.rcond_used();
  sol.lstsq.residual_norm = factor.residual_norm(sol.coefficients, rhs_builder(sol.coefficients));
  sol.wall_time = seconds_since(start);
  sol.training_points = colloc.stacked();
  return sol;
}

Solution block_time_march(const PdeProblem& problem, const SolverConfig& config) {
  if (!problem.time_dependent())
    throw InvalidSpecError("block_time_march: problem is not time-dependent");
  if (!problem.is_linear())
    throw InvalidSpecError("block_time_march: only linear problems march in time");
  if (config.btm_blocks < 1) throw InvalidSpecError("block_time_march: need at least one block");
  if (config.btm_blocks == 1) return solve_linear(problem, config);

  const auto start = clock_type::now();
  const Index blocks = config.btm_blocks;
  const Real t0 = problem.domain.t0();
  const Real dt = (problem.domain.tf() - t0) / static_cast<Real>(blocks);

  Solution march;
  march.domain = problem.domain;
  march.blocks.reserve(static_cast<std::size_t>(blocks));

  std::vector<Mat> eval_chunks;
  for (Index k = 0; k < blocks; ++k) {
    PdeProblem block_problem = problem;
    block_problem.domain = problem.domain.time_slab(t0 + dt * static_cast<Real>(k),
                                                    t0 + dt * static_cast<Real>(k + 1));
    SolverConfig block_config = config;
    block_config.btm_blocks = 1;
    block_config.seed = block_seed(config.seed, k);

    const auto block_start = clock_type::now();
    Solution block;
    block.domain = block_problem.domain;
    block.basis = make_basis(block_problem, block_config, block_config.seed);
    const CollocationSet colloc = sample(block_problem, block_config);
    AssembledSystem sys = assemble_linear_system(block_problem, block.basis, colloc);
    if (k > 0) {
      // Chain the initial condition from the previous block's terminal state.
      const Vec h = evaluate(march.blocks.back(), colloc.initial);
      sys.F = assemble_rhs(block_problem, colloc, nullptr, &h);
    }
    try {
      block.lstsq = solve_lstsq(sys.A, sys.F, block_config.lstsq);
    } catch (const std::exception& e) {
      throw std::runtime_error("block " + std::to_string(k) + " failed: " + e.what());
    }
    block.coefficients = block.lstsq.coefficients;
    block.wall_time = seconds_since(block_start);
    block.training_points = colloc.stacked();

    // Default evaluation set: block 0 contributes everything, later blocks
    // drop their initial face (those points coincide with the previous
    // block's terminal grid level).
    if (k == 0) {
      eval_chunks.push_back(block.training_points);
    } else {
      Mat chunk(colloc.n_interior() + colloc.n_boundary(), problem.domain.dim());
      chunk << colloc.interior, colloc.boundary;
      eval_chunks.push_back(std::move(chunk));
    }
    march.blocks.push_back(std::move(block));
  }

  Index rows = 0;
  for (const auto& c : eval_chunks) rows += c.rows();
  march.training_points.resize(rows, problem.domain.dim());
  Index at = 0;
  for (const auto& c : eval_chunks) {
    march.training_points.middleRows(at, c.rows()) = c;
    at += c.rows();
  }
  march.wall_time = seconds_since(start);
  return march;
}

Solution solve(const PdeProblem& problem, const SolverConfig& config) {
  if (!problem.is_linear()) return solve_nonlinear_picard(problem, config);
  if (config.btm_blocks > 1) return block_time_march(problem, config);
  return solve_linear(problem, config);
}

namespace {

Vec evaluate_single(const Solution& solution, const Mat& points) {
  if (const auto* tb = std::get_if<TensorBasis>(&solution.basis)) {
    const Mat v1 = eval_values(tb->first.spec, tb->first.params, points);
    const Mat v2 = eval_values(tb->second.spec, tb->second.params, points);
    return tensor_values_apply(v1, v2, solution.coefficients);
  }
  const auto& db = std::get<DirectBasis>(solution.basis);
  return eval_values(db.sub.spec, db.sub.params, points) * solution.coefficients;
}

}  // namespace

Vec evaluate(const Solution& solution, const Mat& points) {
  if (!solution.is_btm()) return evaluate_single(solution, points);

  const Index t_axis = solution.domain.dim() - 1;
  const Real t0 = solution.domain.t0();
  const Real tf = solution.domain.tf();
  const auto blocks = static_cast<Index>(solution.blocks.size());
  const Real dt = (tf - t0) / static_cast<Real>(blocks);
  constexpr Real kTimeTol = 1e-9;

  // Bucket points per covering block, evaluate per block, scatter back.
  std::vector<std::vector<Index>> members(static_cast<std::size_t>(blocks));
  for (Index i = 0; i < points.rows(); ++i) {
    const Real t = points(i, t_axis);
    if (t < t0 - kTimeTol || t > tf + kTimeTol)
      throw InputError("evaluate: time coordinate " + std::to_string(t) +
                       " outside all time blocks");
    const Real offset = (t - t0) / dt;
    Index k = static_cast<Index>(std::ceil(offset - kTimeTol)) - 1;
    k = std::clamp<Index>(k, 0, blocks - 1);
    members[static_cast<std::size_t>(k)].push_back(i);
  }
  Vec out(points.rows());
  for (Index k = 0; k < blocks; ++k) {
    const auto& idx = members[static_cast<std::size_t>(k)];
    if (idx.empty()) continue;
    Mat sub(static_cast<Index>(idx.size()), points.cols());
    for (Index r = 0; r < sub.rows(); ++r) sub.row(r) = points.row(idx[static_cast<std::size_t>(r)]);
    const Vec values = evaluate_single(solution.blocks[static_cast<std::size_t>(k)], sub);
    for (Index r = 0; r < sub.rows(); ++r) out(idx[static_cast<std::size_t>(r)]) = values(r);
  }
  return out;
}

ErrorReport compute_errors(const Solution& solution, const PdeProblem& problem,
                           const Mat& eval_points) {
  if (!problem.exact) throw InvalidSpecError("compute_errors: problem has no exact solution");
  const auto start = clock_type::now();
  const Vec u = evaluate(solution, eval_points);
  const Vec u_exact = evaluate_field(problem.exact, eval_points);
  const Vec diff = u - u_exact;
  ErrorReport report;
  report.n_eval = eval_points.rows();
  report.l_inf = diff.size() > 0 ? diff.cwiseAbs().maxCoeff() : 0;
  report.l_2 = diff.norm();
  report.wall_time = seconds_since(start);
  return report;
}

ErrorReport compute_errors(const Solution& solution, const PdeProblem& problem) {
  return compute_errors(solution, problem, solution.training_points);
}

// ---------------------------------------------------------------------------
// Solution container
// ---------------------------------------------------------------------------

namespace {

constexpr char kSolutionMagic[4] = {'T', 'P', 'N', 'S'};
constexpr std::uint32_t kSolutionVersion = 1;

template <class T>
void put(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <class T>
T get(std::istream& in) {
  T value;
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw std::runtime_error("solution container: truncated stream");
  return value;
}

void put_vec(std::ostream& out, const Vec& v) {
  put<std::uint64_t>(out, static_cast<std::uint64_t>(v.size()));
  for (Index i = 0; i < v.size(); ++i) put<double>(out, v(i));
}

Vec get_vec(std::istream& in) {
  const auto n = static_cast<Index>(get<std::uint64_t>(in));
  Vec v(n);
  for (Index i = 0; i < n; ++i) v(i) = get<double>(in);
  return v;
}

void put_block(std::ostream& out, const Solution& sol) {
  put<std::uint8_t>(out, sol.domain.has_time ? 1 : 0);
  put_vec(out, sol.domain.lower);
  put_vec(out, sol.domain.upper);
  const bool tensor = std::holds_alternative<TensorBasis>(sol.basis);
  put<std::uint8_t>(out, tensor ? 1 : 0);
  if (tensor) {
    const auto& tb = std::get<TensorBasis>(sol.basis);
    write_params(tb.first.spec, tb.first.params, out);
    write_params(tb.second.spec, tb.second.params, out);
  } else {
    const auto& db = std::get<DirectBasis>(sol.basis);
    write_params(db.sub.spec, db.sub.params, out);
  }
  put_vec(out, sol.coefficients);
  put<double>(out, sol.lstsq.residual_norm);
  put<std::uint64_t>(out, static_cast<std::uint64_t>(sol.lstsq.effective_rank));
  put<double>(out, sol.lstsq.rcond_used);
  put<double>(out, sol.wall_time);
  put<std::uint64_t>(out, static_cast<std::uint64_t>(sol.picard.iterations));
  put<std::uint8_t>(out, sol.picard.converged ? 1 : 0);
  put<std::uint8_t>(out, sol.picard.tolerance_met ? 1 : 0);
  put<std::uint8_t>(out, sol.picard.stagnated ? 1 : 0);
  put<double>(out, sol.picard.final_increment);
}

Solution get_block(std::istream& in) {
  Solution sol;
  sol.domain.has_time = get<std::uint8_t>(in) != 0;
  sol.domain.lower = get_vec(in);
  sol.domain.upper = get_vec(in);
  const bool tensor = get<std::uint8_t>(in) != 0;
  if (tensor) {
    TensorBasis tb;
    auto [spec1, params1] = read_params(in);
    auto [spec2, params2] = read_params(in);
    tb.first = {spec1, std::move(params1)};
    tb.second = {spec2, std::move(params2)};
    sol.basis = std::move(tb);
  } else {
    auto [spec, params] = read_params(in);
    sol.basis = DirectBasis{{spec, std::move(params)}};
  }
  sol.coefficients = get_vec(in);
  sol.lstsq.coefficients = sol.coefficients;
  sol.lstsq.residual_norm = get<double>(in);
  sol.lstsq.effective_rank = static_cast<Index>(get<std::uint64_t>(in));
  sol.lstsq.rcond_used = get<double>(in);
  sol.wall_time = get<double>(in);
  sol.picard.iterations = static_cast<Index>(get<std::uint64_t>(in));
  sol.picard.converged = get<std::uint8_t>(in) != 0;
  sol.picard.tolerance_met = get<std::uint8_t>(in) != 0;
  sol.picard.stagnated = get<std::uint8_t>(in) != 0;
  sol.picard.final_increment = get<double>(in);
  return sol;
}

}  // namespace

std::string config_echo_json(const SolverConfig& config, const std::string& problem_name) {
  nlohmann::json j;
  j["problem"] = problem_name;
  j["arch"] = to_string(config.arch);
  if (config.second_arch) j["second_arch"] = to_string(*config.second_arch);
  j["p"] = config.p;
  j["m"] = config.basis_count();
  j["init"] = to_string(config.init_set ? config.init : InitScheme::kKaiming);
  j["seed"] = config.seed;
  j["grid"] = config.sampling.grid;
  j["lhs_interior"] = config.sampling.lhs_interior;
  j["lhs_boundary"] = config.sampling.lhs_boundary;
  j["picard_kmax"] = config.picard.k_max;
  j["picard_eps"] = config.picard.eps;
  j["btm_blocks"] = config.btm_blocks;
  j["ridge"] = config.lstsq.ridge;
  if (config.lstsq.rcond) j["rcond"] = *config.lstsq.rcond;
  return j.dump();
}

void save_solution(const Solution& solution, const std::string& path,
                   const std::string& config_echo) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out.write(kSolutionMagic, sizeof(kSolutionMagic));
  put<std::uint32_t>(out, kSolutionVersion);
  put<std::uint64_t>(out, config_echo.size());
  out.write(config_echo.data(), static_cast<std::streamsize>(config_echo.size()));
  const auto blocks = static_cast<std::uint64_t>(solution.blocks.size());
  put<std::uint64_t>(out, blocks);
  if (blocks == 0) {
    put_block(out, solution);
  } else {
    put<std::uint8_t>(out, solution.domain.has_time ? 1 : 0);
    put_vec(out, solution.domain.lower);
    put_vec(out, solution.domain.upper);
    for (const auto& b : solution.blocks) put_block(out, b);
  }
}

std::pair<Solution, std::string> load_solution(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  char magic[4];
  in.read(magic, sizeof(magic));
  if (!in || std::string(magic, 4) != std::string(kSolutionMagic, 4))
    throw std::runtime_error("solution container: bad magic");
  if (get<std::uint32_t>(in) != kSolutionVersion)
    throw std::runtime_error("solution container: unsupported version");
  std::string echo(get<std::uint64_t>(in), '\0');
  in.read(echo.data(), static_cast<std::streamsize>(echo.size()));
  const auto blocks = get<std::uint64_t>(in);
  if (blocks == 0) return {get_block(in), echo};
  Solution sol;
  sol.domain.has_time = get<std::uint8_t>(in) != 0;
  sol.domain.lower = get_vec(in);
  sol.domain.upper = get_vec(in);
  sol.blocks.reserve(blocks);
  for (std::uint64_t k = 0; k < blocks; ++k) sol.blocks.push_back(get_block(in));
  return {sol, echo};
}

}  // namespace tpnet
