#include "tpnet/selfcheck.hpp"

#include <cstdio>
#include <ostream>
#include <random>
#include <sstream>

namespace tpnet::check {

Real max_rel_error(const Mat& reference, const Mat& candidate) {
  if (reference.rows() != candidate.rows() || reference.cols() != candidate.cols())
    throw ShapeError("max_rel_error: shape mismatch");
  const Real scale = std::max<Real>(1.0, reference.cwiseAbs().maxCoeff());
  return (reference - candidate).cwiseAbs().maxCoeff() / scale;
}

namespace {

Mat shift(const Mat& points, Index axis, Real h) {
  Mat out = points;
  out.col(axis).array() += h;
  return out;
}

}  // namespace

FdErrors jet_fd_errors(const SubnetworkSpec& spec, const SubnetworkParams& params,
                       const Mat& points, Real h1, Real h2) {
  const JetBatch jet = eval_jets(spec, params, points);
  FdErrors err;
  for (Index axis = 0; axis < points.cols(); ++axis) {
    const auto i = static_cast<std::size_t>(axis);
    {
      const Mat up = eval_values(spec, params, shift(points, axis, h1));
      const Mat dn = eval_values(spec, params, shift(points, axis, -h1));
      err.grad = std::max(err.grad, max_rel_error(jet.grad[i], (up - dn) / (2 * h1)));
    }
    {
      const Mat up = eval_values(spec, params, shift(points, axis, h2));
      const Mat mid = eval_values(spec, params, points);
      const Mat dn = eval_values(spec, params, shift(points, axis, -h2));
      err.diag2 =
          std::max(err.diag2, max_rel_error(jet.diag2[i], (up - 2 * mid + dn) / (h2 * h2)));
    }
  }
  return err;
}

FdErrors tensor_fd_errors(const TensorBasis& basis, const Mat& points, Real h1, Real h2) {
  auto values_at = [&](const Mat& pts) {
    const JetBatch a = eval_jets(basis.first.spec, basis.first.params, pts);
    const JetBatch b = eval_jets(basis.second.spec, basis.second.params, pts);
    return tensor_basis_values(a, b);
  };
  const JetBatch a = eval_jets(basis.first.spec, basis.first.params, points);
  const JetBatch b = eval_jets(basis.second.spec, basis.second.params, points);
  FdErrors err;
  for (Index axis = 0; axis < points.cols(); ++axis) {
    {
      const Mat up = values_at(shift(points, axis, h1));
      const Mat dn = values_at(shift(points, axis, -h1));
      err.grad = std::max(
          err.grad, max_rel_error(tensor_basis_deriv1(a, b, axis), (up - dn) / (2 * h1)));
    }
    {
      const Mat up = values_at(shift(points, axis, h2));
      const Mat mid = values_at(points);
      const Mat dn = values_at(shift(points, axis, -h2));
      err.diag2 = std::max(err.diag2, max_rel_error(tensor_basis_deriv2(a, b, axis),
                                                    (up - 2 * mid + dn) / (h2 * h2)));
    }
  }
  return err;
}

namespace {

std::string format_err(Real v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2e", v);
  return buf;
}

Mat random_points(std::mt19937_64& rng, Index n, Index d, Real lo, Real hi) {
  std::uniform_real_distribution<Real> dist(lo, hi);
  Mat pts(n, d);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < d; ++j) pts(i, j) = dist(rng);
  return pts;
}

}  // namespace

std::vector<CheckResult> derivative_suite(Index cases) {
  constexpr Real kGradTol = 1e-6;
  constexpr Real kDiag2Tol = 1e-4;
  std::vector<CheckResult> results;
  std::mt19937_64 rng(20240901);

  const std::array<Architecture, 4> archs = {Architecture::kElm, Architecture::kMlp,
                                             Architecture::kResNet, Architecture::kHLConc};
  // Spread the case budget over architectures and both init schemes; each
  // case is a fresh (seed, point batch) pair of 5 points.
  const Index per_arch = std::max<Index>(1, cases / 4);
  for (Architecture arch : archs) {
    FdErrors worst;
    for (Index c = 0; c < per_arch; ++c) {
      const Index d = 1 + static_cast<Index>(rng() % 3);
      const Index width = arch == Architecture::kHLConc ? 8 : 7;
      const InitScheme init = c % 2 == 0 ? InitScheme::kKaiming : InitScheme::kXavier;
      const SubnetworkSpec spec = SubnetworkSpec::make(arch, d, width, init, rng());
      const SubnetworkParams params = init_subnetwork(spec);
      const FdErrors err = jet_fd_errors(spec, params, random_points(rng, 5, d, -1.0, 1.0));
      worst.grad = std::max(worst.grad, err.grad);
      worst.diag2 = std::max(worst.diag2, err.diag2);
    }
    results.push_back({"jets/" + to_string(arch) + " vs finite differences",
                       worst.grad <= kGradTol && worst.diag2 <= kDiag2Tol,
                       "grad " + format_err(worst.grad) + ", diag2 " + format_err(worst.diag2)});
  }

  FdErrors worst;
  for (Index c = 0; c < per_arch; ++c) {
    const Index d = 1 + static_cast<Index>(rng() % 3);
    const Architecture arch = archs[static_cast<std::size_t>(rng() % 3)];
    const InitScheme init = c % 2 == 0 ? InitScheme::kKaiming : InitScheme::kXavier;
    const TensorBasis basis = make_tensor_basis(arch, d, 4, init, rng());
    const FdErrors err = tensor_fd_errors(basis, random_points(rng, 5, d, -1.0, 1.0));
    worst.grad = std::max(worst.grad, err.grad);
    worst.diag2 = std::max(worst.diag2, err.diag2);
  }
  results.push_back({"tensor basis derivatives vs finite differences",
                     worst.grad <= kGradTol && worst.diag2 <= kDiag2Tol,
                     "grad " + format_err(worst.grad) + ", diag2 " + format_err(worst.diag2)});
  return results;
}

std::vector<CheckResult> lstsq_suite() {
  std::vector<CheckResult> results;
  std::mt19937_64 rng(7);
  std::normal_distribution<Real> nd;

  {
    Mat a = Mat::Identity(3, 3);
    Vec f(3);
    f << 1, 2, 3;
    const auto r = solve_lstsq(a, f);
    results.push_back({"lstsq identity system",
                       (r.coefficients - f).norm() < 1e-14 && r.residual_norm < 1e-14, ""});
  }
  {
    // Well-conditioned overdetermined system against the normal equations.
    Mat a(50, 20);
    for (Index i = 0; i < a.size(); ++i) a(i) = nd(rng);
    Vec f(50);
    for (Index i = 0; i < f.size(); ++i) f(i) = nd(rng);
    const Vec oracle = (a.transpose() * a).ldlt().solve(a.transpose() * f);
    const auto r = solve_lstsq(a, f);
    const Real rel = (r.coefficients - oracle).norm() / oracle.norm();
    results.push_back(
        {"lstsq vs normal-equations oracle", rel <= 1e-10, "rel " + format_err(rel)});
  }
  {
    // Rank-deficient: duplicated column; the min-norm solution splits the
    // weight evenly, any nullspace addition only grows the norm.
    Mat a(4, 2);
    a.col(0) << 1, 2, 3, 4;
    a.col(1) = a.col(0);
    const Vec f = 2 * a.col(0);
    LstsqOptions options;
    options.rcond = 1e-12;
    const auto r = solve_lstsq(a, f, options);
    const bool splits = std::abs(r.coefficients(0) - 1.0) < 1e-10 &&
                        std::abs(r.coefficients(1) - 1.0) < 1e-10;
    results.push_back({"lstsq minimum-norm on rank-deficient system",
                       splits && r.effective_rank == 1, ""});
  }
  return results;
}

std::vector<CheckResult> sampling_suite() {
  std::vector<CheckResult> results;
  {
    const Domain dom = Domain::box(Vec::Constant(3, 0.0), Vec::Constant(3, 2.0));
    const CollocationSet set = sample_lhs(dom, 64, 60, 11);
    bool strat = true;
    for (Index j = 0; j < 3 && strat; ++j) {
      std::vector<bool> hit(64, false);
      for (Index i = 0; i < 64; ++i) {
        const auto bin = static_cast<Index>((set.interior(i, j) - 0.0) / 2.0 * 64);
        if (bin < 0 || bin >= 64 || hit[static_cast<std::size_t>(bin)]) {
          strat = false;
          break;
        }
        hit[static_cast<std::size_t>(bin)] = true;
      }
    }
    results.push_back({"lhs marginals hit every bin once", strat, ""});
  }
  {
    const Domain dom = Domain::box(Vec::Constant(2, -1.0), Vec::Constant(2, 1.0));
    const CollocationSet set = sample_uniform_grid(dom, {101, 101});
    results.push_back({"grid boundary split 101x101",
                       set.n_boundary() == 400 && set.n_interior() == 101 * 101 - 400, ""});
  }
  return results;
}

Real manufactured_residual(const PdeProblem& problem, const Mat& points, Real h) {
  const auto& exact = problem.exact;
  if (!exact) throw InvalidSpecError("manufactured_residual: no exact solution");
  const Index d = problem.domain.dim();
  Real worst = 0;
  Vec x(d);
  for (Index i = 0; i < points.rows(); ++i) {
    x = points.row(i).transpose();
    const Real u0 = exact(x);
    Real lu = problem.interior_op.value * u0;
    Vec du(d);
    for (Index j = 0; j < d; ++j) {
      // Fourth-order central stencils; second order cannot reach 1e-6
      // absolute residuals on solutions with sin(4 pi y)-scale curvature.
      Vec xp = x, xm = x, xpp = x, xmm = x;
      xp(j) += h;
      xm(j) -= h;
      xpp(j) += 2 * h;
      xmm(j) -= 2 * h;
      const Real f1 = exact(xp), fm1 = exact(xm), f2 = exact(xpp), fm2 = exact(xmm);
      du(j) = (-f2 + 8 * f1 - 8 * fm1 + fm2) / (12 * h);
      if (problem.interior_op.deriv1.size() > 0)
        lu += problem.interior_op.deriv1(j) * du(j);
      if (problem.interior_op.deriv2.size() > 0)
        lu += problem.interior_op.deriv2(j) * (-f2 + 16 * f1 - 30 * u0 + 16 * fm1 - fm2) /
              (12 * h * h);
    }
    if (problem.nonlinear) {
      const Vec u_vec = Vec::Constant(1, u0);
      Mat du_mat(1, d);
      du_mat.row(0) = du.transpose();
      lu += problem.nonlinear(u_vec, du_mat)(0);
    }
    worst = std::max(worst, std::abs(lu - problem.source(x)));
  }
  return worst;
}

std::vector<CheckResult> catalog_suite() {
  std::vector<CheckResult> results;
  std::mt19937_64 rng(3);
  for (const auto& name : catalog_names()) {
    const PdeProblem problem = catalog(name);
    const Index d = problem.domain.dim();
    // 100 random interior points, kept away from the bounds so central
    // differences stay inside the domain.
    Mat pts(100, d);
    for (Index i = 0; i < pts.rows(); ++i)
      for (Index j = 0; j < d; ++j) {
        std::uniform_real_distribution<Real> dist(problem.domain.lower(j) + 1e-3,
                                                  problem.domain.upper(j) - 1e-3);
        pts(i, j) = dist(rng);
      }
    const Real residual = manufactured_residual(problem, pts);
    results.push_back({"catalog consistency: " + name, residual <= 1e-6,
                       "fd residual " + format_err(residual)});
  }
  return results;
}

std::vector<CheckResult> determinism_suite() {
  std::vector<CheckResult> results;
  const PdeProblem problem = catalog("func2d");
  SolverConfig config;
  config.arch = Architecture::kElm;
  config.p = 10;
  config.seed = 5;
  config.sampling.grid = {21, 21};
  const Solution s1 = solve_linear(problem, config);
  const Solution s2 = solve_linear(problem, config);
  const bool identical = s1.coefficients == s2.coefficients &&
                         s1.lstsq.residual_norm == s2.lstsq.residual_norm;
  results.push_back({"determinism: repeated solve is bit-identical", identical, ""});

  const SubnetworkSpec spec = SubnetworkSpec::mlp(2, 6, InitScheme::kKaiming, 7);
  const SubnetworkParams p1 = init_subnetwork(spec);
  const SubnetworkParams p2 = init_subnetwork(spec);
  bool same = true;
  for (std::size_t l = 0; l < p1.weights.size(); ++l)
    same = same && p1.weights[l] == p2.weights[l] && p1.biases[l] == p2.biases[l];
  results.push_back({"determinism: repeated init is bit-identical", same, ""});
  return results;
}

std::vector<CheckResult> run_all(Index fd_cases) {
  std::vector<CheckResult> all;
  for (auto suite : {derivative_suite(fd_cases), lstsq_suite(), sampling_suite(),
                     catalog_suite(), determinism_suite()})
    all.insert(all.end(), suite.begin(), suite.end());
  return all;
}

bool report(const std::vector<CheckResult>& results, std::ostream& out) {
  bool all_pass = true;
  for (const auto& r : results) {
    out << (r.pass ? "PASS" : "FAIL") << "  " << r.name;
    if (!r.detail.empty()) out << "  (" << r.detail << ")";
    out << '\n';
    all_pass = all_pass && r.pass;
  }
  return all_pass;
}

}  // namespace tpnet::check
