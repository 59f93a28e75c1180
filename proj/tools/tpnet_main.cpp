#include "tpnet/bench.hpp"
#include "tpnet/selfcheck.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace tpnet;

struct CommonOptions {
  std::string problem;
  std::string arch = "tp-elm";
  std::vector<Index> p_list;
  std::vector<Index> m_list;
  std::uint64_t seed = 0;
  std::string seeds_str;
  std::vector<Index> grid;
  std::string init;
  Index picard_kmax = 100;
  double picard_eps = 1e-16;
  Index btm_blocks = 1;
  double rcond = -1;
  double ridge = 0;
  Index dim = 0;
  Index lhs_interior = 0;
  Index lhs_boundary = 0;
  int jobs = 1;
  std::string out_path;
};

void add_common_flags(CLI::App* cmd, CommonOptions& opt) {
  cmd->add_option("--problem", opt.problem, "catalog problem name");
  cmd->add_option("--arch", opt.arch, "tp-elm | tp-mlp | tp-resnet | hlconc");
  cmd->add_option("--p", opt.p_list, "subnetwork output width(s); M = p*p")->delimiter(',');
  cmd->add_option("--m", opt.m_list, "basis count(s); perfect squares for tp-*, even for hlconc")
      ->delimiter(',');
  cmd->add_option("--seed", opt.seed, "master seed (env TPNET_SEED overrides config files)")
      ->envname("TPNET_SEED");
  cmd->add_option("--seeds", opt.seeds_str, "comma-separated master seeds");
  cmd->add_option("--grid", opt.grid, "uniform grid counts per axis (single value replicates)")
      ->delimiter(',');
  cmd->add_option("--init", opt.init, "kaiming | xavier (defaults per problem)");
  cmd->add_option("--picard-kmax", opt.picard_kmax, "max Picard iterations");
  cmd->add_option("--picard-eps", opt.picard_eps, "Picard convergence tolerance");
  cmd->add_option("--btm-blocks", opt.btm_blocks, "time blocks (1 = no marching)");
  cmd->add_option("--rcond", opt.rcond, "singular value cutoff (default eps*max(N,M))");
  cmd->add_option("--ridge", opt.ridge, "ridge parameter lambda >= 0");
  cmd->add_option("--dim", opt.dim, "dimension for poisson_hd");
  cmd->add_option("--lhs-interior", opt.lhs_interior, "LHS interior point count");
  cmd->add_option("--lhs-boundary", opt.lhs_boundary, "LHS boundary point count");
  cmd->add_option("--jobs", opt.jobs, "concurrent (p, seed) cells");
  cmd->add_option("--out", opt.out_path, "CSV output path (default stdout)");
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::string token;
  std::stringstream ss(text);
  while (std::getline(ss, token, ','))
    if (!token.empty()) seeds.push_back(std::stoull(token));
  return seeds;
}

bench::RunSpec to_run_spec(const CommonOptions& opt, const CLI::App* cmd) {
  bench::RunSpec spec;
  spec.problem = opt.problem;
  spec.arch = bench::arch_from_cli(opt.arch);

  spec.p_list = opt.p_list;
  for (Index m : opt.m_list) spec.p_list.push_back(bench::width_from_basis_count(spec.arch, m));
  if (spec.p_list.empty()) throw CLI::ValidationError("--p/--m", "need at least one p or M");

  if (cmd->count("--seeds") > 0) {
    spec.seeds = parse_seed_list(opt.seeds_str);
    if (spec.seeds.empty())
      throw CLI::ValidationError("--seeds", "seed list must not be empty");
  } else if (cmd->count("--seed") > 0 || std::getenv("TPNET_SEED") != nullptr) {
    spec.seeds = {opt.seed};
  } else {
    spec.seeds = {0};
  }

  spec.sampling.grid = opt.grid;
  spec.sampling.lhs_interior = opt.lhs_interior;
  spec.sampling.lhs_boundary = opt.lhs_boundary;
  spec.picard.k_max = opt.picard_kmax;
  spec.picard.eps = opt.picard_eps;
  spec.btm_blocks = opt.btm_blocks;
  if (opt.rcond >= 0) spec.lstsq.rcond = opt.rcond;
  spec.lstsq.ridge = opt.ridge;
  if (!opt.init.empty()) spec.init = init_scheme_from_string(opt.init);
  spec.dim = opt.dim;
  spec.jobs = opt.jobs;
  return spec;
}

int emit_rows(const std::vector<bench::Row>& rows, bool with_paper, const std::string& out_path) {
  if (out_path.empty()) {
    bench::write_rows(rows, with_paper, std::cout);
  } else {
    std::ofstream out(out_path);
    if (!out) {
      std::cerr << "error: cannot open " << out_path << " for writing\n";
      return 1;
    }
    bench::write_rows(rows, with_paper, out);
  }
  for (const auto& row : rows)
    if (!row.ok()) {
      std::cerr << "error: cell (" << row.problem << ", " << bench::arch_to_cli(row.arch)
                << ", p=" << row.p << ", seed=" << row.seed << ") failed: " << row.error << "\n";
      return 1;
    }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tpnet: tensor-product randomized-basis PDE solver and benchmark driver"};
  app.require_subcommand(1);
  app.set_config("--config", "", "plain-text key=value config file (flags win)");
  app.fallthrough();

  CommonOptions solve_opt;
  CLI::App* solve_cmd = app.add_subcommand("solve", "run one experiment, emit CSV rows");
  add_common_flags(solve_cmd, solve_opt);

  int table = 0;
  std::string scale = "desk";
  CommonOptions sweep_opt;
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "regenerate a reference table");
  sweep_cmd->add_option("--table", table, "table id: 1, 2, 4, 5, 6, 7, 8")->required();
  sweep_cmd->add_option("--scale", scale, "desk | full");
  sweep_cmd->add_option("--seeds", sweep_opt.seeds_str, "comma-separated master seeds");
  sweep_cmd->add_option("--jobs", sweep_opt.jobs, "concurrent cells");
  sweep_cmd->add_option("--out", sweep_opt.out_path, "CSV output path (default stdout)");

  Index check_cases = 100;
  CLI::App* check_cmd = app.add_subcommand("check", "run the derivative/oracle property suites");
  check_cmd->add_option("--cases", check_cases, "finite-difference cases per architecture");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve_cmd->parsed()) {
      if (solve_opt.problem.empty()) {
        std::cerr << "error: --problem is required\n";
        return 2;
      }
      const bench::RunSpec spec = to_run_spec(solve_opt, solve_cmd);
      return emit_rows(bench::run_experiment(spec), false, solve_opt.out_path);
    }
    if (sweep_cmd->parsed()) {
      std::vector<std::uint64_t> seeds = parse_seed_list(sweep_opt.seeds_str);
      if (sweep_cmd->count("--seeds") > 0 && seeds.empty())
        throw CLI::ValidationError("--seeds", "seed list must not be empty");
      if (seeds.empty()) seeds = {0, 1, 2};
      const auto rows = bench::sweep_table(table, scale, seeds, sweep_cmd->count("--jobs") > 0
                                                                    ? sweep_opt.jobs
                                                                    : 1);
      return emit_rows(rows, true, sweep_opt.out_path);
    }
    if (check_cmd->parsed()) {
      const auto results = tpnet::check::run_all(check_cases);
      return tpnet::check::report(results, std::cout) ? 0 : 1;
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const tpnet::UnknownNameError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const tpnet::InvalidSpecError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
