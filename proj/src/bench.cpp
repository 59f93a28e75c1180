#include "tpnet/bench.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <thread>

extern "C" void openblas_set_num_threads(int);

namespace tpnet::bench {

Architecture arch_from_cli(const std::string& name) {
  if (name == "tp-elm") return Architecture::kElm;
  if (name == "tp-mlp") return Architecture::kMlp;
  if (name == "tp-resnet") return Architecture::kResNet;
  if (name == "hlconc") return Architecture::kHLConc;
  throw UnknownNameError("unknown architecture: " + name +
                         " (expected tp-elm, tp-mlp, tp-resnet, or hlconc)");
}

std::string arch_to_cli(Architecture arch) {
  switch (arch) {
    case Architecture::kElm: return "tp-elm";
    case Architecture::kMlp: return "tp-mlp";
    case Architecture::kResNet: return "tp-resnet";
    case Architecture::kHLConc: return "hlconc";
  }
  return "?";
}

Index width_from_basis_count(Architecture arch, Index m) {
  if (m < 1) throw InvalidSpecError("basis count must be >= 1");
  if (arch == Architecture::kHLConc) {
    if (m % 2 != 0) throw InvalidSpecError("hlconc basis count must be even, got " +
                                           std::to_string(m));
    return m;
  }
  const auto p = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(m))));
  if (p * p != m)
    throw InvalidSpecError("tensor-product basis count must be a perfect square, got " +
                           std::to_string(m));
  return p;
}

namespace {

PdeProblem make_problem(const RunSpec& spec) {
  if (spec.problem == "poisson_hd" && spec.dim > 0) return catalog_poisson_hd(spec.dim);
  return catalog(spec.problem);
}

}  // namespace

Row run_cell(const RunSpec& spec, Index p, std::uint64_t seed) {
  Row row;
  row.problem = spec.problem;
  row.arch = spec.arch;
  row.p = p;
  row.seed = seed;
  row.btm_blocks = spec.btm_blocks;
  try {
    const PdeProblem problem = make_problem(spec);
    SolverConfig config;
    config.arch = spec.arch;
    config.p = p;
    if (spec.init) {
      config.init = *spec.init;
      config.init_set = true;
    }
    config.seed = seed;
    config.sampling = spec.sampling;
    config.picard = spec.picard;
    config.btm_blocks = spec.btm_blocks;
    config.lstsq = spec.lstsq;
    row.m = config.basis_count();

    Solution sol = solve(problem, config);
    row.errors = compute_errors(sol, problem);
    row.time_s = sol.wall_time;
    if (sol.is_btm()) {
      row.rank = sol.blocks.back().lstsq.effective_rank;
      Real r2 = 0;
      for (const auto& b : sol.blocks) r2 += b.lstsq.residual_norm * b.lstsq.residual_norm;
      row.residual = std::sqrt(r2);
    } else {
      row.rank = sol.lstsq.effective_rank;
      row.residual = sol.lstsq.residual_norm;
    }
    row.picard_iters = sol.picard.iterations;
    row.picard_converged = sol.picard.converged;
    row.solution = std::move(sol);
  } catch (const std::exception& e) {
    row.error = e.what();
  }
  return row;
}

namespace {

struct Cell {
  RunSpec spec;
  Index p;
  std::uint64_t seed;
  std::optional<Real> paper;
};

std::vector<Row> run_cells(std::vector<Cell> cells, int jobs) {
  std::vector<Row> rows(cells.size());
  auto run_one = [&](std::size_t i) {
    rows[i] = run_cell(cells[i].spec, cells[i].p, cells[i].seed);
    rows[i].paper_linf = cells[i].paper;
    rows[i].solution = Solution{};  // sweeps and CSV runs don't keep bases alive
  };
  if (jobs > 1 && cells.size() > 1) {
    // One BLAS thread per worker; cells are independent and rows land in
    // deterministic (p, seed) order whatever the completion order.
    openblas_set_num_threads(1);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t i; (i = next.fetch_add(1)) < cells.size();) run_one(i);
    };
    std::vector<std::thread> pool;
    const int n = std::min<int>(jobs, static_cast<int>(cells.size()));
    pool.reserve(static_cast<std::size_t>(n));
    for (int t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    openblas_set_num_threads(0);  // back to the library default
  } else {
    for (std::size_t i = 0; i < cells.size(); ++i) run_one(i);
  }
  return rows;
}

}  // namespace

std::vector<Row> run_experiment(const RunSpec& spec) {
  if (spec.p_list.empty()) throw InvalidSpecError("experiment needs at least one p or M value");
  if (spec.seeds.empty()) throw InvalidSpecError("experiment needs at least one seed");
  make_problem(spec);  // fail fast on unknown problems
  std::vector<Cell> cells;
  for (Index p : spec.p_list)
    for (std::uint64_t seed : spec.seeds) cells.push_back({spec, p, seed, {}});
  return run_cells(std::move(cells), spec.jobs);
}

// ---------------------------------------------------------------------------
// Reference values (tables 1, 2, 4-8); keyed by M, dimension, or BTM flag.
// ---------------------------------------------------------------------------

namespace {

struct PaperTable {
  // arch order: hlconc, tp-elm, tp-mlp, tp-resnet
  std::map<Index, std::array<Real, 4>> linf;
};

const std::map<int, PaperTable>& paper_tables() {
  static const std::map<int, PaperTable> tables = {
      {1,
       {{{100, {8.77e-01, 9.22e-01, 8.60e-01, 8.77e-01}},
         {400, {3.05e-04, 9.16e-05, 5.37e-04, 2.75e-03}},
         {900, {2.07e-06, 4.86e-06, 5.18e-07, 1.66e-04}},
         {1600, {8.16e-08, 1.55e-06, 8.52e-08, 9.95e-08}},
         {2500, {1.72e-08, 8.94e-06, 4.82e-07, 2.31e-09}},
         {3600, {7.74e-08, 4.88e-06, 2.03e-08, 8.55e-11}},
         {4900, {1.75e-08, 8.34e-07, 4.28e-08, 1.93e-10}},
         {6400, {1.65e-08, 1.87e-07, 2.50e-08, 6.32e-11}},
         {8100, {4.55e-08, 7.17e-07, 4.15e-08, 6.11e-10}},
         {10000, {4.62e-08, 7.66e-07, 4.80e-08, 1.43e-10}}}}},
      {2,
       {{{100, {1.39e+02, 5.34e+01, 7.15e+01, 8.78e+01}},
         {400, {1.93e-02, 8.21e-03, 1.75e-01, 1.26e+00}},
         {900, {3.06e-05, 1.04e-05, 2.59e-05, 4.54e-02}},
         {1600, {3.05e-07, 8.97e-06, 2.29e-07, 1.02e-04}},
         {2500, {1.72e-08, 3.24e-06, 1.03e-07, 3.27e-07}},
         {3600, {2.01e-08, 2.51e-06, 6.66e-08, 1.51e-10}},
         {4900, {9.02e-09, 8.64e-07, 1.67e-08, 1.86e-10}},
         {6400, {9.05e-09, 6.37e-07, 4.09e-08, 4.93e-11}},
         {8100, {9.12e-09, 5.34e-07, 1.11e-08, 6.22e-10}},
         {10000, {2.56e-08, 2.58e-07, 1.79e-08, 1.66e-10}}}}},
      {4,
       {{{100, {1.83e-02, 4.86e-02, 3.63e-01, 4.54e-01}},
         {400, {1.05e-06, 2.35e-05, 2.40e-03, 5.89e-02}},
         {900, {1.11e-09, 1.22e-08, 6.25e-06, 5.23e-03}},
         {1600, {1.08e-09, 2.40e-11, 4.01e-08, 2.45e-04}},
         {2500, {7.14e-09, 2.56e-12, 2.06e-10, 3.18e-06}},
         {3600, {9.20e-09, 2.78e-12, 2.38e-12, 1.10e-07}},
         {4900, {8.48e-08, 1.83e-12, 9.35e-13, 9.97e-09}},
         {6400, {2.09e-07, 1.41e-12, 9.31e-13, 2.06e-10}},
         {8100, {8.46e-07, 2.37e-12, 5.26e-13, 1.16e-11}},
         {10000, {1.12e-06, 2.35e-12, 6.68e-13, 1.73e-12}}}}},
      {5,
       {{{100, {3.32e-02, 7.62e-02, 1.46e-01, 6.04e-01}},
         {400, {5.99e-07, 3.38e-05, 3.82e-03, 1.20e-01}},
         {900, {6.37e-10, 9.34e-09, 1.56e-05, 5.09e-03}},
         {1600, {6.55e-10, 2.24e-11, 8.03e-08, 3.02e-04}},
         {2500, {2.88e-09, 4.55e-12, 1.29e-10, 4.77e-06}},
         {3600, {5.55e-09, 1.48e-12, 2.51e-12, 1.35e-07}},
         {4900, {5.34e-08, 3.47e-12, 9.01e-13, 5.67e-09}},
         {6400, {2.40e-07, 1.76e-12, 6.98e-13, 1.93e-10}},
         {8100, {5.19e-07, 2.05e-12, 5.96e-13, 1.20e-11}},
         {10000, {3.01e-06, 2.33e-12, 2.02e-13, 1.51e-12}}}}},
      {6,
       {{{100, {6.66e-04, 1.79e-03, 2.34e-02, 4.70e-01}},
         {400, {6.50e-10, 1.46e-07, 1.66e-04, 2.53e-02}},
         {900, {2.45e-14, 2.08e-11, 1.28e-07, 8.77e-04}},
         {1600, {3.76e-14, 1.48e-14, 5.69e-10, 2.99e-05}},
         {2500, {6.95e-13, 1.11e-15, 4.90e-13, 1.78e-07}},
         {3600, {2.04e-12, 1.78e-15, 6.33e-15, 3.15e-09}},
         {4900, {7.65e-12, 1.22e-15, 3.77e-15, 2.76e-10}},
         {6400, {1.96e-11, 1.33e-15, 3.55e-15, 8.38e-12}},
         {8100, {7.64e-11, 3.22e-15, 1.11e-15, 2.67e-13}},
         {10000, {1.45e-10, 2.33e-15, 1.11e-15, 4.09e-14}}}}},
      {7,
       {{{5, {2.13e-08, 2.24e-07, 2.37e-09, 7.28e-09}},
         {7, {1.32e-05, 1.10e-04, 3.48e-06, 3.93e-06}},
         {10, {1.57e-03, 1.99e-03, 1.24e-04, 2.02e-04}},
         {15, {3.87e-03, 1.79e-02, 7.56e-03, 6.30e-03}}}}},
      {8,
       {{{0, {1.05e+00, 2.49e+02, 6.10e-01, 3.35e-04}},
         {1, {1.29e-06, 1.19e-04, 1.22e-06, 1.92e-08}}}}},
  };
  return tables;
}

int arch_column(Architecture arch) {
  switch (arch) {
    case Architecture::kHLConc: return 0;
    case Architecture::kElm: return 1;
    case Architecture::kMlp: return 2;
    case Architecture::kResNet: return 3;
  }
  return 0;
}

}  // namespace

std::optional<Real> paper_linf(int table, Architecture arch, Index key) {
  const auto& tables = paper_tables();
  const auto t = tables.find(table);
  if (t == tables.end()) return {};
  const auto row = t->second.linf.find(key);
  if (row == t->second.linf.end()) return {};
  return row->second[static_cast<std::size_t>(arch_column(arch))];
}

// ---------------------------------------------------------------------------
// Table sweeps
// ---------------------------------------------------------------------------

namespace {

const std::array<Architecture, 4> kSweepArchs = {Architecture::kHLConc, Architecture::kElm,
                                                 Architecture::kMlp, Architecture::kResNet};

std::vector<Index> desk_grid(std::vector<Index> grid) {
  for (auto& c : grid) c = std::min<Index>(c, 51);
  return grid;
}

}  // namespace

std::vector<Row> sweep_table(int table, const std::string& scale,
                             const std::vector<std::uint64_t>& seeds, int jobs) {
  if (table == 3)
    throw UnknownNameError(
        "table 3 compares against external methods (FEM, RFM, RNN-PG); not reproducible here");
  if (paper_tables().find(table) == paper_tables().end())
    throw UnknownNameError("unknown table id " + std::to_string(table) +
                           " (supported: 1, 2, 4, 5, 6, 7, 8)");
  if (scale != "desk" && scale != "full")
    throw UnknownNameError("unknown scale '" + scale + "' (expected desk or full)");
  if (seeds.empty()) throw InvalidSpecError("sweep needs at least one seed");
  const bool desk = scale == "desk";

  std::vector<Index> m_values = {100, 400, 900, 1600, 2500, 3600, 4900, 6400, 8100, 10000};
  std::vector<Cell> cells;

  auto add_cell = [&](const RunSpec& spec, Index p, Index paper_key) {
    for (std::uint64_t seed : seeds) {
      Cell cell{spec, p, seed, paper_linf(table, spec.arch, paper_key)};
      cells.push_back(std::move(cell));
    }
  };

  switch (table) {
    case 1:
    case 2: {
      const Index cap = desk ? 3600 : 10000;
      const std::string problem = table == 1 ? "func2d" : "helmholtz2d";
      std::vector<Index> grid{101, 101};
      if (desk) grid = desk_grid(grid);
      for (Architecture arch : kSweepArchs)
        for (Index m : m_values) {
          if (m > cap) continue;
          RunSpec spec;
          spec.problem = problem;
          spec.arch = arch;
          spec.sampling.grid = grid;
          add_cell(spec, width_from_basis_count(arch, m), m);
        }
      break;
    }
    case 4:
    case 5:
    case 6: {
      const Index cap = desk ? 2500 : 10000;
      const std::string problem = table == 4 ? "heat2d" : table == 5 ? "wave2d" : "burgers2d";
      for (Architecture arch : kSweepArchs)
        for (Index m : m_values) {
          if (m > cap) continue;
          RunSpec spec;
          spec.problem = problem;
          spec.arch = arch;
          spec.sampling.grid = {51, 51, 51};  // the reference grid is already <= 51 per axis
          add_cell(spec, width_from_basis_count(arch, m), m);
        }
      break;
    }
    case 7: {
      const std::vector<Index> dims = desk ? std::vector<Index>{5, 7}
                                           : std::vector<Index>{5, 7, 10, 15};
      for (Architecture arch : kSweepArchs)
        for (Index d : dims) {
          RunSpec spec;
          spec.problem = "poisson_hd";
          spec.arch = arch;
          spec.dim = d;
          spec.sampling.lhs_interior = 10000;
          spec.sampling.lhs_boundary = 200 * d;
          // The reference runs hlconc at M=2500 and the tensor pairs at
          // M=10000; desk caps the tensor pairs at M=3600.
          const Index m = arch == Architecture::kHLConc ? 2500 : (desk ? 3600 : 10000);
          add_cell(spec, width_from_basis_count(arch, m), d);
        }
      break;
    }
    case 8: {
      const Index m = desk ? 2500 : 10000;
      for (Architecture arch : kSweepArchs)
        for (int btm = 0; btm <= 1; ++btm) {
          RunSpec spec;
          spec.problem = "diffusion1d";
          spec.arch = arch;
          spec.btm_blocks = btm == 1 ? 10 : 1;
          spec.sampling.grid = {101, 101};
          add_cell(spec, width_from_basis_count(arch, m), btm);
        }
      break;
    }
    default: break;
  }
  return run_cells(std::move(cells), jobs);
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

std::string csv_header(bool with_paper_column) {
  std::string h =
      "problem,arch,p,M,seed,L_inf,L_2,time_s,rank,residual,picard_iters,btm_blocks";
  if (with_paper_column) h += ",paper_Linf";
  h += ",error";
  return h;
}

std::string csv_row(const Row& row, bool with_paper_column) {
  char buf[512];
  std::string out = row.problem + ',' + arch_to_cli(row.arch) + ',';
  out += std::to_string(row.p) + ',' + std::to_string(row.m) + ',' + std::to_string(row.seed);
  if (row.ok()) {
    std::snprintf(buf, sizeof(buf), ",%.16e,%.16e,%.4f,%lld,%.16e,%lld,%lld", row.errors.l_inf,
                  row.errors.l_2, row.time_s, static_cast<long long>(row.rank), row.residual,
                  static_cast<long long>(row.picard_iters),
                  static_cast<long long>(row.btm_blocks));
    out += buf;
  } else {
    out += ",,,,,,";
    out += ',' + std::to_string(row.btm_blocks);
  }
  if (with_paper_column) {
    if (row.paper_linf) {
      std::snprintf(buf, sizeof(buf), ",%.2e", *row.paper_linf);
      out += buf;
    } else {
      out += ',';
    }
  }
  out += ',';
  std::string msg = row.error;
  for (auto& c : msg)
    if (c == ',' || c == '\n') c = ';';
  out += msg;
  return out;
}

void write_rows(const std::vector<Row>& rows, bool with_paper_column, std::ostream& out) {
  out << csv_header(with_paper_column) << '\n';
  for (const auto& row : rows) out << csv_row(row, with_paper_column) << '\n';
}

}  // namespace tpnet::bench
