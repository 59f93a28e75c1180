#pragma once

#include "tpnet/solver.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace tpnet::bench {

/// CLI architecture names: tp-elm, tp-mlp, tp-resnet (tensor-product pairs)
/// and hlconc (direct basis baseline).
Architecture arch_from_cli(const std::string& name);
std::string arch_to_cli(Architecture arch);

/// Width parameter for a requested basis count M: sqrt(M) for tensor-product
/// architectures (M must be a perfect square), M itself for hlconc (even).
Index width_from_basis_count(Architecture arch, Index m);

/// One experiment: a problem crossed with width and seed lists.
struct RunSpec {
  std::string problem;
  Architecture arch = Architecture::kElm;
  std::vector<Index> p_list;  // width per run (hlconc: M)
  std::vector<std::uint64_t> seeds;
  SamplingConfig sampling;
  PicardOptions picard;
  Index btm_blocks = 1;
  LstsqOptions lstsq;
  std::optional<InitScheme> init;
  Index dim = 0;  // poisson_hd dimension override (0 keeps the default)
  int jobs = 1;
};

/// One result row of the CSV report.
struct Row {
  std::string problem;
  Architecture arch = Architecture::kElm;
  Index p = 0;
  Index m = 0;
  std::uint64_t seed = 0;
  ErrorReport errors;
  Real time_s = 0;
  Index rank = 0;
  Real residual = 0;
  Index picard_iters = 0;
  bool picard_converged = false;
  Index btm_blocks = 1;
  std::optional<Real> paper_linf;  // sweep comparisons only
  std::string error;               // empty on success
  Solution solution;               // retained for callers that post-process

  bool ok() const { return error.empty(); }
};

/// Columns, fixed and documented:
///   problem,arch,p,M,seed,L_inf,L_2,time_s,rank,residual,picard_iters,
///   btm_blocks[,paper_Linf],error
/// Metrics use 17 significant digits in scientific notation; time_s has four
/// decimal places.
std::string csv_header(bool with_paper_column);
std::string csv_row(const Row& row, bool with_paper_column);

/// Runs every (p, seed) cell, up to `jobs` concurrently, rows ordered by
/// (p, seed) regardless of completion order. Returns rows; any failed cell
/// carries its error message.
std::vector<Row> run_experiment(const RunSpec& spec);

/// Executes one cell (exposed for tests and the acceptance suite).
Row run_cell(const RunSpec& spec, Index p, std::uint64_t seed);

/// Table regeneration. Supported ids: 1, 2, 4, 5, 6, 7, 8; desk scale trims
/// basis counts and grids to workstation size, full scale replays the
/// reference settings. Throws UnknownNameError for other ids (table 3 rows
/// come from external methods).
std::vector<Row> sweep_table(int table, const std::string& scale,
                             const std::vector<std::uint64_t>& seeds, int jobs);

/// Reference L_inf for a (table, architecture) cell; key is M for tables
/// 1-6, the dimension d for table 7, and 0/1 (without/with BTM) for table 8.
std::optional<Real> paper_linf(int table, Architecture arch, Index key);

void write_rows(const std::vector<Row>& rows, bool with_paper_column, std::ostream& out);

}  // namespace tpnet::bench
