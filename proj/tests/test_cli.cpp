#include "tpnet/bench.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace tpnet;

namespace {

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(TPNET_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("bench maps CLI architecture names") {
  CHECK(bench::arch_from_cli("tp-elm") == Architecture::kElm);
  CHECK(bench::arch_from_cli("tp-resnet") == Architecture::kResNet);
  CHECK(bench::arch_to_cli(Architecture::kHLConc) == "hlconc");
  CHECK_THROWS_AS(bench::arch_from_cli("cnn"), UnknownNameError);
}

TEST_CASE("basis count maps to the width parameter") {
  CHECK(bench::width_from_basis_count(Architecture::kElm, 2500) == 50);
  CHECK(bench::width_from_basis_count(Architecture::kHLConc, 400) == 400);
  CHECK_THROWS_AS(bench::width_from_basis_count(Architecture::kElm, 2000), InvalidSpecError);
  CHECK_THROWS_AS(bench::width_from_basis_count(Architecture::kHLConc, 401), InvalidSpecError);
}

TEST_CASE("run_experiment emits one row per (p, seed) in order") {
  bench::RunSpec spec;
  spec.problem = "func2d";
  spec.arch = Architecture::kElm;
  spec.p_list = {3, 5};
  spec.seeds = {0, 1, 2};
  spec.sampling.grid = {11, 11};
  const auto rows = bench::run_experiment(spec);
  REQUIRE(rows.size() == 6);
  Index i = 0;
  for (Index p : {3, 5})
    for (std::uint64_t seed : {0, 1, 2}) {
      CHECK(rows[static_cast<std::size_t>(i)].p == p);
      CHECK(rows[static_cast<std::size_t>(i)].seed == seed);
      CHECK(rows[static_cast<std::size_t>(i)].ok());
      CHECK(rows[static_cast<std::size_t>(i)].m == p * p);
      ++i;
    }
}

TEST_CASE("concurrent cells produce the same rows as sequential ones") {
  bench::RunSpec spec;
  spec.problem = "helmholtz2d";
  spec.arch = Architecture::kElm;
  spec.p_list = {4};
  spec.seeds = {0, 1, 2, 3};
  spec.sampling.grid = {15, 15};
  const auto seq = bench::run_experiment(spec);
  spec.jobs = 4;
  const auto par = bench::run_experiment(spec);
  REQUIRE(seq.size() == par.size());
  for (std::size_t i = 0; i < seq.size(); ++i) {
    CHECK(seq[i].errors.l_inf == par[i].errors.l_inf);
    CHECK(seq[i].errors.l_2 == par[i].errors.l_2);
    CHECK(seq[i].residual == par[i].residual);
  }
}

TEST_CASE("csv schema is stable and fully populated") {
  bench::RunSpec spec;
  spec.problem = "func2d";
  spec.arch = Architecture::kMlp;
  spec.p_list = {4};
  spec.seeds = {7};
  spec.sampling.grid = {11, 11};
  const auto rows = bench::run_experiment(spec);
  REQUIRE(rows.size() == 1);

  CHECK(bench::csv_header(false) ==
        "problem,arch,p,M,seed,L_inf,L_2,time_s,rank,residual,picard_iters,btm_blocks,error");
  const std::string line = bench::csv_row(rows[0], false);
  CHECK(line.find("func2d,tp-mlp,4,16,7,") == 0);
  // 17 significant digits in scientific notation for the metrics.
  CHECK(line.find("e-") != std::string::npos);
  std::stringstream ss(line);
  std::string field;
  int fields = 0;
  while (std::getline(ss, field, ',')) ++fields;
  CHECK(fields >= 12);
}

TEST_CASE("failed cells carry an error and others still run") {
  bench::RunSpec spec;
  spec.problem = "func2d";
  spec.arch = Architecture::kElm;
  spec.p_list = {3};
  spec.seeds = {0};
  spec.sampling.grid = {11, 11};
  spec.lstsq.ridge = -5;  // invalid, the solve throws
  const auto rows = bench::run_experiment(spec);
  REQUIRE(rows.size() == 1);
  CHECK(!rows[0].ok());
  CHECK(bench::csv_row(rows[0], false).find("ridge") != std::string::npos);
}

TEST_CASE("sweep enumerates the documented desk cells") {
  CHECK_THROWS_AS(bench::sweep_table(3, "desk", {0}, 1), UnknownNameError);
  CHECK_THROWS_AS(bench::sweep_table(9, "desk", {0}, 1), UnknownNameError);
  CHECK_THROWS_AS(bench::sweep_table(1, "huge", {0}, 1), UnknownNameError);
  CHECK(bench::paper_linf(1, Architecture::kResNet, 3600).value() ==
        doctest::Approx(8.55e-11));
  CHECK(bench::paper_linf(8, Architecture::kResNet, 1).value() == doctest::Approx(1.92e-8));
  CHECK(!bench::paper_linf(1, Architecture::kResNet, 123).has_value());
}

TEST_CASE("cli rejects bad usage with nonzero status") {
  CHECK(run_cli("solve --problem nope --p 3") == 2);             // unknown problem
  CHECK(run_cli("solve --problem func2d --arch cnn --p 3") == 2);  // unknown arch
  CHECK(run_cli("solve --problem func2d --p 3 --seeds \"\"") != 0);  // empty seed list
  CHECK(run_cli("sweep --table 3") == 2);                        // unsupported table
  CHECK(run_cli("solve --p 3") == 2);                            // missing problem
}

TEST_CASE("cli solve writes the csv report") {
  const auto out = std::filesystem::temp_directory_path() / "tpnet_cli_test.csv";
  const std::string args = "solve --problem func2d --arch tp-elm --p 4 --seeds 0,1 --grid 11 --out " +
                           out.string();
  REQUIRE(run_cli(args) == 0);
  const std::string text = slurp(out);
  std::filesystem::remove(out);
  CHECK(text.find("problem,arch,p,M,seed,") == 0);
  CHECK(text.find("func2d,tp-elm,4,16,0,") != std::string::npos);
  CHECK(text.find("func2d,tp-elm,4,16,1,") != std::string::npos);
}

TEST_CASE("TPNET_SEED environment variable selects the seed") {
  const auto out = std::filesystem::temp_directory_path() / "tpnet_cli_env.csv";
  const std::string cmd = "TPNET_SEED=9 " + std::string(TPNET_CLI_PATH) +
                          " solve --problem func2d --p 3 --grid 9 --out " + out.string() +
                          " >/dev/null 2>&1";
  REQUIRE(WEXITSTATUS(std::system(cmd.c_str())) == 0);
  const std::string text = slurp(out);
  std::filesystem::remove(out);
  CHECK(text.find("func2d,tp-elm,3,9,9,") != std::string::npos);
}

TEST_CASE("config file supplies defaults and flags win") {
  const auto dir = std::filesystem::temp_directory_path();
  const auto cfg = dir / "tpnet_cli_cfg.ini";
  const auto out = dir / "tpnet_cli_cfg.csv";
  {
    std::ofstream f(cfg);
    f << "[solve]\nproblem=func2d\np=3\ngrid=9\nseed=5\n";
  }
  REQUIRE(run_cli("solve --config " + cfg.string() + " --out " + out.string()) == 0);
  CHECK(slurp(out).find("func2d,tp-elm,3,9,5,") != std::string::npos);

  // A command-line seed overrides the config file.
  REQUIRE(run_cli("solve --config " + cfg.string() + " --seed 8 --out " + out.string()) == 0);
  CHECK(slurp(out).find("func2d,tp-elm,3,9,8,") != std::string::npos);
  std::filesystem::remove(cfg);
  std::filesystem::remove(out);
}
