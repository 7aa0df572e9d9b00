#include "anderkit/experiment.hpp"

#include <fstream>
#include <sstream>

#include "doctest.h"

using namespace anderkit;

namespace {

std::filesystem::path scratch_dir(const char* name) {
  const auto dir = std::filesystem::temp_directory_path() / "anderkit_test" / name;
  std::filesystem::remove_all(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string strip_wall(const std::string& csv) {
  // Drops the last field, wall_ns in trace files.
  std::istringstream in(csv);
  std::string line, out;
  while (std::getline(in, line)) out += line.substr(0, line.rfind(',')) + "\n";
  return out;
}

}  // namespace

TEST_CASE("config parsing") {
  const ExperimentConfig c = parse_experiment_config(R"json({
    "problem": {"name": "convdiff", "N": 16, "epsilon": 0.1, "k": 2, "scheme": "upwind", "x0": 0.5},
    "solvers": ["picard", "AA(3)"],
    "run": {"tol": 1e-6, "max_iters": 50, "stall_window": 0},
    "output": "out", "seed": 4})json");
  CHECK(c.problem.name == "convdiff");
  CHECK(c.problem.side == 16);
  CHECK(c.problem.epsilon == 0.1);
  CHECK(c.problem.k == 2.0);
  CHECK(c.problem.scheme == ConvectionScheme::upwind);
  CHECK(c.problem.x0 == 0.5);
  CHECK(c.solvers.size() == 2);
  CHECK(c.run.tol == 1e-6);
  CHECK(c.run.max_outer_iters == 50);
  CHECK(c.run.stall_window == 0);
  CHECK(c.output == "out");
  CHECK(c.seed == 4);
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(parse_experiment_config("{"), ConfigError);
  CHECK_THROWS_AS(parse_experiment_config("[]"), ConfigError);
  CHECK_THROWS_AS(parse_experiment_config(R"({"problme": {}})"), ConfigError);
  CHECK_THROWS_AS(parse_experiment_config(R"({"problem": {"N": "big"}})"), ConfigError);
  CHECK_THROWS_AS(parse_experiment_config(R"({"problem": {"scheme": "spectral"}})"), ConfigError);
  CHECK_THROWS_AS(parse_experiment_config(R"({"run": {"tolerance": 1}})"), ConfigError);
  CHECK_THROWS_AS(load_experiment_config("/nonexistent/config.json"), IoError);
}

TEST_CASE("problem overrides") {
  ProblemConfig p;
  apply_problem_override(p, "tridiag:n=20");
  CHECK(p.name == "tridiag");
  CHECK(p.n == 20);
  apply_problem_override(p, "convdiff:N=8,epsilon=0.01,scheme=upwind");
  CHECK(p.side == 8);
  CHECK(p.scheme == ConvectionScheme::upwind);
  CHECK_THROWS_AS(apply_problem_override(p, "bratu:N"), ConfigError);
  CHECK_THROWS_AS(apply_problem_override(p, "bratu:M=3"), ConfigError);
  CHECK_THROWS_AS(apply_problem_override(p, "bratu:N=x"), ConfigError);
  p.name = "heat";
  CHECK_THROWS_AS(make_problem(p), ConfigError);
  p.name = "bratu";
  p.side = 0;
  CHECK_THROWS_AS(make_problem(p), ConfigError);
}

TEST_CASE("solver labels") {
  CHECK(solver_label("AAoptD(20,AA(1))") == "AAoptD_20_AA_1");
  CHECK(solver_label("picard") == "picard");
  CHECK(solver_label("ADD(AA(5),AAoptD(1),0.7,0.3)") == "ADD_AA_5_AAoptD_1_0.7_0.3");
  CHECK(solver_label("AA(5);beta=0.5") == "AA_5_beta-0.5");
}

TEST_CASE("experiment writes traces and a summary") {
  ExperimentConfig c;
  c.problem.name = "bratu";
  c.problem.side = 8;
  c.solvers = {"picard", "AA(5)", "AAoptD(5,AA(1))", "AA(5)"};
  c.output = scratch_dir("run");
  const auto outcomes = run_experiment(c);
  REQUIRE(outcomes.size() == 4);
  CHECK(outcomes[3].label == "AA_5-2");
  write_experiment(c, outcomes);

  const std::string summary = slurp(c.output / "summary.csv");
  CHECK(summary.rfind(std::string(kSummaryCsvHeader) + "\n", 0) == 0);
  CHECK(summary.find("AAoptD_5_AA_1,converged,") != std::string::npos);
  for (const auto& o : outcomes) {
    CHECK(std::filesystem::exists(c.output / (o.label + ".csv")));
    CHECK(o.memory_vectors == memory_footprint(o.spec));
  }

  // Same configuration again: identical bytes apart from wall time.
  const auto again = run_experiment(c);
  const auto first_trace = slurp(c.output / "AA_5.csv");
  write_experiment(c, again);
  CHECK(strip_wall(slurp(c.output / "AA_5.csv")) == strip_wall(first_trace));
}

TEST_CASE("experiment validation") {
  ExperimentConfig c;
  c.problem.side = 4;
  CHECK_THROWS_AS(run_experiment(c), ConfigError);  // no solvers
  c.solvers = {"AA(3"};
  CHECK_THROWS_AS(run_experiment(c), SpecParseError);
}

TEST_CASE("unwritable output is an I/O error") {
  ExperimentConfig c;
  c.problem.side = 4;
  c.solvers = {"picard"};
  const auto blocker = scratch_dir("blocked");
  std::filesystem::create_directories(blocker.parent_path());
  std::ofstream(blocker) << "file, not a directory";
  c.output = blocker / "sub";
  const auto outcomes = run_experiment(c);
  CHECK_THROWS_AS(write_experiment(c, outcomes), IoError);
}
