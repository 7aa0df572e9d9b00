// anderkit: run accelerator comparisons from a config file.
//
//   anderkit run --config cfg.json [--problem bratu:N=32] [--solver AA(20)]...
//   anderkit list-solvers
//   anderkit check
//
// Exit codes: 0 ok, 1 usage or configuration error, 2 I/O error,
// 3 one or more checks failed.

#include <cstdio>
#include <iostream>

#include "CLI11.hpp"
#include "anderkit/checks.hpp"
#include "anderkit/experiment.hpp"

namespace {

constexpr int kUsageError = 1;
constexpr int kIoError = 2;
constexpr int kCheckFailed = 3;

struct RunFlags {
  std::string config;
  std::string problem;
  std::vector<std::string> solvers;
  std::optional<double> tol;
  std::optional<std::int64_t> max_iters;
  std::string out;
  bool paper_style_iters = false;
};

int do_run(const RunFlags& flags) {
  using namespace anderkit;
  ExperimentConfig config = load_experiment_config(flags.config);
  if (!flags.problem.empty()) apply_problem_override(config.problem, flags.problem);
  if (!flags.solvers.empty()) config.solvers = flags.solvers;
  if (flags.tol) config.run.tol = *flags.tol;
  if (flags.max_iters) config.run.max_outer_iters = *flags.max_iters;
  if (!flags.out.empty()) config.output = flags.out;
  if (flags.paper_style_iters) config.paper_style_iters = true;

  const std::vector<SolverOutcome> outcomes = run_experiment(config);
  write_experiment(config, outcomes);
  for (const SolverOutcome& o : outcomes) {
    std::printf("%-28s %-10s iters=%-7lld fevals=%-8lld res=%.3e\n", render_spec(o.spec).c_str(),
                std::string(to_string(o.trace.termination)).c_str(),
                static_cast<long long>(o.trace.iterations()),
                static_cast<long long>(feval_count(o.trace)), o.trace.final_residual());
  }
  std::printf("wrote %s\n", (config.output / "summary.csv").string().c_str());
  return 0;
}

void list_solvers() {
  std::cout <<
      R"(SPEC := picard
      | AA(m[,SPEC])         Anderson, window m; with SPEC: multiplicative, SPEC inner
      | AAoptD(m[,SPEC])     Anderson with optimized damping (2 extra evaluations per step)
      | ADD(SPEC,SPEC[,w,w]) additive composition, weights default 0.5,0.5
options follow the closing parenthesis of the term they modify:
  ;beta=F                  constant damping, AA only
  ;eta=F;guard=floor|reflect   damping safeguard, AAoptD only (default guard=off, eta=0.1)
  ;iterN=I                 inner steps per outer step, multiplicative only (default 1)
examples:
  picard
  AA(20)
  AAoptD(20)
  AA(5);beta=0.5
  ADD(AA(20),AA(1))
  ADD(AA(5),AAoptD(1),0.7,0.3)
  AA(20,AA(1))
  AAoptD(5,AA(1))
  AA(1,AAoptD(1))
  AA(20,AA(1));iterN=2
  AAoptD(5);eta=0.2;guard=floor
problems: bratu (N, lambda), convdiff (N, epsilon, k, scheme=centered|upwind), tridiag (n)
)";
}

int do_check() {
  bool all = true;
  for (const anderkit::CheckResult& r : anderkit::run_checks()) {
    std::cout << anderkit::format_check(r) << '\n';
    all = all && r.passed;
  }
  return all ? 0 : kCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Anderson acceleration experiments"};
  app.require_subcommand(1);

  RunFlags flags;
  CLI::App* run = app.add_subcommand("run", "Run the solvers of a config and write CSV traces");
  run->add_option("--config", flags.config, "JSON config file")->required();
  run->add_option("--problem", flags.problem, "Problem override, e.g. bratu:N=32,lambda=6");
  run->add_option("--solver", flags.solvers, "Solver spec; repeat to run several")
      ->allow_extra_args(false);
  run->add_option("--tol", flags.tol, "Residual tolerance");
  run->add_option("--max-iters", flags.max_iters, "Outer iteration limit");
  run->add_option("--out", flags.out, "Output directory");
  run->add_flag("--paper-style-iters", flags.paper_style_iters,
                "Add a paper_iter column counting composite steps twice");

  CLI::App* list = app.add_subcommand("list-solvers", "Describe the solver grammar");
  CLI::App* check = app.add_subcommand("check", "Run the invariant and reproduction checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }

  try {
    if (*run) return do_run(flags);
    if (*list) {
      list_solvers();
      return 0;
    }
    if (*check) return do_check();
  } catch (const anderkit::IoError& e) {
    std::cerr << "anderkit: " << e.what() << '\n';
    return kIoError;
  } catch (const anderkit::SpecParseError& e) {
    std::cerr << "anderkit: " << e.what() << '\n';
    return kUsageError;
  } catch (const anderkit::ConfigError& e) {
    std::cerr << "anderkit: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "anderkit: " << e.what() << '\n';
    return kUsageError;
  }
  return kUsageError;
}
