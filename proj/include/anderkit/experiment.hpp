#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "anderkit/composer.hpp"

namespace anderkit {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ProblemConfig {
  std::string name = "bratu";  // bratu | convdiff | tridiag
  int side = 64;               // N, grid problems
  double lambda = 6.0;
  double epsilon = 1.0;
  double k = 3.0;
  ConvectionScheme scheme = ConvectionScheme::centered;
  int n = 100;                 // tridiag
  /// Constant initial guess; the problem's own default when absent.
  std::optional<double> x0;
};

struct ExperimentConfig {
  ProblemConfig problem;
  std::vector<std::string> solvers;
  RunConfig run;
  std::filesystem::path output = "results";
  std::uint64_t seed = 0;  // reserved, every problem is deterministic
  bool paper_style_iters = false;
  bool write_evaluations = false;
};

/// JSON document:
///   { "problem": {"name": "bratu", "N": 64, "lambda": 6},
///     "solvers": ["picard", "AA(20)"],
///     "run": {"tol": 1e-8, "max_iters": 1000, "max_fevals": 1000000,
///             "divergence_factor": 1e6, "stall_window": 1000},
///     "output": "results", "seed": 0 }
/// Throws ConfigError on schema violations, IoError if the file is unreadable.
ExperimentConfig load_experiment_config(const std::filesystem::path& path);
ExperimentConfig parse_experiment_config(std::string_view json_text);

/// "bratu" or "bratu:N=32,lambda=6"; keys are those of the JSON schema.
void apply_problem_override(ProblemConfig& problem, std::string_view text);

/// Throws ConfigError on unknown names or invalid parameters.
FixedPointProblem make_problem(const ProblemConfig& config);
Vector initial_guess(const ProblemConfig& config, const FixedPointProblem& problem);

struct SolverOutcome {
  std::string label;  // file stem
  AcceleratorSpec spec;
  ConvergenceTrace trace;
  std::int64_t memory_vectors = 0;
};

/// File-safe stem for a solver string, e.g. "AAoptD(20,AA(1))" -> "AAoptD_20_AA_1".
std::string solver_label(std::string_view solver);

/// Parses every solver, then runs them concurrently. Output order follows
/// the configuration. Throws ConfigError on bad specs or parameters.
std::vector<SolverOutcome> run_experiment(const ExperimentConfig& config);

inline constexpr std::string_view kSummaryCsvHeader =
    "label,termination,iters,fevals,final_res,wall_ns,memory_vectors";

/// Writes <label>.csv per solver and summary.csv. Throws IoError.
void write_experiment(const ExperimentConfig& config, const std::vector<SolverOutcome>& outcomes);

}  // namespace anderkit
