#include "anderkit/experiment.hpp"

#include <charconv>
#include <fstream>
#include <future>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"

namespace anderkit {

namespace {

using nlohmann::json;

ConvectionScheme scheme_from(std::string_view text) {
  if (text == "centered") return ConvectionScheme::centered;
  if (text == "upwind") return ConvectionScheme::upwind;
  throw ConfigError("scheme must be 'centered' or 'upwind', got '" + std::string(text) + "'");
}

template <typename T>
T get_as(const json& j, std::string_view key) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config key '" + std::string(key) + "' has the wrong type");
  }
}

void read_problem(const json& j, ProblemConfig& p) {
  if (!j.is_object()) throw ConfigError("'problem' must be an object");
  for (const auto& [key, value] : j.items()) {
    if (key == "name") {
      p.name = get_as<std::string>(value, key);
    } else if (key == "N") {
      p.side = get_as<int>(value, key);
    } else if (key == "lambda") {
      p.lambda = get_as<double>(value, key);
    } else if (key == "epsilon") {
      p.epsilon = get_as<double>(value, key);
    } else if (key == "k") {
      p.k = get_as<double>(value, key);
    } else if (key == "scheme") {
      p.scheme = scheme_from(get_as<std::string>(value, key));
    } else if (key == "n") {
      p.n = get_as<int>(value, key);
    } else if (key == "x0") {
      p.x0 = get_as<double>(value, key);
    } else {
      throw ConfigError("unknown problem key '" + key + "'");
    }
  }
}

void read_run(const json& j, RunConfig& r) {
  if (!j.is_object()) throw ConfigError("'run' must be an object");
  for (const auto& [key, value] : j.items()) {
    if (key == "tol") {
      r.tol = get_as<double>(value, key);
    } else if (key == "max_iters") {
      r.max_outer_iters = get_as<std::int64_t>(value, key);
    } else if (key == "max_fevals") {
      r.max_fevals = get_as<std::int64_t>(value, key);
    } else if (key == "divergence_factor") {
      r.divergence_factor = get_as<double>(value, key);
    } else if (key == "stall_window") {
      r.stall_window = get_as<std::int64_t>(value, key);
    } else {
      throw ConfigError("unknown run key '" + key + "'");
    }
  }
}

double parse_double_value(std::string_view key, std::string_view text) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ConfigError("bad value for '" + std::string(key) + "': '" + std::string(text) + "'");
  }
  return v;
}

int parse_int_value(std::string_view key, std::string_view text) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ConfigError("bad value for '" + std::string(key) + "': '" + std::string(text) + "'");
  }
  return v;
}

}  // namespace

ExperimentConfig parse_experiment_config(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");

  ExperimentConfig config;
  for (const auto& [key, value] : doc.items()) {
    if (key == "problem") {
      read_problem(value, config.problem);
    } else if (key == "solvers") {
      config.solvers = get_as<std::vector<std::string>>(value, key);
    } else if (key == "run") {
      read_run(value, config.run);
    } else if (key == "output") {
      config.output = get_as<std::string>(value, key);
    } else if (key == "seed") {
      config.seed = get_as<std::uint64_t>(value, key);
    } else if (key == "paper_style_iters") {
      config.paper_style_iters = get_as<bool>(value, key);
    } else if (key == "write_evaluations") {
      config.write_evaluations = get_as<bool>(value, key);
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
  return config;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_experiment_config(text.str());
}

void apply_problem_override(ProblemConfig& problem, std::string_view text) {
  const auto colon = text.find(':');
  problem.name = std::string(text.substr(0, colon));
  if (colon == std::string_view::npos) return;
  std::string_view rest = text.substr(colon + 1);
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const std::string_view item = rest.substr(0, comma);
    rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("problem parameter '" + std::string(item) + "' is not key=value");
    }
    const std::string_view key = item.substr(0, eq);
    const std::string_view value = item.substr(eq + 1);
    if (key == "N") {
      problem.side = parse_int_value(key, value);
    } else if (key == "lambda") {
      problem.lambda = parse_double_value(key, value);
    } else if (key == "epsilon") {
      problem.epsilon = parse_double_value(key, value);
    } else if (key == "k") {
      problem.k = parse_double_value(key, value);
    } else if (key == "scheme") {
      problem.scheme = scheme_from(value);
    } else if (key == "n") {
      problem.n = parse_int_value(key, value);
    } else if (key == "x0") {
      problem.x0 = parse_double_value(key, value);
    } else {
      throw ConfigError("unknown problem parameter '" + std::string(key) + "'");
    }
  }
}

FixedPointProblem make_problem(const ProblemConfig& config) {
  try {
    if (config.name == "bratu") return bratu_problem(config.side, config.lambda);
    if (config.name == "convdiff") {
      return convdiff_problem(config.side, config.epsilon, config.k, config.scheme);
    }
    if (config.name == "tridiag") return tridiag_problem(config.n);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  throw ConfigError("unknown problem '" + config.name + "' (expected bratu, convdiff or tridiag)");
}

Vector initial_guess(const ProblemConfig& config, const FixedPointProblem& problem) {
  if (config.x0) return Vector::Constant(problem.n, *config.x0);
  return problem.default_start;
}

std::string solver_label(std::string_view solver) {
  std::string out;
  for (char c : solver) {
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-') {
      out += c;
    } else if (c == '=') {
      out += '-';
    } else if (c == ')' || c == ' ') {
      continue;
    } else {
      out += '_';
    }
  }
  while (!out.empty() && out.back() == '_') out.pop_back();
  return out.empty() ? "solver" : out;
}

std::vector<SolverOutcome> run_experiment(const ExperimentConfig& config) {
  config.run.validate();
  if (config.solvers.empty()) throw ConfigError("no solvers configured");
  const FixedPointProblem problem = make_problem(config.problem);
  const Vector x0 = initial_guess(config.problem, problem);

  std::vector<SolverOutcome> outcomes;
  std::map<std::string, int> seen;
  for (const std::string& text : config.solvers) {
    SolverOutcome o{solver_label(text), parse_spec(text), {}, 0};
    if (int n = ++seen[o.label]; n > 1) o.label += "-" + std::to_string(n);
    outcomes.push_back(std::move(o));
  }

  std::vector<std::future<std::pair<ConvergenceTrace, std::int64_t>>> jobs;
  for (const SolverOutcome& o : outcomes) {
    jobs.push_back(std::async(std::launch::async, [&problem, &x0, &config, spec = o.spec] {
      MemoryProbe probe;
      RunOptions options;
      options.hooks.memory = &probe;
      ConvergenceTrace trace = run(spec, problem, x0, config.run, options);
      return std::make_pair(std::move(trace), probe.peak());
    }));
  }
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    auto [trace, peak] = jobs[i].get();
    outcomes[i].trace = std::move(trace);
    outcomes[i].memory_vectors = peak;
  }
  return outcomes;
}

void write_experiment(const ExperimentConfig& config, const std::vector<SolverOutcome>& outcomes) {
  std::error_code ec;
  std::filesystem::create_directories(config.output, ec);
  if (ec) {
    throw IoError("cannot create output directory '" + config.output.string() +
                  "': " + ec.message());
  }
  const auto open = [](const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    return out;
  };
  const auto close = [](std::ofstream& out, const std::filesystem::path& path) {
    out.close();
    if (!out) throw IoError("failed writing '" + path.string() + "'");
  };

  for (const SolverOutcome& o : outcomes) {
    const auto path = config.output / (o.label + ".csv");
    std::ofstream out = open(path);
    std::optional<int> scale;
    if (config.paper_style_iters) scale = is_composite(o.spec) ? 2 : 1;
    write_trace_csv(out, o.trace, scale);
    close(out, path);

    if (config.write_evaluations) {
      const auto eval_path = config.output / (o.label + ".evals.csv");
      std::ofstream evals = open(eval_path);
      evals << "feval,iter,res_norm\n";
      for (const EvaluationRow& e : o.trace.evaluations) {
        evals << e.feval << ',' << e.k << ',' << format_double(e.res_norm) << '\n';
      }
      close(evals, eval_path);
    }
  }

  const auto summary_path = config.output / "summary.csv";
  std::ofstream summary = open(summary_path);
  summary << kSummaryCsvHeader << '\n';
  for (const SolverOutcome& o : outcomes) {
    summary << o.label << ',' << to_string(o.trace.termination) << ',' << o.trace.iterations()
            << ',' << feval_count(o.trace) << ',' << format_double(o.trace.final_residual()) << ','
            << o.trace.wall_ns() << ',' << o.memory_vectors << '\n';
  }
  close(summary, summary_path);
}

}  // namespace anderkit
