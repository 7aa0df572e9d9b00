#include "anderkit/checks.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <future>
#include <mutex>
#include <random>
#include <sstream>

#include "anderkit/composer.hpp"

namespace anderkit {

namespace {

/// Step invariants and timing observations shared across checks.
struct Observations {
  std::mutex mutex;
  std::int64_t mixing_steps = 0;
  std::int64_t theta_violations = 0;
  std::int64_t alpha_violations = 0;
  double worst_theta = 0.0;
  double worst_alpha_error = 0.0;
  int runs = 0;
  int runs_with_timing = 0;

  void mixing(const StepDiagnostics& d) {
    double sum = 0.0;
    for (double a : d.alpha) sum += a;
    std::lock_guard lock(mutex);
    ++mixing_steps;
    worst_theta = std::max(worst_theta, d.theta);
    worst_alpha_error = std::max(worst_alpha_error, std::abs(sum - 1.0));
    if (d.theta > 1.0 + 1e-12) ++theta_violations;
    if (std::abs(sum - 1.0) > 1e-10) ++alpha_violations;
  }

  void finished(const ConvergenceTrace& trace) {
    bool monotone = !trace.rows.empty() && trace.rows.back().wall_ns > 0;
    for (std::size_t i = 1; i < trace.rows.size(); ++i) {
      monotone = monotone && trace.rows[i].wall_ns >= trace.rows[i - 1].wall_ns;
    }
    std::lock_guard lock(mutex);
    ++runs;
    if (monotone) ++runs_with_timing;
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

ConvergenceTrace observed_run(Observations& obs, const std::string& solver,
                              const FixedPointProblem& problem, const Vector& x0,
                              const RunConfig& config,
                              std::function<void(std::int64_t, const Vector&)> on_iterate = {}) {
  RunOptions options;
  options.on_iterate = std::move(on_iterate);
  options.hooks.on_mixing = [&obs](const StepDiagnostics& d) { obs.mixing(d); };
  ConvergenceTrace trace = run(parse_spec(solver), problem, x0, config, options);
  obs.finished(trace);
  return trace;
}

struct Outcome {
  std::string solver;
  ConvergenceTrace trace;
};

/// Runs the solvers concurrently; results keep the input order.
std::vector<Outcome> observed_runs(Observations& obs, const std::vector<std::string>& solvers,
                                   const FixedPointProblem& problem, const Vector& x0,
                                   const RunConfig& config) {
  std::vector<std::future<ConvergenceTrace>> jobs;
  for (const std::string& s : solvers) {
    jobs.push_back(std::async(std::launch::async, [&obs, s, &problem, &x0, &config] {
      return observed_run(obs, s, problem, x0, config);
    }));
  }
  std::vector<Outcome> out;
  for (std::size_t i = 0; i < solvers.size(); ++i) out.push_back({solvers[i], jobs[i].get()});
  return out;
}

std::string brief(const Outcome& o) {
  std::ostringstream s;
  s << o.solver << "=" << to_string(o.trace.termination) << "@" << o.trace.iterations();
  return s.str();
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

CheckResult gmres_equivalence(Observations& obs) {
  CheckResult r{1, "AA/GMRES equivalence", false, {}, 0.0};
  const int n = 100;
  const int steps = 20;
  const FixedPointProblem problem = tridiag_problem(n);

  std::vector<Vector> aa_iterates;
  RunConfig config;
  config.max_outer_iters = steps + 1;
  observed_run(obs, "AA(100)", problem, Vector::Zero(n), config,
               [&aa_iterates](std::int64_t, const Vector& x) { aa_iterates.push_back(x); });

  // D^{-1} A = A / 2 for the tridiagonal matrix, rhs D^{-1} b = 1 / 2.
  Matrix half_a = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    half_a(i, i) = 1.0;
    if (i > 0) half_a(i, i - 1) = -0.5;
    if (i + 1 < n) half_a(i, i + 1) = -0.5;
  }
  const GmresHistory gmres = gmres_reference([&half_a](const Vector& v) -> Vector { return half_a * v; },
                                             Vector::Constant(n, 0.5), Vector::Zero(n), steps);

  if (aa_iterates.size() < static_cast<std::size_t>(steps + 1) ||
      gmres.iterates.size() < static_cast<std::size_t>(steps)) {
    r.detail = "not enough iterates recorded";
    return r;
  }
  double worst = 0.0;
  for (int k = 0; k < steps; ++k) {
    const Vector target = problem.g(gmres.iterates[k]);
    worst = std::max(worst, norm2(aa_iterates[k + 1] - target) / norm2(target));
  }
  r.passed = worst <= 1e-8;
  r.detail = "max relative difference over 20 steps " + sci(worst);
  return r;
}

CheckResult linear_problem(Observations& obs) {
  CheckResult r{2, "linear problem: Picard stalls, AA(m>=50) converges", false, {}, 0.0};
  const FixedPointProblem problem = tridiag_problem(100);
  const Vector x0 = Vector::Zero(100);

  RunConfig picard_config;
  picard_config.max_outer_iters = 50;
  const ConvergenceTrace picard = observed_run(obs, "picard", problem, x0, picard_config);
  int decreases = 0;
  for (std::size_t i = 1; i < picard.rows.size(); ++i) {
    if (picard.rows[i].res_norm < picard.rows[i - 1].res_norm) ++decreases;
  }
  const bool picard_ok = decreases == 0 && picard.rows.size() == 51;

  RunConfig aa_config;
  aa_config.max_outer_iters = 120;
  bool aa_ok = true;
  std::string aa_detail;
  for (const Outcome& o : observed_runs(obs, {"AA(50)", "AA(100)"}, problem, x0, aa_config)) {
    aa_ok = aa_ok && o.trace.termination == Termination::converged && o.trace.iterations() <= 120;
    aa_detail += " " + brief(o);
  }

  r.passed = picard_ok && aa_ok;
  r.detail = "picard residual decreased on " + std::to_string(decreases) + "/50 steps (" +
             sci(picard.rows.front().res_norm) + " -> " + sci(picard.rows.back().res_norm) +
             ");" + aa_detail;
  return r;
}

CheckResult bratu_ordering(Observations& obs) {
  CheckResult r{3, "Bratu: Picard converges, iteration ordering", true, {}, 0.0};
  const std::vector<std::string> solvers = {"AAoptD(20,AA(1))", "AA(20,AA(1))", "AA(20)", "picard"};
  RunConfig config;
  config.max_outer_iters = 100000;
  std::ostringstream detail;
  for (int side : {32, 64}) {
    const FixedPointProblem problem = bratu_problem(side, 6.0);
    const auto out = observed_runs(obs, solvers, problem, problem.default_start, config);
    bool all_converged = true;
    for (const Outcome& o : out) all_converged = all_converged && o.trace.termination == Termination::converged;
    bool ordered = true;
    for (std::size_t i = 1; i < out.size(); ++i) {
      ordered = ordered && out[i - 1].trace.iterations() <= out[i].trace.iterations();
    }
    double slowest = 0.0;
    for (const Outcome& o : out) slowest = std::max(slowest, o.trace.wall_ns() * 1e-9);
    r.passed = r.passed && all_converged && ordered && (side != 64 || slowest < 60.0);
    detail << "N=" << side << ":";
    for (const Outcome& o : out) {
      detail << " " << o.solver << " " << o.trace.iterations() << "it/" << feval_count(o.trace)
             << "fe";
    }
    detail << (ordered ? "" : " ORDER VIOLATED") << (all_converged ? "" : " NOT CONVERGED")
           << "; ";
  }
  r.detail = detail.str();
  return r;
}

CheckResult convdiff_regimes(Observations& obs) {
  CheckResult r{4, "convection-diffusion regimes", true, {}, 0.0};
  RunConfig config;
  config.max_outer_iters = 20000;
  std::ostringstream detail;
  const auto regime = [&](const char* tag, double eps, ConvectionScheme scheme,
                          const std::vector<std::string>& solvers,
                          const std::vector<Termination>& expected) {
    const FixedPointProblem problem = convdiff_problem(32, eps, 3.0, scheme);
    const auto out = observed_runs(obs, solvers, problem, problem.default_start, config);
    bool ok = true;
    for (std::size_t i = 0; i < out.size(); ++i) {
      ok = ok && out[i].trace.termination == expected[i] && out[i].trace.wall_ns() < 30e9;
    }
    r.passed = r.passed && ok;
    detail << tag << (ok ? " ok" : " FAILED") << ":";
    for (const Outcome& o : out) detail << " " << brief(o);
    detail << "; ";
  };

  const std::vector<std::string> table = {
      "picard",         "AA(5)",          "AAoptD(5)",        "ADD(AA(5),AA(1))",
      "ADD(AAoptD(5),AA(1))", "ADD(AA(5),AAoptD(1))", "AA(5,AA(1))", "AAoptD(5,AA(1))",
      "AA(5,AAoptD(1))", "AAoptD(5,AAoptD(1))"};
  regime("(a) eps=1", 1.0, ConvectionScheme::centered, table,
         std::vector<Termination>(table.size(), Termination::converged));
  regime("(b) eps=0.1", 0.1, ConvectionScheme::centered, {"picard", "AA(1)"},
         {Termination::diverged, Termination::converged});
  regime("(c) eps=0.01 upwind", 0.01, ConvectionScheme::upwind,
         {"AA(1)", "AA(1,AA(1))", "AAoptD(1,AA(1))"},
         std::vector<Termination>(3, Termination::converged));
  r.detail = detail.str();
  return r;
}

CheckResult contraction_bounds(Observations& obs) {
  CheckResult r{5, "contraction bounds on affine maps", false, {}, 0.0};
  std::mt19937_64 rng(20240501);
  std::uniform_real_distribution<double> kappa_dist(0.2, 0.95);
  RunConfig config;
  config.tol = 1e-12;
  config.max_outer_iters = 200;
  int checked = 0;
  int violations = 0;
  int skipped = 0;
  double worst = -1.0;
  for (int instance = 0; instance < 20; ++instance) {
    Matrix c;
    const FixedPointProblem problem = random_affine_contraction(10, kappa_dist(rng), rng(), &c);
    const double kappa = spectral_norm(c);
    for (const char* solver : {"AAoptD(2)", "AA(2,AA(1))"}) {
      const ConvergenceTrace trace =
          observed_run(obs, solver, problem, Vector::Zero(problem.n), config);
      const AuditReport audit = contraction_audit(trace, kappa, 1e-8);
      if (audit.skipped) ++skipped;
      checked += audit.steps_checked;
      violations += audit.violations;
      worst = std::max(worst, audit.worst_excess);
    }
  }
  r.passed = violations == 0 && skipped == 0 && checked > 0;
  r.detail = std::to_string(checked) + " steps audited, " + std::to_string(violations) +
             " violations, worst excess " + sci(worst);
  return r;
}

CheckResult step_invariants(Observations& obs) {
  CheckResult r{6, "theta <= 1 and sum(alpha) = 1 on every step", false, {}, 0.0};
  std::lock_guard lock(obs.mutex);
  r.passed = obs.mixing_steps > 0 && obs.theta_violations == 0 && obs.alpha_violations == 0;
  r.detail = std::to_string(obs.mixing_steps) + " mixing steps, theta violations " +
             std::to_string(obs.theta_violations) + " (max theta " + sci(obs.worst_theta) +
             "), alpha-sum violations " + std::to_string(obs.alpha_violations) + " (max error " +
             sci(obs.worst_alpha_error) + ")";
  return r;
}

CheckResult beta_oracle() {
  CheckResult r{7, "optimized beta vs grid search", false, {}, 0.0};
  std::mt19937_64 rng(7);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> kappa_dist(0.1, 0.99);
  std::uniform_int_distribution<int> size_dist(8, 20);
  std::uniform_int_distribution<int> depth_dist(1, 5);
  int compared = 0;
  int mismatches = 0;
  double worst = 0.0;
  for (int instance = 0; instance < 100; ++instance) {
    const int n = size_dist(rng);
    const int m = depth_dist(rng);
    const FixedPointProblem problem = random_affine_contraction(n, kappa_dist(rng), rng());
    HistoryWindow window(m + 1, n);
    for (int i = 0; i <= m; ++i) {
      Vector x(n);
      for (int j = 0; j < n; ++j) x[j] = normal(rng);
      window.push(x, problem.g(x));
    }
    const MixingResult mix = solve_mixing_coefficients(window, m);
    const Vector r_p = mix.x_avg - problem.g(mix.x_avg);
    const Vector r_q = mix.gx_avg - problem.g(mix.gx_avg);
    const Vector d = r_p - r_q;
    const double signed_minimizer = dot(d, r_p) / dot(d, d);
    if (!(signed_minimizer > 0.0 && signed_minimizer < 1.0)) continue;

    const double beta = optimized_beta(r_p, r_q);
    const Vector step = mix.gx_avg - mix.x_avg;
    double best_beta = 0.0;
    double best_norm = INFINITY;
    for (int j = 1; j <= 10000; ++j) {
      const double b = j * 1e-4;
      const Vector x = mix.x_avg + b * step;
      const double res = norm2(problem.g(x) - x);
      if (res < best_norm) {
        best_norm = res;
        best_beta = b;
      }
    }
    ++compared;
    worst = std::max(worst, std::abs(beta - best_beta));
    if (std::abs(beta - best_beta) > 1e-3) ++mismatches;
  }
  r.passed = compared > 0 && mismatches == 0;
  r.detail = std::to_string(compared) + "/100 instances with interior minimizer, " +
             std::to_string(mismatches) + " mismatches, max |beta - grid| " + sci(worst);
  return r;
}

CheckResult memory_accounting() {
  CheckResult r{8, "history vector accounting", true, {}, 0.0};
  const FixedPointProblem problem = bratu_problem(16, 6.0);
  RunConfig config;
  config.max_outer_iters = 40;
  std::ostringstream detail;
  const std::vector<std::pair<std::string, std::int64_t>> cases = {
      {"AA(20)", 21}, {"ADD(AA(20),AA(1))", 21}, {"AA(20,AA(1))", 23}};
  for (const auto& [solver, expected] : cases) {
    const AcceleratorSpec spec = parse_spec(solver);
    MemoryProbe probe;
    RunOptions options;
    options.hooks.memory = &probe;
    run(spec, problem, problem.default_start, config, options);
    const bool ok = probe.peak() == expected && memory_footprint(spec) == expected &&
                    probe.current() == 0;
    r.passed = r.passed && ok;
    detail << solver << " peak " << probe.peak() << " (expected " << expected << ")"
           << (ok ? "" : " MISMATCH") << "; ";
  }
  r.detail = detail.str();
  return r;
}

CheckResult feval_accounting() {
  CheckResult r{9, "function evaluation accounting", true, {}, 0.0};
  const FixedPointProblem base = bratu_problem(16, 6.0);
  RunConfig config;
  config.tol = 1e-300;
  config.max_outer_iters = 10;
  std::ostringstream detail;
  const std::vector<std::pair<std::string, std::int64_t>> cases = {
      {"picard", 1}, {"AA(20)", 1}, {"AAoptD(20)", 3}, {"AA(20,AA(1))", 2}};
  for (const auto& [solver, per_step] : cases) {
    std::int64_t calls = 0;
    FixedPointProblem counted = base;
    counted.g = [&calls, g = base.g](const Vector& x) {
      ++calls;
      return g(x);
    };
    const ConvergenceTrace trace = run(parse_spec(solver), counted, base.default_start, config);
    bool ok = trace.rows.size() == 11 && trace.rows.front().fevals == 1;
    for (std::size_t i = 1; i < trace.rows.size(); ++i) {
      ok = ok && trace.rows[i].fevals - trace.rows[i - 1].fevals == per_step;
    }
    ok = ok && calls == feval_count(trace) && calls == 10 * per_step + 1;
    r.passed = r.passed && ok;
    detail << solver << " " << calls << " evals/10 steps" << (ok ? "" : " MISMATCH") << "; ";
  }
  r.detail = detail.str();
  return r;
}

CheckResult timing_recorded(Observations& obs) {
  CheckResult r{10, "wall time recorded, not ranked", false, {}, 0.0};
  std::lock_guard lock(obs.mutex);
  r.passed = obs.runs > 0 && obs.runs_with_timing == obs.runs;
  r.detail = std::to_string(obs.runs_with_timing) + "/" + std::to_string(obs.runs) +
             " runs carry monotone wall_ns; absolute times and per-iteration residual values "
             "are not compared";
  return r;
}

template <typename F>
CheckResult timed(F&& f, double limit_seconds = 0.0) {
  const auto start = Clock::now();
  CheckResult r = f();
  r.seconds = seconds_since(start);
  if (limit_seconds > 0.0 && r.seconds >= limit_seconds) {
    r.passed = false;
    r.detail += " [exceeded " + sci(limit_seconds) + " s]";
  }
  return r;
}

}  // namespace

std::vector<CheckResult> run_checks() {
  Observations obs;
  std::vector<CheckResult> out;
  out.push_back(timed([&] { return gmres_equivalence(obs); }, 1.0));
  out.push_back(timed([&] { return linear_problem(obs); }));
  out.push_back(timed([&] { return bratu_ordering(obs); }));
  out.push_back(timed([&] { return convdiff_regimes(obs); }));
  out.push_back(timed([&] { return contraction_bounds(obs); }, 5.0));
  out.push_back(timed([&] { return step_invariants(obs); }));
  out.push_back(timed([] { return beta_oracle(); }, 5.0));
  out.push_back(timed([] { return memory_accounting(); }));
  out.push_back(timed([] { return feval_accounting(); }));
  out.push_back(timed([&] { return timing_recorded(obs); }));
  return out;
}

std::string format_check(const CheckResult& result) {
  char head[96];
  std::snprintf(head, sizeof head, "%s %2d  ", result.passed ? "PASS" : "FAIL", result.id);
  char tail[48];
  std::snprintf(tail, sizeof tail, "  (%.3f s)  ", result.seconds);
  return head + result.name + tail + result.detail;
}

}  // namespace anderkit
