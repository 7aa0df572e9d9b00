#include "anderkit/composer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace anderkit {

void RunConfig::validate() const {
  if (!(tol > 0.0)) throw ConfigError("tol must be positive");
  if (max_outer_iters < 1) throw ConfigError("max_outer_iters must be at least 1");
  if (max_fevals < 1) throw ConfigError("max_fevals must be at least 1");
  if (!(divergence_factor > 1.0)) throw ConfigError("divergence_factor must exceed 1");
  if (stall_window < 0) throw ConfigError("stall_window must be nonnegative");
}

int window_depth(const AcceleratorSpec& spec) {
  switch (spec.kind()) {
    case AcceleratorSpec::Kind::picard:
      return 0;
    case AcceleratorSpec::Kind::anderson:
      return spec.depth();
    case AcceleratorSpec::Kind::additive:
      return std::max(window_depth(spec.left()), window_depth(spec.right()));
    case AcceleratorSpec::Kind::multiplicative:
      return window_depth(spec.outer());
  }
  return 0;
}

namespace {

StepResult observed_aa_step(const AcceleratorSpec& spec, const HistoryWindow& window, Evaluator& g,
                            const StepHooks& hooks) {
  StepResult out = aa_step(window, spec.depth(), spec.damping(), g);
  if (hooks.on_mixing) hooks.on_mixing(out.diagnostics);
  return out;
}

}  // namespace

StepResult propose_step(const AcceleratorSpec& spec, const HistoryWindow& window, Evaluator& g,
                        const StepHooks& hooks) {
  switch (spec.kind()) {
    case AcceleratorSpec::Kind::picard: {
      StepResult out;
      out.x_next = window.newest().gx;
      out.diagnostics.alpha = {1.0};
      return out;
    }
    case AcceleratorSpec::Kind::anderson:
      return observed_aa_step(spec, window, g, hooks);
    case AcceleratorSpec::Kind::additive:
      return additive_step(window, spec.left(), spec.right(), spec.w_left(), spec.w_right(), g,
                           hooks);
    case AcceleratorSpec::Kind::multiplicative:
      return multiplicative_step(window, spec.outer(), spec.inner(), spec.iter_n(), g, hooks);
  }
  throw std::logic_error("unhandled accelerator kind");
}

StepResult additive_step(const HistoryWindow& window, const AcceleratorSpec& left,
                         const AcceleratorSpec& right, double w_left, double w_right, Evaluator& g,
                         const StepHooks& hooks) {
  if (std::abs(w_left + w_right - 1.0) > 1e-12) {
    throw ConfigError("additive weights must sum to 1");
  }
  if (w_right == 0.0) return propose_step(left, window, g, hooks);
  if (w_left == 0.0) return propose_step(right, window, g, hooks);

  StepResult a = propose_step(left, window, g, hooks);
  StepResult b = propose_step(right, window, g, hooks);
  StepResult out;
  out.x_next.resize(a.x_next.size());
  for (Eigen::Index i = 0; i < a.x_next.size(); ++i) {
    out.x_next[i] = w_left * a.x_next[i] + w_right * b.x_next[i];
  }
  // The left (deeper) component speaks for the combined step.
  out.diagnostics = std::move(a.diagnostics);
  out.diagnostics.fevals += b.diagnostics.fevals;
  return out;
}

StepResult multiplicative_step(const HistoryWindow& window, const AcceleratorSpec& outer,
                               const AcceleratorSpec& inner, int iter_n, Evaluator& g,
                               const StepHooks& hooks) {
  if (outer.kind() != AcceleratorSpec::Kind::anderson) {
    throw ConfigError("the outer solver of a multiplicative composition must be AA or AAoptD");
  }
  StepResult out = observed_aa_step(outer, window, g, hooks);
  if (iter_n <= 0) return out;

  const std::int64_t before = g.count();
  HistoryWindow inner_window(window_depth(inner) + 1, window.dimension(), hooks.memory);
  Vector x = std::move(out.x_next);
  for (int j = 0; j < iter_n; ++j) {
    const Vector gx = g(x);
    inner_window.push(x, gx);
    StepResult step = propose_step(inner, inner_window, g, hooks);
    if (j == 0) out.diagnostics.inner_theta = step.diagnostics.theta;
    x = std::move(step.x_next);
  }
  out.x_next = std::move(x);
  out.diagnostics.fevals += g.count() - before;
  return out;
}

ConvergenceTrace run(const AcceleratorSpec& spec, const FixedPointProblem& problem,
                     const Vector& x0, const RunConfig& config, const RunOptions& options) {
  config.validate();
  if (x0.size() != problem.n) throw std::invalid_argument("run: x0 dimension does not match");
  if (!all_finite(x0)) throw std::invalid_argument("run: x0 must be finite");

  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  const auto elapsed_ns = [&start] {
    return std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - start).count();
  };

  ConvergenceTrace trace;
  std::int64_t k = 0;
  Evaluator g(problem.g, [&trace, &k](const Vector& x, const Vector& gx) {
    trace.evaluations.push_back(
        {static_cast<std::int64_t>(trace.evaluations.size()) + 1, k, norm2(gx - x)});
  });
  HistoryWindow window(window_depth(spec) + 1, problem.n, options.hooks.memory);

  Vector x = x0;
  double initial_residual = 0.0;
  double best_residual = 0.0;
  std::int64_t best_k = 0;
  bool stepping = false;
  try {
    for (;;) {
      const Vector gx = g(x);
      TraceRow row;
      row.k = k;
      row.fevals = g.count();
      row.res_norm = norm2(gx - x);
      row.wall_ns = elapsed_ns();
      trace.rows.push_back(row);
      trace.inner_theta.emplace_back();
      if (options.on_iterate) options.on_iterate(k, x);

      if (k == 0 || row.res_norm < best_residual) {
        best_residual = row.res_norm;
        best_k = k;
      }
      if (k == 0) initial_residual = row.res_norm;
      if (row.res_norm <= config.tol) {
        trace.termination = Termination::converged;
        break;
      }
      if (row.res_norm > config.divergence_factor * initial_residual ||
          (config.stall_window > 0 && k - best_k >= config.stall_window)) {
        trace.termination = Termination::diverged;
        break;
      }
      if (k >= config.max_outer_iters) {
        trace.termination = Termination::max_iters;
        break;
      }
      if (g.count() >= config.max_fevals) {
        trace.termination = Termination::max_fevals;
        break;
      }

      window.push(x, gx);
      stepping = true;
      StepResult step = propose_step(spec, window, g, options.hooks);
      stepping = false;
      TraceRow& current = trace.rows.back();
      current.beta = step.diagnostics.beta;
      current.theta = step.diagnostics.theta;
      current.alpha_abs_sum = step.diagnostics.alpha_abs_sum;
      trace.inner_theta.back() = step.diagnostics.inner_theta;
      x = std::move(step.x_next);
      ++k;
    }
  } catch (const DivergenceError&) {
    trace.termination = Termination::diverged;
    if (stepping) {
      // The step from the last recorded iterate never completed.
      TraceRow& last = trace.rows.back();
      last.beta.reset();
      last.theta.reset();
      last.alpha_abs_sum.reset();
      trace.inner_theta.back().reset();
    }
  }
  return trace;
}

}  // namespace anderkit
