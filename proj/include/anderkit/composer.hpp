#pragma once

#include <cstdint>
#include <functional>

#include "anderkit/accelerator.hpp"
#include "anderkit/diagnostics.hpp"
#include "anderkit/problems.hpp"
#include "anderkit/spec.hpp"

namespace anderkit {

struct RunConfig {
  double tol = 1e-8;
  std::int64_t max_outer_iters = 1000;
  std::int64_t max_fevals = 10'000'000;
  /// Stop as diverged once ||f_k|| > divergence_factor * ||f_0||.
  double divergence_factor = 1e6;
  /// Also stop as diverged when no new best residual appears for this many
  /// outer iterations (bounded cycles never trip the growth test). 0 disables.
  std::int64_t stall_window = 1000;

  void validate() const;
};

/// Instrumentation threaded through (possibly nested) steps.
struct StepHooks {
  /// Receives reservations of every history window created.
  MemoryProbe* memory = nullptr;
  /// Called after every Anderson mixing step, inner and outer alike.
  std::function<void(const StepDiagnostics&)> on_mixing;
};

struct RunOptions {
  /// Called with every outer iterate x_k whose residual is recorded.
  std::function<void(std::int64_t k, const Vector& x)> on_iterate;
  StepHooks hooks;
};

/// Deepest history a spec reads from the window it is handed.
int window_depth(const AcceleratorSpec& spec);

/// Next iterate proposed by `spec` from a window whose newest entry is
/// (x_k, g(x_k)). Composite specs recurse; only multiplicative specs
/// allocate (their fresh inner window).
StepResult propose_step(const AcceleratorSpec& spec, const HistoryWindow& window, Evaluator& g,
                        const StepHooks& hooks = {});

/// w_left * left-step + w_right * right-step, both read from the same
/// shared window. A side with weight exactly zero is not evaluated.
StepResult additive_step(const HistoryWindow& window, const AcceleratorSpec& left,
                         const AcceleratorSpec& right, double w_left, double w_right, Evaluator& g,
                         const StepHooks& hooks = {});

/// One outer step, then iter_n steps of a fresh inner accelerator started
/// at the outer result. Inner iterates never enter the outer window.
StepResult multiplicative_step(const HistoryWindow& window, const AcceleratorSpec& outer,
                               const AcceleratorSpec& inner, int iter_n, Evaluator& g,
                               const StepHooks& hooks = {});

/// Runs `spec` from x0 until the residual drops to
/// tol, a limit is hit, or the iteration diverges. The first step sees a
/// one-entry window, so undamped specs start with x_1 = g(x_0). Failures are
/// recorded as terminations, never thrown; invalid arguments still throw.
ConvergenceTrace run(const AcceleratorSpec& spec, const FixedPointProblem& problem,
                     const Vector& x0, const RunConfig& config, const RunOptions& options = {});

}  // namespace anderkit
