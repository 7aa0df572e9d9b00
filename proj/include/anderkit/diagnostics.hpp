#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "anderkit/spec.hpp"

namespace anderkit {

enum class Termination { converged, max_iters, max_fevals, diverged };

std::string_view to_string(Termination t);
Termination termination_from_string(std::string_view text);

/// One outer iteration. beta/theta/alpha_abs_sum describe the step taken
/// from x_k and are absent on the final row.
struct TraceRow {
  std::int64_t k = 0;
  std::int64_t fevals = 0;
  double res_norm = 0.0;
  std::optional<double> beta;
  std::optional<double> theta;
  std::optional<double> alpha_abs_sum;
  std::int64_t wall_ns = 0;

  friend bool operator==(const TraceRow&, const TraceRow&) = default;
};

/// One evaluation of g, for residual-per-evaluation plots.
struct EvaluationRow {
  std::int64_t feval = 0;
  std::int64_t k = 0;
  double res_norm = 0.0;
};

struct ConvergenceTrace {
  std::vector<TraceRow> rows;
  std::vector<EvaluationRow> evaluations;
  /// Inner gain of a multiplicative step, aligned with rows.
  std::vector<std::optional<double>> inner_theta;
  Termination termination = Termination::max_iters;

  std::int64_t iterations() const { return rows.empty() ? 0 : rows.back().k; }
  double final_residual() const { return rows.empty() ? 0.0 : rows.back().res_norm; }
  std::int64_t wall_ns() const { return rows.empty() ? 0 : rows.back().wall_ns; }
};

/// Total evaluations of g recorded in a completed trace.
std::int64_t feval_count(const ConvergenceTrace& trace);

/// History slots a spec keeps alive at peak: AA(m) -> m+1, additive ->
/// max of the parts, multiplicative -> outer + inner, picard -> 1.
std::int64_t memory_footprint(const AcceleratorSpec& spec);

struct AuditReport {
  bool skipped = false;
  std::string notice;
  int steps_checked = 0;
  int violations = 0;
  /// Largest value of (observed - bound) over the checked steps.
  double worst_excess = -1.0;
  std::vector<std::int64_t> violating_steps;
};

/// Checks each recorded step against the per-step bound for affine maps:
///   single step:     ||f_{k+1}|| <= theta [(1 - beta) + kappa beta] ||f_k||
///   with inner gain: ||f_{k+1}|| <= theta_in theta kappa [(1 - beta) + kappa beta] ||f_k||
/// The second form applies when the row carries an inner gain (iterN = 1).
AuditReport contraction_audit(const ConvergenceTrace& trace, double kappa, double tol = 1e-8);

inline constexpr std::string_view kTraceCsvHeader =
    "iter,fevals,res_norm,beta,theta,alpha_abs_sum,wall_ns";

/// CSV with LF endings and 17 significant digits; absent fields are empty.
void write_trace_csv(std::ostream& os, const ConvergenceTrace& trace,
                     std::optional<int> iteration_scale = std::nullopt);
std::vector<TraceRow> read_trace_csv(std::istream& is);

std::string format_double(double v);

}  // namespace anderkit
