#include "anderkit/diagnostics.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace anderkit {

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::converged:
      return "converged";
    case Termination::max_iters:
      return "max_iters";
    case Termination::max_fevals:
      return "max_fevals";
    case Termination::diverged:
      return "diverged";
  }
  return "unknown";
}

Termination termination_from_string(std::string_view text) {
  for (Termination t : {Termination::converged, Termination::max_iters, Termination::max_fevals,
                        Termination::diverged}) {
    if (to_string(t) == text) return t;
  }
  throw std::invalid_argument("unknown termination '" + std::string(text) + "'");
}

std::int64_t feval_count(const ConvergenceTrace& trace) {
  std::int64_t total = trace.rows.empty() ? 0 : trace.rows.back().fevals;
  if (!trace.evaluations.empty()) total = std::max(total, trace.evaluations.back().feval);
  return total;
}

std::int64_t memory_footprint(const AcceleratorSpec& spec) {
  switch (spec.kind()) {
    case AcceleratorSpec::Kind::picard:
      return 1;
    case AcceleratorSpec::Kind::anderson:
      return spec.depth() + 1;
    case AcceleratorSpec::Kind::additive:
      return std::max(memory_footprint(spec.left()), memory_footprint(spec.right()));
    case AcceleratorSpec::Kind::multiplicative:
      return memory_footprint(spec.outer()) + memory_footprint(spec.inner());
  }
  return 0;
}

AuditReport contraction_audit(const ConvergenceTrace& trace, double kappa, double tol) {
  AuditReport report;
  const auto& rows = trace.rows;
  const bool has_fields = std::any_of(rows.begin(), rows.end(), [](const TraceRow& r) {
    return r.theta.has_value() && r.beta.has_value();
  });
  if (!has_fields) {
    report.skipped = true;
    report.notice = "trace carries no theta/beta fields; audit skipped";
    return report;
  }
  for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
    const TraceRow& row = rows[i];
    if (!row.theta || !row.beta) continue;
    const double beta = *row.beta;
    double factor = *row.theta * ((1.0 - beta) + kappa * beta);
    if (i < trace.inner_theta.size() && trace.inner_theta[i]) {
      factor *= *trace.inner_theta[i] * kappa;
    }
    const double bound = factor * row.res_norm;
    const double excess = rows[i + 1].res_norm - bound;
    report.worst_excess = report.steps_checked == 0 ? excess : std::max(report.worst_excess, excess);
    ++report.steps_checked;
    if (excess > tol) {
      ++report.violations;
      report.violating_steps.push_back(row.k);
    }
  }
  return report;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::string optional_field(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string{};
}

// from_chars, unlike stod, accepts subnormals.
double parse_double(const std::string& cell) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc{} || ptr != cell.data() + cell.size()) {
    throw std::runtime_error("trace csv: bad number '" + cell + "'");
  }
  return v;
}

std::optional<double> parse_optional(const std::string& cell) {
  if (cell.empty()) return std::nullopt;
  return parse_double(cell);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

void write_trace_csv(std::ostream& os, const ConvergenceTrace& trace,
                     std::optional<int> iteration_scale) {
  os << kTraceCsvHeader;
  if (iteration_scale) os << ",paper_iter";
  os << '\n';
  for (const TraceRow& r : trace.rows) {
    os << r.k << ',' << r.fevals << ',' << format_double(r.res_norm) << ','
       << optional_field(r.beta) << ',' << optional_field(r.theta) << ','
       << optional_field(r.alpha_abs_sum) << ',' << r.wall_ns;
    if (iteration_scale) os << ',' << r.k * *iteration_scale;
    os << '\n';
  }
}

std::vector<TraceRow> read_trace_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind(kTraceCsvHeader, 0) != 0) {
    throw std::runtime_error("trace csv: missing or unexpected header");
  }
  std::vector<TraceRow> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() < 7) throw std::runtime_error("trace csv: short row '" + line + "'");
    TraceRow r;
    r.k = std::stoll(cells[0]);
    r.fevals = std::stoll(cells[1]);
    r.res_norm = parse_double(cells[2]);
    r.beta = parse_optional(cells[3]);
    r.theta = parse_optional(cells[4]);
    r.alpha_abs_sum = parse_optional(cells[5]);
    r.wall_ns = std::stoll(cells[6]);
    rows.push_back(r);
  }
  return rows;
}

}  // namespace anderkit
