#include "anderkit/diagnostics.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "doctest.h"
#include "support.hpp"

using namespace anderkit;
using test::vec;

namespace {

TraceRow row(std::int64_t k, double res, std::optional<double> beta = {},
             std::optional<double> theta = {}) {
  TraceRow r;
  r.k = k;
  r.fevals = k + 1;
  r.res_norm = res;
  r.beta = beta;
  r.theta = theta;
  if (theta) r.alpha_abs_sum = 1.0;
  r.wall_ns = 100 * (k + 1);
  return r;
}

}  // namespace

TEST_CASE("termination names") {
  for (auto t : {Termination::converged, Termination::max_iters, Termination::max_fevals,
                 Termination::diverged}) {
    CHECK(termination_from_string(to_string(t)) == t);
  }
  CHECK(to_string(Termination::max_iters) == "max_iters");
  CHECK_THROWS(termination_from_string("exploded"));
}

TEST_CASE("theta of a mixing step") {
  MixingResult keep;
  keep.alpha = {0.0, 1.0};
  keep.optimized_norm = 2.5;
  CHECK(theta_of_step(keep, 2.5) == 1.0);
  MixingResult exact;
  exact.optimized_norm = 0.0;
  CHECK(theta_of_step(exact, 3.0) == 0.0);
  CHECK(theta_of_step(exact, 0.0) == 0.0);
}

TEST_CASE("memory footprint") {
  CHECK(memory_footprint(parse_spec("picard")) == 1);
  CHECK(memory_footprint(parse_spec("AA(20)")) == 21);
  CHECK(memory_footprint(parse_spec("ADD(AA(20),AA(1))")) == 21);
  CHECK(memory_footprint(parse_spec("ADD(AA(1),AA(20))")) == 21);
  CHECK(memory_footprint(parse_spec("AA(20,AA(1))")) == 23);
  CHECK(memory_footprint(parse_spec("AAoptD(5,AAoptD(1))")) == 8);
  CHECK(memory_footprint(parse_spec("AA(3,ADD(AA(2),AA(4)))")) == 9);
}

TEST_CASE("feval count") {
  ConvergenceTrace t;
  t.rows = {row(0, 1.0), row(1, 0.5)};
  CHECK(feval_count(t) == 2);
  t.evaluations = {{1, 0, 1.0}, {2, 1, 0.5}, {3, 1, 0.4}};
  CHECK(feval_count(t) == 3);
  CHECK(feval_count(ConvergenceTrace{}) == 0);
}

TEST_CASE("audit flags bound violations") {
  ConvergenceTrace t;
  t.rows = {row(0, 1.0, 1.0, 0.5), row(1, 0.4, 0.5, 1.0), row(2, 0.39)};
  t.inner_theta.assign(3, std::nullopt);
  // kappa = 0.5: step 0 bound 0.5 * 0.5 * 1 = 0.25 < 0.4; step 1 bound 1 * 0.75 * 0.4 = 0.3.
  const AuditReport r = contraction_audit(t, 0.5);
  CHECK_FALSE(r.skipped);
  CHECK(r.steps_checked == 2);
  CHECK(r.violations == 2);
  CHECK(r.violating_steps == std::vector<std::int64_t>{0, 1});
  CHECK(r.worst_excess == doctest::Approx(0.15));

  const AuditReport loose = contraction_audit(t, 0.99);
  CHECK(loose.violations == 0);
}

TEST_CASE("audit uses the inner gain") {
  ConvergenceTrace t;
  t.rows = {row(0, 1.0, 1.0, 0.8), row(1, 0.3)};
  t.inner_theta = {0.9, std::nullopt};
  // 0.9 * 0.8 * 0.5 * 0.5 = 0.18
  CHECK(contraction_audit(t, 0.5).violations == 1);
  t.rows[1].res_norm = 0.17;
  CHECK(contraction_audit(t, 0.5).violations == 0);
}

TEST_CASE("audit without step fields is skipped") {
  ConvergenceTrace t;
  t.rows = {row(0, 1.0), row(1, 0.5)};
  const AuditReport r = contraction_audit(t, 0.5);
  CHECK(r.skipped);
  CHECK_FALSE(r.notice.empty());
}

TEST_CASE("double formatting") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(2.0) == "2");
  CHECK(format_double(1.0 / 3.0) == "0.33333333333333331");
  CHECK(format_double(1e-300) == "1e-300");
}

TEST_CASE("trace csv round trip") {
  ConvergenceTrace t;
  t.rows = {row(0, 1.0 / 3.0, 0.25, 0.75), row(1, 4.9406564584124654e-324, 1.0, 1.0), row(2, 1e-9)};
  std::ostringstream out;
  write_trace_csv(out, t);
  const std::string text = out.str();
  CHECK(text.rfind(std::string(kTraceCsvHeader) + "\n", 0) == 0);
  CHECK(text.find('\r') == std::string::npos);
  CHECK(text.find("2,3,1.0000000000000001e-09,,,,300\n") != std::string::npos);

  std::istringstream in(text);
  CHECK(read_trace_csv(in) == t.rows);
}

TEST_CASE("paper-style iteration column") {
  ConvergenceTrace t;
  t.rows = {row(0, 1.0, 1.0, 1.0), row(1, 0.5)};
  std::ostringstream out;
  write_trace_csv(out, t, 2);
  std::istringstream lines(out.str());
  std::string header, first, second;
  std::getline(lines, header);
  std::getline(lines, first);
  std::getline(lines, second);
  CHECK(header == std::string(kTraceCsvHeader) + ",paper_iter");
  CHECK(first.substr(first.rfind(',') + 1) == "0");
  CHECK(second.substr(second.rfind(',') + 1) == "2");
}
