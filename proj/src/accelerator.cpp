#include "anderkit/accelerator.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace anderkit {

DampingPolicy DampingPolicy::constant(double beta) {
  DampingPolicy p;
  p.kind = DampingKind::constant;
  p.beta = beta;
  p.validate();
  return p;
}

DampingPolicy DampingPolicy::optimized(Safeguard safeguard, double eta) {
  DampingPolicy p;
  p.kind = DampingKind::optimized;
  p.safeguard = safeguard;
  p.eta = eta;
  p.validate();
  return p;
}

void DampingPolicy::validate() const {
  if (kind == DampingKind::constant && !(beta > 0.0 && beta <= 1.0)) {
    throw ConfigError("damping factor beta must lie in (0, 1], got " + std::to_string(beta));
  }
  if (!(eta > 0.0 && eta < 0.5)) {
    throw ConfigError("safeguard eta must lie in (0, 0.5), got " + std::to_string(eta));
  }
}

Vector Evaluator::operator()(const Vector& x) {
  Vector gx = map_(x);
  ++count_;
  if (gx.size() != x.size()) {
    throw std::invalid_argument("map returned a vector of the wrong length");
  }
  if (listener_) listener_(x, gx);
  if (!all_finite(gx)) throw DivergenceError("map evaluation produced a non-finite value");
  return gx;
}

HistoryWindow::HistoryWindow(int capacity, Eigen::Index dimension, MemoryProbe* probe)
    : dimension_(dimension), probe_(probe) {
  if (capacity < 1) throw std::invalid_argument("history window needs at least one slot");
  slots_.resize(static_cast<std::size_t>(capacity));
  for (auto& slot : slots_) {
    slot.x.resize(dimension);
    slot.gx.resize(dimension);
    slot.f.resize(dimension);
  }
  if (probe_ != nullptr) probe_->acquire(capacity);
}

HistoryWindow::~HistoryWindow() {
  if (probe_ != nullptr) probe_->release(static_cast<std::int64_t>(slots_.size()));
}

HistoryWindow::HistoryWindow(HistoryWindow&& other) noexcept
    : slots_(std::move(other.slots_)),
      dimension_(other.dimension_),
      head_(other.head_),
      count_(other.count_),
      pushes_(other.pushes_),
      probe_(std::exchange(other.probe_, nullptr)) {
  other.slots_.clear();
  other.count_ = 0;
}

HistoryWindow& HistoryWindow::operator=(HistoryWindow&& other) noexcept {
  if (this != &other) {
    if (probe_ != nullptr) probe_->release(static_cast<std::int64_t>(slots_.size()));
    slots_ = std::move(other.slots_);
    dimension_ = other.dimension_;
    head_ = other.head_;
    count_ = other.count_;
    pushes_ = other.pushes_;
    probe_ = std::exchange(other.probe_, nullptr);
    other.slots_.clear();
    other.count_ = 0;
  }
  return *this;
}

void HistoryWindow::push(const Vector& x, const Vector& gx) {
  if (x.size() != dimension_ || gx.size() != dimension_) {
    throw std::invalid_argument("history window: dimension mismatch on push");
  }
  const int cap = capacity();
  int slot = 0;
  if (count_ < cap) {
    slot = (head_ + count_) % cap;
    ++count_;
  } else {
    slot = head_;
    head_ = (head_ + 1) % cap;
  }
  Entry& e = slots_[static_cast<std::size_t>(slot)];
  e.x = x;
  e.gx = gx;
  e.f = gx - x;
  ++pushes_;
}

const HistoryWindow::Entry& HistoryWindow::entry(int i) const {
  if (i < 0 || i >= count_) throw std::out_of_range("history window index out of range");
  return slots_[static_cast<std::size_t>((head_ + i) % capacity())];
}

namespace {

// Weighted sum over entries [first, first + weights.size()), left to right.
Vector weighted_sum(const HistoryWindow& window, int first, const std::vector<double>& weights,
                    Vector HistoryWindow::Entry::*member) {
  Vector out = weights[0] * (window.entry(first).*member);
  for (std::size_t i = 1; i < weights.size(); ++i) {
    const Vector& v = window.entry(first + static_cast<int>(i)).*member;
    for (Eigen::Index r = 0; r < out.size(); ++r) out[r] += weights[i] * v[r];
  }
  return out;
}

}  // namespace

MixingResult solve_mixing_coefficients(const HistoryWindow& window, int depth) {
  if (window.empty()) throw std::invalid_argument("mixing requires a nonempty window");
  if (depth < 0) throw std::invalid_argument("window depth must be nonnegative");

  // Difference columns beyond the problem dimension cannot add rank.
  const int mk = std::min<int>({depth, window.size() - 1, static_cast<int>(window.dimension())});
  const int first = window.size() - 1 - mk;
  const Vector& fk = window.newest().f;

  std::vector<double> alpha(static_cast<std::size_t>(mk) + 1, 0.0);
  if (mk == 0) {
    alpha[0] = 1.0;
  } else {
    Matrix diffs(fk.size(), mk);
    for (int j = 1; j <= mk; ++j) {
      diffs.col(j - 1) = window.entry(window.size() - 1 - j).f - fk;
    }
    const Vector omega = least_squares(diffs, -fk);
    double omega_sum = 0.0;
    for (int j = 1; j <= mk; ++j) {
      alpha[static_cast<std::size_t>(mk - j)] = omega[j - 1];
      omega_sum += omega[j - 1];
    }
    alpha[static_cast<std::size_t>(mk)] = 1.0 - omega_sum;
  }

  MixingResult result;
  const Vector mixed_f = weighted_sum(window, first, alpha, &HistoryWindow::Entry::f);
  result.optimized_norm = norm2(mixed_f);
  const double fk_norm = norm2(fk);
  if (mk > 0 && !(result.optimized_norm <= fk_norm)) {
    // Rounding in a nearly singular solve lost to the feasible point alpha = e_last.
    std::fill(alpha.begin(), alpha.end(), 0.0);
    alpha.back() = 1.0;
    result.optimized_norm = fk_norm;
  }
  result.x_avg = weighted_sum(window, first, alpha, &HistoryWindow::Entry::x);
  result.gx_avg = weighted_sum(window, first, alpha, &HistoryWindow::Entry::gx);
  result.alpha = std::move(alpha);
  return result;
}

MixingResult solve_mixing_coefficients(const HistoryWindow& window) {
  return solve_mixing_coefficients(window, window.capacity() - 1);
}

double optimized_beta(const Vector& r_p, const Vector& r_q) {
  if (r_p.size() != r_q.size()) throw std::invalid_argument("optimized_beta: length mismatch");
  const Vector direction = r_p - r_q;
  const double direction_norm = norm2(direction);
  if (direction_norm < 1e-14 * std::max(norm2(r_p), 1.0)) return 1.0;
  const double raw = std::abs(dot(direction, r_p)) / (direction_norm * direction_norm);
  if (!(raw > 0.0) || !std::isfinite(raw)) return 1.0;
  return std::min(raw, 1.0);
}

double safeguard_beta(double beta, const DampingPolicy& policy) {
  if (!(policy.eta > 0.0 && policy.eta < 0.5)) {
    throw ConfigError("safeguard eta must lie in (0, 0.5), got " + std::to_string(policy.eta));
  }
  switch (policy.safeguard) {
    case Safeguard::floor:
      return std::max(beta, policy.eta);
    case Safeguard::reflect:
      return beta >= policy.eta ? beta : 1.0 - beta;
    case Safeguard::off:
      break;
  }
  return beta;
}

double theta_of_step(const MixingResult& mixing, double f_k_norm) {
  if (f_k_norm == 0.0) return 0.0;
  return mixing.optimized_norm / f_k_norm;
}

StepResult aa_step(const HistoryWindow& window, int depth, const DampingPolicy& policy,
                   Evaluator& g) {
  MixingResult mix = solve_mixing_coefficients(window, depth);

  StepResult out;
  StepDiagnostics& diag = out.diagnostics;
  diag.theta = theta_of_step(mix, norm2(window.newest().f));
  diag.alpha_abs_sum = 0.0;
  for (double a : mix.alpha) diag.alpha_abs_sum += std::abs(a);

  switch (policy.kind) {
    case DampingKind::none:
      diag.beta = 1.0;
      out.x_next = mix.gx_avg;
      break;
    case DampingKind::constant: {
      const double b = policy.beta;
      diag.beta = b;
      out.x_next = (1.0 - b) * mix.x_avg + b * mix.gx_avg;
      break;
    }
    case DampingKind::optimized: {
      const std::int64_t before = g.count();
      const Vector r_p = mix.x_avg - g(mix.x_avg);
      const Vector r_q = mix.gx_avg - g(mix.gx_avg);
      diag.fevals = g.count() - before;
      const double b = safeguard_beta(optimized_beta(r_p, r_q), policy);
      diag.beta = b;
      out.x_next = mix.x_avg + b * (mix.gx_avg - mix.x_avg);
      break;
    }
  }
  diag.alpha = std::move(mix.alpha);
  if (!all_finite(out.x_next)) throw DivergenceError("accelerated iterate is not finite");
  return out;
}

}  // namespace anderkit
