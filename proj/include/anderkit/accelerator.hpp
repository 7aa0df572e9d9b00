#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "anderkit/dense.hpp"

namespace anderkit {

/// Raised for invalid user-facing configuration (damping, weights, run limits).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a map evaluation or a proposed iterate is not finite.
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class DampingKind { none, constant, optimized };
enum class Safeguard { off, floor, reflect };

struct DampingPolicy {
  DampingKind kind = DampingKind::none;
  double beta = 1.0;
  Safeguard safeguard = Safeguard::off;
  double eta = 0.1;

  static DampingPolicy undamped() { return {}; }
  static DampingPolicy constant(double beta);
  static DampingPolicy optimized(Safeguard safeguard = Safeguard::off, double eta = 0.1);

  /// Throws ConfigError if beta or eta is out of range.
  void validate() const;

  friend bool operator==(const DampingPolicy&, const DampingPolicy&) = default;
};

/// Counts history slots reserved by live windows and remembers the peak.
class MemoryProbe {
 public:
  void acquire(std::int64_t slots) {
    current_ += slots;
    if (current_ > peak_) peak_ = current_;
  }
  void release(std::int64_t slots) { current_ -= slots; }
  std::int64_t current() const { return current_; }
  std::int64_t peak() const { return peak_; }

 private:
  std::int64_t current_ = 0;
  std::int64_t peak_ = 0;
};

/// The map g together with an evaluation counter.
///
/// Every call counts as one function evaluation; results are never cached.
/// A non-finite result raises DivergenceError.
class Evaluator {
 public:
  using Map = std::function<Vector(const Vector&)>;
  using Listener = std::function<void(const Vector& x, const Vector& gx)>;

  explicit Evaluator(Map map, Listener listener = {})
      : map_(std::move(map)), listener_(std::move(listener)) {}

  Vector operator()(const Vector& x);
  std::int64_t count() const { return count_; }

 private:
  Map map_;
  Listener listener_;
  std::int64_t count_ = 0;
};

/// Ring buffer of (x_i, g(x_i), f_i) triples, oldest first.
///
/// All capacity slots are allocated up front and reported to the optional
/// MemoryProbe for the lifetime of the window.
class HistoryWindow {
 public:
  struct Entry {
    Vector x;
    Vector gx;
    Vector f;
  };

  HistoryWindow(int capacity, Eigen::Index dimension, MemoryProbe* probe = nullptr);
  ~HistoryWindow();
  HistoryWindow(HistoryWindow&& other) noexcept;
  HistoryWindow& operator=(HistoryWindow&& other) noexcept;
  HistoryWindow(const HistoryWindow&) = delete;
  HistoryWindow& operator=(const HistoryWindow&) = delete;

  /// Appends (x, gx, gx - x), evicting the oldest entry when full.
  void push(const Vector& x, const Vector& gx);

  int size() const { return count_; }
  int capacity() const { return static_cast<int>(slots_.size()); }
  bool empty() const { return count_ == 0; }
  Eigen::Index dimension() const { return dimension_; }
  /// Total number of pushes since construction.
  std::int64_t pushes() const { return pushes_; }

  /// i = 0 is the oldest retained entry.
  const Entry& entry(int i) const;
  const Entry& newest() const { return entry(count_ - 1); }

 private:
  std::vector<Entry> slots_;
  Eigen::Index dimension_ = 0;
  int head_ = 0;
  int count_ = 0;
  std::int64_t pushes_ = 0;
  MemoryProbe* probe_ = nullptr;
};

struct MixingResult {
  std::vector<double> alpha;  // oldest first
  Vector x_avg;
  Vector gx_avg;
  double optimized_norm = 0.0;
};

/// Mixing over the newest min(depth, size - 1) + 1 entries of the window.
MixingResult solve_mixing_coefficients(const HistoryWindow& window, int depth);
MixingResult solve_mixing_coefficients(const HistoryWindow& window);

/// Minimizer of ||r_p - beta (r_p - r_q)||_2, clamped into (0, 1].
double optimized_beta(const Vector& r_p, const Vector& r_q);

double safeguard_beta(double beta, const DampingPolicy& policy);

struct StepDiagnostics {
  std::vector<double> alpha;
  double beta = 1.0;
  double theta = 1.0;
  double alpha_abs_sum = 1.0;
  std::int64_t fevals = 0;
  /// Gain of the first inner mixing step of a multiplicative composition.
  std::optional<double> inner_theta;
};

struct StepResult {
  Vector x_next;
  StepDiagnostics diagnostics;
};

/// One Anderson update from a window whose newest entry is (x_k, g(x_k), f_k).
///
/// The optimized policy spends two extra evaluations of g (at both weighted
/// averages). Throws DivergenceError when the proposed iterate is not finite.
StepResult aa_step(const HistoryWindow& window, int depth, const DampingPolicy& policy,
                   Evaluator& g);

/// theta = ||F alpha|| / ||f_k||, with 0 returned for a zero residual.
double theta_of_step(const MixingResult& mixing, double f_k_norm);

}  // namespace anderkit
