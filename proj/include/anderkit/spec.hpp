#pragma once

#include <cstddef>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>

#include "anderkit/accelerator.hpp"

namespace anderkit {

/// Recursive solver description:
///   picard | AA(m, damping) | additive(left, right, weights) |
///   multiplicative(outer AA, inner, iterN)
///
/// Children are shared and immutable, so specs copy cheaply.
class AcceleratorSpec {
 public:
  enum class Kind { picard, anderson, additive, multiplicative };

  static AcceleratorSpec picard();
  static AcceleratorSpec anderson(int depth, DampingPolicy damping = {});
  static AcceleratorSpec additive(AcceleratorSpec left, AcceleratorSpec right,
                                  double w_left = 0.5, double w_right = 0.5);
  static AcceleratorSpec multiplicative(AcceleratorSpec outer, AcceleratorSpec inner,
                                        int iter_n = 1);

  Kind kind() const { return kind_; }

  // anderson
  int depth() const { return depth_; }
  const DampingPolicy& damping() const { return damping_; }

  // additive
  const AcceleratorSpec& left() const { return *first_; }
  const AcceleratorSpec& right() const { return *second_; }
  double w_left() const { return w_left_; }
  double w_right() const { return w_right_; }

  // multiplicative
  const AcceleratorSpec& outer() const { return *first_; }
  const AcceleratorSpec& inner() const { return *second_; }
  int iter_n() const { return iter_n_; }

  friend bool operator==(const AcceleratorSpec& a, const AcceleratorSpec& b);

 private:
  AcceleratorSpec() = default;

  Kind kind_ = Kind::picard;
  int depth_ = 0;
  DampingPolicy damping_;
  double w_left_ = 0.5;
  double w_right_ = 0.5;
  int iter_n_ = 1;
  std::shared_ptr<const AcceleratorSpec> first_;
  std::shared_ptr<const AcceleratorSpec> second_;
};

class SpecParseError : public std::runtime_error {
 public:
  SpecParseError(const std::string& message, std::size_t position)
      : std::runtime_error(message + " at position " + std::to_string(position)),
        position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

/// Grammar:
///   SPEC   := TERM (";" OPTION)*
///   TERM   := "picard" | "AA(" INT ["," SPEC] ")" | "AAoptD(" INT ["," SPEC] ")"
///           | "ADD(" SPEC "," SPEC ["," NUM "," NUM] ")"
///   OPTION := "beta=" NUM | "eta=" NUM | "guard=" ("off"|"floor"|"reflect") | "iterN=" INT
///
/// Options bind to the term they follow. Whitespace between tokens is ignored.
AcceleratorSpec parse_spec(std::string_view text);

/// Canonical text; parse_spec(render_spec(s)) == s.
std::string render_spec(const AcceleratorSpec& spec);

/// True for additive and multiplicative specs.
bool is_composite(const AcceleratorSpec& spec);

}  // namespace anderkit
