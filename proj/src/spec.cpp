#include "anderkit/spec.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <optional>
#include <system_error>

namespace anderkit {

AcceleratorSpec AcceleratorSpec::picard() { return AcceleratorSpec{}; }

AcceleratorSpec AcceleratorSpec::anderson(int depth, DampingPolicy damping) {
  if (depth < 0) throw ConfigError("window size must be nonnegative");
  damping.validate();
  AcceleratorSpec s;
  s.kind_ = Kind::anderson;
  s.depth_ = depth;
  s.damping_ = damping;
  return s;
}

AcceleratorSpec AcceleratorSpec::additive(AcceleratorSpec left, AcceleratorSpec right,
                                          double w_left, double w_right) {
  if (!std::isfinite(w_left) || !std::isfinite(w_right) ||
      std::abs(w_left + w_right - 1.0) > 1e-12) {
    throw ConfigError("additive weights must sum to 1");
  }
  AcceleratorSpec s;
  s.kind_ = Kind::additive;
  s.w_left_ = w_left;
  s.w_right_ = w_right;
  s.first_ = std::make_shared<const AcceleratorSpec>(std::move(left));
  s.second_ = std::make_shared<const AcceleratorSpec>(std::move(right));
  return s;
}

AcceleratorSpec AcceleratorSpec::multiplicative(AcceleratorSpec outer, AcceleratorSpec inner,
                                                int iter_n) {
  if (outer.kind() != Kind::anderson) {
    throw ConfigError("the outer solver of a multiplicative composition must be AA or AAoptD");
  }
  if (iter_n < 0) throw ConfigError("iterN must be nonnegative");
  AcceleratorSpec s;
  s.kind_ = Kind::multiplicative;
  s.iter_n_ = iter_n;
  s.first_ = std::make_shared<const AcceleratorSpec>(std::move(outer));
  s.second_ = std::make_shared<const AcceleratorSpec>(std::move(inner));
  return s;
}

bool operator==(const AcceleratorSpec& a, const AcceleratorSpec& b) {
  if (a.kind_ != b.kind_) return false;
  switch (a.kind_) {
    case AcceleratorSpec::Kind::picard:
      return true;
    case AcceleratorSpec::Kind::anderson:
      return a.depth_ == b.depth_ && a.damping_ == b.damping_;
    case AcceleratorSpec::Kind::additive:
      return a.w_left_ == b.w_left_ && a.w_right_ == b.w_right_ && *a.first_ == *b.first_ &&
             *a.second_ == *b.second_;
    case AcceleratorSpec::Kind::multiplicative:
      return a.iter_n_ == b.iter_n_ && *a.first_ == *b.first_ && *a.second_ == *b.second_;
  }
  return false;
}

bool is_composite(const AcceleratorSpec& spec) {
  return spec.kind() == AcceleratorSpec::Kind::additive ||
         spec.kind() == AcceleratorSpec::Kind::multiplicative;
}

namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  AcceleratorSpec parse_all() {
    AcceleratorSpec spec = parse_spec();
    skip_ws();
    if (pos_ != text_.size()) fail("expected end of input");
    return spec;
  }

 private:
  // Mutable form of one term, completed by its trailing options.
  struct Draft {
    AcceleratorSpec::Kind kind = AcceleratorSpec::Kind::picard;
    int depth = 0;
    DampingPolicy damping;
    std::optional<AcceleratorSpec> inner;
    std::optional<AcceleratorSpec> left, right;
    double w_left = 0.5, w_right = 0.5;
    int iter_n = 1;
    std::size_t start = 0;
  };

  [[noreturn]] void fail(const std::string& message) const { throw SpecParseError(message, pos_); }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(std::string_view token) {
    skip_ws();
    if (text_.substr(pos_, token.size()) == token) {
      pos_ += token.size();
      return true;
    }
    return false;
  }

  void expect(std::string_view token) {
    if (!accept(token)) fail("expected '" + std::string(token) + "'");
  }

  int parse_int() {
    skip_ws();
    int value = 0;
    const char* begin = text_.data() + pos_;
    const char* end = text_.data() + text_.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr == begin) fail("expected an integer");
    pos_ += static_cast<std::size_t>(ptr - begin);
    return value;
  }

  double parse_number() {
    skip_ws();
    double value = 0.0;
    const char* begin = text_.data() + pos_;
    const char* end = text_.data() + text_.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr == begin) fail("expected a number");
    pos_ += static_cast<std::size_t>(ptr - begin);
    return value;
  }

  std::string parse_word() {
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (start == pos_) fail("expected a word");
    return std::string(text_.substr(start, pos_ - start));
  }

  AcceleratorSpec parse_spec() {
    Draft draft = parse_term();
    while (accept(";")) apply_option(draft);
    return build(draft);
  }

  Draft parse_term() {
    skip_ws();
    Draft d;
    d.start = pos_;
    if (accept("picard")) {
      d.kind = AcceleratorSpec::Kind::picard;
      return d;
    }
    if (accept("ADD(")) {
      d.kind = AcceleratorSpec::Kind::additive;
      d.left = parse_spec();
      expect(",");
      d.right = parse_spec();
      if (accept(",")) {
        d.w_left = parse_number();
        expect(",");
        d.w_right = parse_number();
      }
      expect(")");
      return d;
    }
    // AAoptD must be tried before AA.
    if (accept("AAoptD(")) {
      d.damping = DampingPolicy::optimized();
    } else if (accept("AA(")) {
      d.damping = DampingPolicy::undamped();
    } else {
      fail("expected 'picard', 'AA(', 'AAoptD(' or 'ADD('");
    }
    d.kind = AcceleratorSpec::Kind::anderson;
    d.depth = parse_int();
    if (d.depth < 0) fail("window size must be nonnegative");
    if (accept(",")) {
      d.kind = AcceleratorSpec::Kind::multiplicative;
      d.inner = parse_spec();
    }
    expect(")");
    return d;
  }

  void apply_option(Draft& d) {
    const std::size_t option_pos = pos_;
    const std::string key = parse_word();
    expect("=");
    const bool windowed = d.kind == AcceleratorSpec::Kind::anderson ||
                          d.kind == AcceleratorSpec::Kind::multiplicative;
    if (key == "beta") {
      if (!windowed || d.damping.kind == DampingKind::optimized) {
        pos_ = option_pos;
        fail("'beta' applies only to AA terms");
      }
      d.damping.kind = DampingKind::constant;
      d.damping.beta = parse_number();
    } else if (key == "eta") {
      if (!windowed || d.damping.kind != DampingKind::optimized) {
        pos_ = option_pos;
        fail("'eta' applies only to AAoptD terms");
      }
      d.damping.eta = parse_number();
    } else if (key == "guard") {
      if (!windowed || d.damping.kind != DampingKind::optimized) {
        pos_ = option_pos;
        fail("'guard' applies only to AAoptD terms");
      }
      const std::string mode = parse_word();
      if (mode == "off") {
        d.damping.safeguard = Safeguard::off;
      } else if (mode == "floor") {
        d.damping.safeguard = Safeguard::floor;
      } else if (mode == "reflect") {
        d.damping.safeguard = Safeguard::reflect;
      } else {
        fail("expected 'off', 'floor' or 'reflect'");
      }
    } else if (key == "iterN") {
      if (d.kind != AcceleratorSpec::Kind::multiplicative) {
        pos_ = option_pos;
        fail("'iterN' applies only to multiplicative terms");
      }
      d.iter_n = parse_int();
    } else {
      pos_ = option_pos;
      fail("unknown option '" + key + "'");
    }
  }

  AcceleratorSpec build(const Draft& d) {
    try {
      switch (d.kind) {
        case AcceleratorSpec::Kind::picard:
          return AcceleratorSpec::picard();
        case AcceleratorSpec::Kind::anderson:
          return AcceleratorSpec::anderson(d.depth, d.damping);
        case AcceleratorSpec::Kind::additive:
          return AcceleratorSpec::additive(*d.left, *d.right, d.w_left, d.w_right);
        case AcceleratorSpec::Kind::multiplicative:
          return AcceleratorSpec::multiplicative(AcceleratorSpec::anderson(d.depth, d.damping),
                                                 *d.inner, d.iter_n);
      }
    } catch (const ConfigError& e) {
      throw SpecParseError(e.what(), d.start);
    }
    fail("unreachable");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

std::string format_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, ptr);
}

std::string damping_options(const DampingPolicy& p) {
  std::string out;
  if (p.kind == DampingKind::constant) out += ";beta=" + format_number(p.beta);
  if (p.kind == DampingKind::optimized) {
    if (p.eta != 0.1 || p.safeguard != Safeguard::off) out += ";eta=" + format_number(p.eta);
    if (p.safeguard == Safeguard::floor) out += ";guard=floor";
    if (p.safeguard == Safeguard::reflect) out += ";guard=reflect";
  }
  return out;
}

std::string anderson_head(const AcceleratorSpec& s) {
  return (s.damping().kind == DampingKind::optimized ? "AAoptD(" : "AA(") +
         std::to_string(s.depth());
}

}  // namespace

AcceleratorSpec parse_spec(std::string_view text) { return Parser(text).parse_all(); }

std::string render_spec(const AcceleratorSpec& spec) {
  switch (spec.kind()) {
    case AcceleratorSpec::Kind::picard:
      return "picard";
    case AcceleratorSpec::Kind::anderson:
      return anderson_head(spec) + ")" + damping_options(spec.damping());
    case AcceleratorSpec::Kind::additive: {
      std::string out = "ADD(" + render_spec(spec.left()) + "," + render_spec(spec.right());
      if (spec.w_left() != 0.5 || spec.w_right() != 0.5) {
        out += "," + format_number(spec.w_left()) + "," + format_number(spec.w_right());
      }
      return out + ")";
    }
    case AcceleratorSpec::Kind::multiplicative: {
      const AcceleratorSpec& outer = spec.outer();
      std::string out = anderson_head(outer) + "," + render_spec(spec.inner()) + ")" +
                        damping_options(outer.damping());
      if (spec.iter_n() != 1) out += ";iterN=" + std::to_string(spec.iter_n());
      return out;
    }
  }
  return {};
}

}  // namespace anderkit
