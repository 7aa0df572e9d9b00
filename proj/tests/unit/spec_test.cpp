#include "anderkit/spec.hpp"

#include "doctest.h"

using namespace anderkit;

TEST_CASE("parse plain terms") {
  CHECK(parse_spec("picard").kind() == AcceleratorSpec::Kind::picard);

  const AcceleratorSpec aa = parse_spec("AA(20)");
  CHECK(aa.kind() == AcceleratorSpec::Kind::anderson);
  CHECK(aa.depth() == 20);
  CHECK(aa.damping().kind == DampingKind::none);

  const AcceleratorSpec opt = parse_spec("AAoptD(5)");
  CHECK(opt.damping().kind == DampingKind::optimized);
  CHECK(opt.damping().safeguard == Safeguard::off);
  CHECK(opt.damping().eta == 0.1);
}

TEST_CASE("parse compositions") {
  const AcceleratorSpec m = parse_spec("AAoptD(20,AA(1))");
  CHECK(m.kind() == AcceleratorSpec::Kind::multiplicative);
  CHECK(m.outer() == AcceleratorSpec::anderson(20, DampingPolicy::optimized()));
  CHECK(m.inner() == AcceleratorSpec::anderson(1));
  CHECK(m.iter_n() == 1);

  const AcceleratorSpec a = parse_spec("ADD(AA(20),AAoptD(1))");
  CHECK(a.kind() == AcceleratorSpec::Kind::additive);
  CHECK(a.w_left() == 0.5);
  CHECK(a.w_right() == 0.5);
  CHECK(a.right().damping().kind == DampingKind::optimized);

  const AcceleratorSpec w = parse_spec("ADD(AA(5), picard, 0.75, 0.25)");
  CHECK(w.w_left() == 0.75);
  CHECK(w.right().kind() == AcceleratorSpec::Kind::picard);
}

TEST_CASE("parse options") {
  CHECK(parse_spec("AA(3);beta=0.5").damping() == DampingPolicy::constant(0.5));
  CHECK(parse_spec("AAoptD(3);eta=0.2;guard=floor").damping() ==
        DampingPolicy::optimized(Safeguard::floor, 0.2));
  CHECK(parse_spec("AAoptD(3);guard=reflect").damping().safeguard == Safeguard::reflect);
  CHECK(parse_spec("AA(2,AA(1));iterN=3").iter_n() == 3);
  // Options on a multiplicative term configure its outer solver.
  CHECK(parse_spec("AA(2,AA(1));beta=0.5").outer().damping().beta == 0.5);
  CHECK(parse_spec("AA(2,AAoptD(1);guard=floor)").inner().damping().safeguard == Safeguard::floor);
}

TEST_CASE("parse errors carry a position") {
  const auto position_of = [](const char* text) -> std::size_t {
    try {
      parse_spec(text);
    } catch (const SpecParseError& e) {
      return e.position();
    }
    FAIL("no error for " << text);
    return 0;
  };
  CHECK(position_of("AA(20") == 5);
  CHECK(position_of("PICARD") == 0);
  CHECK(position_of("picard,AA(1)") == 6);
  CHECK(position_of("AA(x)") == 3);
  CHECK(position_of("AA(1);iterN=2") == 6);
  CHECK_THROWS_AS(parse_spec(""), SpecParseError);
  CHECK_THROWS_AS(parse_spec("AA(-1)"), SpecParseError);
  CHECK_THROWS_AS(parse_spec("AA(3);eta=0.2"), SpecParseError);
  CHECK_THROWS_AS(parse_spec("AAoptD(3);beta=0.5"), SpecParseError);
  CHECK_THROWS_AS(parse_spec("AA(3);beta=2"), SpecParseError);
  CHECK_THROWS_AS(parse_spec("AAoptD(3);eta=0.6"), SpecParseError);
  CHECK_THROWS_AS(parse_spec("AAoptD(3);guard=sideways"), SpecParseError);
  CHECK_THROWS_AS(parse_spec("ADD(AA(1),AA(2),0.7,0.2)"), SpecParseError);
  CHECK_THROWS_AS(parse_spec("ADD(AA(1),AA(2));beta=0.5"), SpecParseError);
}

TEST_CASE("factory validation") {
  CHECK_THROWS_AS(AcceleratorSpec::anderson(-1), ConfigError);
  CHECK_THROWS_AS(
      AcceleratorSpec::additive(AcceleratorSpec::picard(), AcceleratorSpec::picard(), 0.6, 0.6),
      ConfigError);
  CHECK_THROWS_AS(
      AcceleratorSpec::multiplicative(AcceleratorSpec::picard(), AcceleratorSpec::anderson(1)),
      ConfigError);
  CHECK_THROWS_AS(AcceleratorSpec::multiplicative(AcceleratorSpec::anderson(1),
                                                  AcceleratorSpec::picard(), -1),
                  ConfigError);
}

TEST_CASE("render is canonical and round-trips") {
  const char* matrix[] = {
      "picard",
      "AA(0)",
      "AA(20)",
      "AA(50)",
      "AAoptD(20)",
      "AA(5);beta=0.5",
      "AAoptD(5);eta=0.2;guard=floor",
      "AAoptD(5);eta=0.1;guard=reflect",
      "AA(20,AA(1))",
      "AAoptD(20,AA(1))",
      "AA(1,AAoptD(1))",
      "AAoptD(5,AAoptD(1))",
      "AA(20,AA(1));iterN=2",
      "AA(2,picard);iterN=0",
      "ADD(AA(20),AA(1))",
      "ADD(AA(5),AAoptD(1),0.7,0.3)",
      "ADD(AAoptD(5),AA(1))",
      "ADD(AA(3,AA(1)),ADD(picard,AA(2)))",
      "AA(4,ADD(AA(1),picard));beta=0.25;iterN=3",
  };
  for (const char* text : matrix) {
    CAPTURE(text);
    const AcceleratorSpec s = parse_spec(text);
    CHECK(render_spec(s) == text);
    CHECK(parse_spec(render_spec(s)) == s);
  }
  CHECK(render_spec(parse_spec(" ADD( AA(2) , AA(1) , 0.5 , 0.5 ) ")) == "ADD(AA(2),AA(1))");
}

TEST_CASE("composite detection") {
  CHECK_FALSE(is_composite(parse_spec("AA(3)")));
  CHECK_FALSE(is_composite(parse_spec("picard")));
  CHECK(is_composite(parse_spec("AA(3,AA(1))")));
  CHECK(is_composite(parse_spec("ADD(AA(3),AA(1))")));
}
