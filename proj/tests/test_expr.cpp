#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <functional>
#include <numbers>
#include <random>

#include "gravcheck/expr.hpp"
#include "gravcheck/tape.hpp"

using namespace gravcheck;

namespace {

// Central-difference oracle with one Richardson step, swept over step sizes;
// the most stable pair of estimates wins. Independent of the symbolic path.
double fd_derivative(const std::function<double(double)>& f, double x,
                     int order) {
  auto stencil = [&](double h) {
    switch (order) {
      case 1: return (f(x + h) - f(x - h)) / (2 * h);
      case 2: return (f(x + h) - 2 * f(x) + f(x - h)) / (h * h);
      default:  // third derivative
        return (f(x + 2 * h) - 2 * f(x + h) + 2 * f(x - h) - f(x - 2 * h)) /
               (2 * h * h * h);
    }
  };
  double best = 0.0, best_err = 1e300;
  double h0 = order == 1 ? 1e-4 : 1e-2;
  for (double h = h0; h > h0 * 1e-2; h /= 2) {
    double d1 = stencil(h), d2 = stencil(h / 2);
    double rich = (4 * d2 - d1) / 3;
    double err = std::fabs(d2 - d1);
    if (err < best_err) {
      best_err = err;
      best = rich;
    }
  }
  return best;
}

double eval1(const ScalarField& f, const std::string& sym, double v) {
  Bindings b;
  b.values[sym] = v;
  return evaluate(f, b);
}

}  // namespace

TEST_CASE("parser basics") {
  auto one = parse_expression("1", {}, {});
  Bindings empty;
  CHECK(evaluate(one, empty) == 1.0);

  auto s = parse_expression("sqrt(1-2*M/r)", {"t", "r", "theta", "phi"}, {"M"});
  Bindings b;
  b.values["r"] = 4.0;
  b.values["M"] = 1.0;
  CHECK(evaluate(s, b) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));

  CHECK(evaluate(parse_expression("2^3^2", {}, {}), empty) == 512.0);
  // '^' binds tighter than unary minus
  CHECK(evaluate(parse_expression("-2^2", {}, {}), empty) == -4.0);
  CHECK(evaluate(parse_expression("(-2)^2", {}, {}), empty) == 4.0);
  CHECK(evaluate(parse_expression("2^-2", {}, {}), empty) == 0.25);
  CHECK(evaluate(parse_expression("2*3+4", {}, {}), empty) == 10.0);
  CHECK(evaluate(parse_expression("2+3*4", {}, {}), empty) == 14.0);
  CHECK(evaluate(parse_expression("8/4/2", {}, {}), empty) == 1.0);
  CHECK(evaluate(parse_expression("1e-2", {}, {}), empty) == 0.01);
}

TEST_CASE("parser errors carry positions") {
  CHECK_THROWS_AS(parse_expression("2*", {}, {}), ParseError);
  try {
    parse_expression("2*", {}, {});
  } catch (const ParseError& e) {
    CHECK(e.position() == 2);
  }
  CHECK_THROWS_AS(parse_expression("x+1", {}, {}), ParseError);  // unknown ident
  CHECK_THROWS_AS(parse_expression("foo(2)", {}, {}), ParseError);
  CHECK_THROWS_AS(parse_expression("sin + 2", {"sin_x"}, {}), ParseError);
  CHECK_THROWS_AS(parse_expression("(1+2", {}, {}), ParseError);
  CHECK_THROWS_AS(parse_expression("1 2", {}, {}), ParseError);
}

TEST_CASE("differentiation examples") {
  auto f = parse_expression("x^2*y", {"x", "y"}, {});
  auto fx = differentiate(f, "x");
  Bindings b;
  b.values["x"] = 3.0;
  b.values["y"] = 5.0;
  CHECK(evaluate(fx, b) == doctest::Approx(30.0).epsilon(1e-15));

  auto g = parse_expression("sqrt(1-2*M/r)", {"r"}, {"M"});
  auto gr = differentiate(g, "r");
  auto closed = parse_expression("(M/r^2)*(1-2*M/r)^(-0.5)", {"r"}, {"M"});
  Bindings c;
  c.values["r"] = 5.0;
  c.values["M"] = 1.0;
  CHECK(evaluate(gr, c) == doctest::Approx(evaluate(closed, c)).epsilon(1e-14));
}

TEST_CASE("third derivative of t^(2/3) against finite differences") {
  auto f = parse_expression("t^(2/3)", {"t"}, {});
  auto d3 = differentiate(differentiate(differentiate(f, "t"), "t"), "t");
  auto func = [&](double t) { return eval1(f, "t", t); };
  double oracle = fd_derivative(func, 1.0, 3);
  double symbolic = eval1(d3, "t", 1.0);
  // frozen from the oracle; analytically (2/3)(-1/3)(-4/3) = 8/27
  CHECK(symbolic == doctest::Approx(8.0 / 27.0).epsilon(1e-12));
  CHECK(symbolic == doctest::Approx(oracle).epsilon(1e-6));
}

TEST_CASE("derivatives match finite differences on random expressions") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> uni(-0.8, 0.8);
  for (int rep = 0; rep < 20; ++rep) {
    double a = uni(rng), b2 = uni(rng), c = uni(rng);
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "%.6f*x^3 + %.6f*sin(2*x) + %.6f*exp(x/2) + cos(x)*x", a, b2,
                  c);
    auto f = parse_expression(buf, {"x"}, {});
    auto fx = differentiate(f, "x");
    double x0 = uni(rng);
    auto func = [&](double x) { return eval1(f, "x", x); };
    double fd = fd_derivative(func, x0, 1);
    double sym = eval1(fx, "x", x0);
    CHECK(std::fabs(sym - fd) / (1.0 + std::fabs(fd)) < 1e-7);
  }
}

TEST_CASE("mixed partials commute numerically") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  auto f = parse_expression("sin(x*y) + x^3*y^2 + exp(x/3)*cos(y)",
                            {"x", "y"}, {});
  auto fxy = differentiate(differentiate(f, "x"), "y");
  auto fyx = differentiate(differentiate(f, "y"), "x");
  for (int i = 0; i < 50; ++i) {
    Bindings b;
    b.values["x"] = uni(rng);
    b.values["y"] = uni(rng);
    double a = evaluate(fxy, b), c = evaluate(fyx, b);
    CHECK(std::fabs(a - c) / (1.0 + std::fabs(a)) < 1e-10);
  }
}

TEST_CASE("evaluation examples and domain errors") {
  Bindings b;
  b.values["theta"] = std::numbers::pi / 2;
  CHECK(evaluate(parse_expression("sin(theta)", {"theta"}, {}), b) ==
        doctest::Approx(1.0).epsilon(1e-15));

  auto pole = parse_expression("1/(1-2*M/r)", {"r"}, {"M"});
  Bindings h;
  h.values["r"] = 2.0;
  h.values["M"] = 1.0;
  CHECK_THROWS_AS(evaluate(pole, h), EvalError);

  Bindings e;
  CHECK_THROWS_AS(evaluate(parse_expression("sqrt(0-1)", {}, {}), e), EvalError);
  CHECK_THROWS_AS(evaluate(parse_expression("log(0-3)", {}, {}), e), EvalError);
  CHECK_THROWS_AS(evaluate(parse_expression("exp(1000)", {}, {}), e), EvalError);
  // integer and non-integer power semantics
  CHECK(evaluate(parse_expression("(0-2)^3", {}, {}), e) == -8.0);
  CHECK_THROWS_AS(evaluate(parse_expression("(0-2)^0.5", {}, {}), e), EvalError);
  CHECK_THROWS_AS(evaluate(parse_expression("0^-1", {}, {}), e), EvalError);
  try {
    evaluate(parse_expression("sqrt(0-1)", {}, {}), e);
  } catch (const EvalError& err) {
    CHECK(err.subexpression().find("sqrt") != std::string::npos);
  }
}

TEST_CASE("print-parse round trip preserves evaluation") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> uni(-1.2, 1.2);
  auto f = parse_expression(
      "-x^2 + 3.5*sin(x*y)/(1+y^2) - exp(-x)*cosh(y) + 2^x", {"x", "y"}, {});
  auto g = parse_expression(f.str(), {"x", "y"}, {});
  for (int i = 0; i < 100; ++i) {
    Bindings b;
    b.values["x"] = uni(rng);
    b.values["y"] = uni(rng);
    CHECK(evaluate(f, b) == evaluate(g, b));
  }
}

TEST_CASE("tape evaluation agrees bit-for-bit with direct evaluation") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  auto f = parse_expression(
      "sin(x*y)*exp(x/4) - y^3/(2+x^2) + sqrt(4+x) + tanh(y)", {"x", "y"}, {});
  auto fx = differentiate(f, "x");
  auto fxy = differentiate(fx, "y");
  std::vector<ScalarField> roots{f, fx, fxy};
  Tape tape(roots, {"x", "y"});
  std::vector<double> scratch;
  for (int i = 0; i < 50; ++i) {
    double inputs[2] = {uni(rng), uni(rng)};
    double out[3];
    tape.evaluate(std::span<const double>(inputs, 2), scratch,
                  std::span<double>(out, 3));
    Bindings b;
    b.values["x"] = inputs[0];
    b.values["y"] = inputs[1];
    CHECK(out[0] == evaluate(f, b));
    CHECK(out[1] == evaluate(fx, b));
    CHECK(out[2] == evaluate(fxy, b));
  }
  // common-subexpression elimination actually shrinks the program
  Tape single(std::vector<ScalarField>{fxy}, {"x", "y"});
  CHECK(tape.size() < single.size() + 3 * 40);
}

TEST_CASE("tape reports domain faults with the offending subexpression") {
  auto f = parse_expression("1/(x-1)", {"x"}, {});
  Tape tape(std::vector<ScalarField>{f}, {"x"});
  std::vector<double> scratch;
  double in = 1.0, out;
  CHECK_THROWS_AS(tape.evaluate(std::span<const double>(&in, 1), scratch,
                                std::span<double>(&out, 1)),
                  EvalError);
}

TEST_CASE("evaluation is deterministic") {
  auto f = parse_expression("sin(x)*exp(x) + x^5/(3+x)", {"x"}, {});
  Bindings b;
  b.values["x"] = 0.7363563;
  double v1 = evaluate(f, b);
  double v2 = evaluate(f, b);
  CHECK(std::memcmp(&v1, &v2, sizeof v1) == 0);
}
