#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "algebroid/report.hpp"
#include "algebroid/scalar_field.hpp"

using namespace algebroid;

namespace {

ChartPtr xy_chart() {
  return make_chart({"x", "y"}, {{-2.0, 2.0}, {-2.0, 2.0}});
}

Point pt(double x, double y) {
  Point p(2);
  p << x, y;
  return p;
}

// Grammar-driven random expression generator, depth-bounded. Denominators
// are drawn pole-free (constant >= 1 plus a square).
ScalarField random_expr(const ChartPtr& chart, std::mt19937_64& rng,
                        int depth) {
  std::uniform_int_distribution<int> kind(0, depth <= 0 ? 1 : 9);
  std::uniform_real_distribution<double> cval(-2.0, 2.0);
  std::uniform_int_distribution<int> var(0, chart->dim() - 1);
  switch (kind(rng)) {
    case 0:
      return ScalarField::constant(chart, cval(rng));
    case 1:
      return ScalarField::variable(chart, var(rng));
    case 2:
      return random_expr(chart, rng, depth - 1) +
             random_expr(chart, rng, depth - 1);
    case 3:
      return random_expr(chart, rng, depth - 1) -
             random_expr(chart, rng, depth - 1);
    case 4:
      return random_expr(chart, rng, depth - 1) *
             random_expr(chart, rng, depth - 1);
    case 5: {
      ScalarField den =
          pow(ScalarField::variable(chart, var(rng)), 2) +
          (1.0 + std::abs(cval(rng)));
      return random_expr(chart, rng, depth - 1) / den;
    }
    case 6:
      return pow(random_expr(chart, rng, depth - 1),
                 std::uniform_int_distribution<int>(2, 3)(rng));
    case 7:
      return sin(random_expr(chart, rng, depth - 1));
    case 8:
      return cos(random_expr(chart, rng, depth - 1));
    default:
      return -random_expr(chart, rng, depth - 1);
  }
}

double central_diff(const ScalarField& f, const Point& p, int i, double h) {
  Point a = p, b = p;
  a[i] += h;
  b[i] -= h;
  return (f(a) - f(b)) / (2 * h);
}

}  // namespace

TEST_CASE("parse basic expressions") {
  auto chart = xy_chart();
  auto f = ScalarField::parse("x*y + sin(x)", chart);
  CHECK(f(pt(1.0, 0.0)) == doctest::Approx(std::sin(1.0)));
  CHECK(f(pt(2.0, 3.0)) == doctest::Approx(6.0 + std::sin(2.0)));
  // sum(product(x,y), sin(x)): 6 nodes total
  CHECK(f.node_count() == 6);

  auto one = ScalarField::parse("1", chart);
  CHECK(one.is_constant());
  CHECK(one(pt(0.3, -1.0)) == 1.0);

  // "x^2 - -y" == x^2 + y by the grammar's precedence rules
  auto g = ScalarField::parse("x^2 - -y", chart);
  auto oracle = pow(ScalarField::variable(chart, 0), 2) +
                ScalarField::variable(chart, 1);
  for (double x : {-1.5, 0.25, 2.0})
    for (double y : {-0.5, 1.0})
      CHECK(g(pt(x, y)) == doctest::Approx(oracle(pt(x, y))).epsilon(1e-15));
}

TEST_CASE("parse errors carry byte offsets") {
  auto chart = xy_chart();
  CHECK_THROWS_AS(ScalarField::parse("x +", chart), ParseError);
  CHECK_THROWS_AS(ScalarField::parse("x + z", chart), ParseError);
  CHECK_THROWS_AS(ScalarField::parse("sin(x", chart), ParseError);
  try {
    ScalarField::parse("x + z", chart);
  } catch (const ParseError& e) {
    CHECK(e.offset() == 4);
  }
}

TEST_CASE("evaluation") {
  auto chart = xy_chart();
  CHECK(ScalarField::parse("x*y", chart)(pt(1, 0)) == 0.0);
  CHECK(ScalarField::parse("x^2", chart)(pt(3, 7)) == 9.0);
  // platform sine, cross-checked against a 10-term Taylor series
  double taylor = 0.0, term = 1.0;
  for (int k = 0; k < 10; ++k) {
    term = (k == 0) ? 1.0 : -term / ((2 * k) * (2 * k + 1));
    taylor += term;
  }
  CHECK(std::abs(taylor - std::sin(1.0)) < 1e-12);
  CHECK(ScalarField::parse("sin(x)", chart)(pt(1, 0)) ==
        doctest::Approx(taylor).epsilon(1e-12));
}

TEST_CASE("division by near zero is signalled") {
  auto chart = xy_chart();
  auto f = ScalarField::parse("1/x", chart);
  CHECK_THROWS_AS(f(pt(1e-13, 0)), DivisionByNearZero);
  CHECK(f(pt(2, 0)) == doctest::Approx(0.5));
}

TEST_CASE("symbolic differentiation examples") {
  auto chart = xy_chart();
  auto f = ScalarField::parse("x^2", chart).derivative(0);
  CHECK(f(pt(3, 0)) == doctest::Approx(6.0));
  auto g = ScalarField::parse("x", chart).derivative(1);
  CHECK(g.is_zero());
  auto h = ScalarField::parse("sin(x)*y", chart).derivative(0);
  CHECK(h(pt(0, 2)) == doctest::Approx(2.0));
}

TEST_CASE("derivative matches central finite differences on random trees") {
  auto chart = xy_chart();
  std::mt19937_64 rng(kDefaultSeed);
  SamplePlan plan;
  plan.count = 20;
  int checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    ScalarField f = random_expr(chart, rng, 6);
    std::vector<ScalarField> df = {f.derivative(0), f.derivative(1)};
    plan.seed = kDefaultSeed + trial;
    auto pts = sample_points(*chart, plan);
    for (const auto& p : pts) {
      for (int i = 0; i < 2; ++i) {
        double sym, fd;
        try {
          sym = df[i](p);
          fd = central_diff(f, p, i, 1e-5);
        } catch (const DivisionByNearZero&) {
          continue;  // pole rejection
        }
        if (std::abs(fd) > 1e6) continue;  // finite differences unreliable
        CHECK(std::abs(sym - fd) <= 1e-6 * (1.0 + std::abs(sym)) + 1e-4 * std::abs(sym));
        ++checked;
      }
    }
  }
  CHECK(checked > 2000);
}

TEST_CASE("print-parse round trip is the identity on trees") {
  auto chart = xy_chart();
  std::mt19937_64 rng(kDefaultSeed + 1);
  for (int trial = 0; trial < 300; ++trial) {
    ScalarField f = random_expr(chart, rng, 5);
    ScalarField g = ScalarField::parse(f.str(), chart);
    CHECK(f.same_tree(g));
    // and so do derivatives, which exercise printer shapes parsers rarely see
    ScalarField d = f.derivative(trial % 2);
    CHECK(d.same_tree(ScalarField::parse(d.str(), chart)));
  }
}

TEST_CASE("sum and product rules hold pointwise") {
  auto chart = xy_chart();
  std::mt19937_64 rng(kDefaultSeed + 2);
  SamplePlan plan;
  plan.count = 10;
  for (int trial = 0; trial < 50; ++trial) {
    ScalarField f = random_expr(chart, rng, 4);
    ScalarField g = random_expr(chart, rng, 4);
    ScalarField lhs_sum = (f + g).derivative(0) - (f.derivative(0) + g.derivative(0));
    ScalarField lhs_prod =
        (f * g).derivative(0) - (f.derivative(0) * g + f * g.derivative(0));
    plan.seed = kDefaultSeed + 100 + trial;
    for (const auto& p : sample_points(*chart, plan)) {
      try {
        CHECK(std::abs(lhs_sum(p)) <= 1e-12);
        CHECK(std::abs(lhs_prod(p)) <= 1e-12 * (1.0 + std::abs((f * g)(p))));
      } catch (const DivisionByNearZero&) {
      }
    }
  }
}

TEST_CASE("compose substitutes variables") {
  auto chart = xy_chart();
  auto uv = make_chart({"u", "v"}, {{-1.0, 1.0}, {-1.0, 1.0}});
  auto f = ScalarField::parse("x^2 + y", chart);
  auto gx = ScalarField::parse("u + v", uv);
  auto gy = ScalarField::parse("u*v", uv);
  auto h = f.compose({gx, gy});
  Point p(2);
  p << 0.5, -0.25;
  CHECK(h(p) == doctest::Approx(std::pow(0.25, 2) + (-0.125)));
  CHECK(h.chart() == uv);
}

TEST_CASE("charts validate their invariants") {
  CHECK_THROWS_AS(make_chart({"x", "x"}, {{0, 1}, {0, 1}}), ShapeError);
  CHECK_THROWS_AS(make_chart({"x"}, {{1, 0}}), ShapeError);
  auto chart = xy_chart();
  CHECK_THROWS_AS(ScalarField::variable(chart, 5), ShapeError);
}
