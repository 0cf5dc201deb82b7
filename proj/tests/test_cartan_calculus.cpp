#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <functional>
#include <random>

#include "algebroid/cartan_calculus.hpp"
#include "algebroid/linalg.hpp"

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

AlgebroidPtr so3() {
  auto chart = make_chart({"t"}, {{-1.0, 1.0}});
  auto zero = ScalarField::constant(chart, 0.0);
  auto one = ScalarField::constant(chart, 1.0);
  std::vector<std::vector<ScalarField>> anchor(3, {zero});
  LieAlgebroid::StructureMap st;
  st[{0, 1}] = {zero, zero, one};
  st[{1, 2}] = {one, zero, zero};
  st[{0, 2}] = {zero, -one, zero};
  return std::make_shared<const LieAlgebroid>(
      chart, std::vector<std::string>{"e1", "e2", "e3"}, anchor, st);
}

AlgebroidPtr heisenberg() {
  auto chart = xy_chart();
  auto zero = ScalarField::constant(chart, 0.0);
  auto one = ScalarField::constant(chart, 1.0);
  std::vector<std::vector<ScalarField>> anchor = {
      {one, zero}, {zero, one}, {zero, zero}};
  LieAlgebroid::StructureMap st;
  st[{0, 1}] = {zero, zero, one};
  return std::make_shared<const LieAlgebroid>(
      chart, std::vector<std::string>{"e1", "e2", "e3"}, anchor, st);
}

Section random_section(const AlgebroidPtr& A, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> c(-2.0, 2.0);
  std::vector<ScalarField> comps;
  const auto chart = A->chart();
  for (int a = 0; a < A->rank(); ++a) {
    ScalarField f = ScalarField::constant(chart, c(rng));
    for (int i = 0; i < A->dim(); ++i)
      f = f + c(rng) * ScalarField::variable(chart, i);
    comps.push_back(f);
  }
  return Section(std::move(comps));
}

AlgebroidForm random_form(const AlgebroidPtr& A, int degree,
                          std::mt19937_64& rng) {
  std::uniform_real_distribution<double> c(-2.0, 2.0);
  const auto chart = A->chart();
  AlgebroidForm a(chart, A->rank(), degree);
  std::vector<int> idx(degree);
  std::function<void(int, int)> rec = [&](int pos, int lo) {
    if (pos == degree) {
      ScalarField f = ScalarField::constant(chart, c(rng)) +
                      c(rng) * ScalarField::variable(chart, 0) +
                      c(rng) * sin(ScalarField::variable(chart, chart->dim() - 1));
      a.add(idx, f);
      return;
    }
    for (int i = lo; i < A->rank(); ++i) {
      idx[pos] = i;
      rec(pos + 1, i + 1);
    }
  };
  rec(0, 0);
  return a;
}

bool forms_equal_at(const AlgebroidForm& a, const AlgebroidForm& b,
                    const std::vector<Point>& pts, double tol) {
  AlgebroidForm d = a - b;
  for (const auto& p : pts)
    if (form_abs_at(d, p) > tol) return false;
  return true;
}

}  // namespace

TEST_CASE("antisymmetric coefficient storage") {
  auto A = heisenberg();
  auto chart = A->chart();
  AlgebroidForm w(chart, 3, 2);
  w.add({1, 0}, ScalarField::constant(chart, 1.0));
  Point p = pt(0.5, -0.5);
  CHECK(w.coeff({0, 1})(p) == doctest::Approx(-1.0));
  CHECK(w.component({1, 0})(p) == doctest::Approx(1.0));
  CHECK(w.component({0, 1})(p) == doctest::Approx(-1.0));
  CHECK(w.component({1, 1}).is_zero());
  CHECK_THROWS_AS(w.add({0, 0}, ScalarField::constant(chart, 2.0)),
                  ShapeError);

  Eigen::MatrixXd W = w.matrix_at(p);
  CHECK(W(1, 0) == doctest::Approx(1.0));
  CHECK(W(0, 1) == doctest::Approx(-1.0));
  CHECK((W + W.transpose()).norm() <= 1e-14);
}

TEST_CASE("wedge of one-forms is the shuffle determinant") {
  auto A = heisenberg();
  auto chart = A->chart();
  std::mt19937_64 rng(kDefaultSeed + 21);
  SamplePlan plan;
  plan.count = 12;
  for (int trial = 0; trial < 20; ++trial) {
    AlgebroidForm a = random_form(A, 1, rng);
    AlgebroidForm b = random_form(A, 1, rng);
    AlgebroidForm ab = wedge(a, b);
    plan.seed = kDefaultSeed + trial;
    std::uniform_real_distribution<double> c(-1.0, 1.0);
    for (const auto& p : sample_points(*chart, plan)) {
      Eigen::VectorXd u(3), v(3);
      for (int i = 0; i < 3; ++i) {
        u[i] = c(rng);
        v[i] = c(rng);
      }
      // (a ^ b)(u, v) = a(u) b(v) - a(v) b(u)
      double oracle = a.evaluate(p, {u}) * b.evaluate(p, {v}) -
                      a.evaluate(p, {v}) * b.evaluate(p, {u});
      CHECK(ab.evaluate(p, {u, v}) == doctest::Approx(oracle).epsilon(1e-10));
    }
  }
}

TEST_CASE("wedge is graded commutative and associative") {
  auto A = heisenberg();
  std::mt19937_64 rng(kDefaultSeed + 22);
  SamplePlan plan;
  plan.count = 8;
  auto pts = sample_points(*A->chart(), plan);
  for (int trial = 0; trial < 10; ++trial) {
    AlgebroidForm a = random_form(A, 1, rng);
    AlgebroidForm b = random_form(A, 1, rng);
    AlgebroidForm w2 = random_form(A, 2, rng);
    CHECK(forms_equal_at(wedge(a, b), (-1.0) * wedge(b, a), pts, 1e-10));
    CHECK(forms_equal_at(wedge(a, w2), wedge(w2, a), pts, 1e-10));
    CHECK(forms_equal_at(wedge(wedge(a, b), a), wedge(a, wedge(b, a)), pts,
                         1e-10));
  }
}

TEST_CASE("interior product is a graded derivation") {
  auto A = heisenberg();
  std::mt19937_64 rng(kDefaultSeed + 23);
  SamplePlan plan;
  plan.count = 8;
  auto pts = sample_points(*A->chart(), plan);
  for (int trial = 0; trial < 10; ++trial) {
    Section s = random_section(A, rng);
    AlgebroidForm a = random_form(A, 1, rng);
    AlgebroidForm b = random_form(A, 2, rng);
    // i_s(a ^ b) = (i_s a) b - a ^ (i_s b)
    AlgebroidForm lhs = interior_product(s, wedge(a, b));
    AlgebroidForm rhs = wedge(interior_product(s, a), b) -
                        wedge(a, interior_product(s, b));
    CHECK(forms_equal_at(lhs, rhs, pts, 1e-10));
    // pairing with degree 1 via apply
    CHECK(std::abs(interior_product(s, a).coeff({})(pts[0]) -
                   a.apply(s)(pts[0])) <= 1e-12);
  }
}

TEST_CASE("exterior derivative of a function on the tangent algebroid") {
  auto chart = xy_chart();
  auto TM = tangent_algebroid(chart);
  AlgebroidForm f(chart, 2, 0);
  f.add({}, ScalarField::parse("x^2 * y", chart));
  AlgebroidForm df = exterior_derivative(*TM, f);
  Point p = pt(1.5, -0.5);
  CHECK(df.coeff({0})(p) == doctest::Approx(2 * 1.5 * -0.5));
  CHECK(df.coeff({1})(p) == doctest::Approx(1.5 * 1.5));
}

TEST_CASE("chevalley-eilenberg differential of so(3)") {
  auto A = so3();
  auto chart = A->chart();
  // d e^3 (e1, e2) = -C^3_{12} = -1
  AlgebroidForm e3(chart, 3, 1);
  e3.add({2}, ScalarField::constant(chart, 1.0));
  AlgebroidForm de3 = exterior_derivative(*A, e3);
  Point p(1);
  p << 0.0;
  CHECK(de3.coeff({0, 1})(p) == doctest::Approx(-1.0));
  CHECK(de3.coeff({0, 2})(p) == doctest::Approx(0.0));
  CHECK(de3.coeff({1, 2})(p) == doctest::Approx(0.0));
}

TEST_CASE("d squared vanishes") {
  for (auto A : {so3(), heisenberg()}) {
    std::mt19937_64 rng(kDefaultSeed + 24);
    SamplePlan plan;
    auto pts = sample_points(*A->chart(), plan);
    for (int degree : {0, 1}) {
      for (int trial = 0; trial < 10; ++trial) {
        AlgebroidForm a = random_form(A, degree, rng);
        AlgebroidForm dda =
            exterior_derivative(*A, exterior_derivative(*A, a));
        for (const auto& p : pts) CHECK(form_abs_at(dda, p) <= 1e-9);
      }
    }
  }
}

TEST_CASE("d is a graded derivation for the wedge") {
  auto A = heisenberg();
  std::mt19937_64 rng(kDefaultSeed + 25);
  SamplePlan plan;
  plan.count = 16;
  auto pts = sample_points(*A->chart(), plan);
  for (int trial = 0; trial < 10; ++trial) {
    AlgebroidForm a = random_form(A, 1, rng);
    AlgebroidForm b = random_form(A, 1, rng);
    AlgebroidForm lhs = exterior_derivative(*A, wedge(a, b));
    AlgebroidForm rhs = wedge(exterior_derivative(*A, a), b) -
                        wedge(a, exterior_derivative(*A, b));
    CHECK(forms_equal_at(lhs, rhs, pts, 1e-9));
  }
}

TEST_CASE("cartan identities") {
  auto A = heisenberg();
  std::mt19937_64 rng(kDefaultSeed + 26);
  SamplePlan plan;
  plan.count = 8;
  auto pts = sample_points(*A->chart(), plan);
  for (int trial = 0; trial < 6; ++trial) {
    Section S = random_section(A, rng);
    Section T = random_section(A, rng);
    AlgebroidForm a = random_form(A, 2, rng);

    // i_[S,T] = L_S i_T - i_T L_S
    AlgebroidForm lhs1 = interior_product(A->bracket(S, T), a);
    AlgebroidForm rhs1 = lie_derivative(*A, S, interior_product(T, a)) -
                         interior_product(T, lie_derivative(*A, S, a));
    CHECK(forms_equal_at(lhs1, rhs1, pts, 1e-8));

    // L_[S,T] = L_S L_T - L_T L_S
    AlgebroidForm lhs2 = lie_derivative(*A, A->bracket(S, T), a);
    AlgebroidForm rhs2 =
        lie_derivative(*A, S, lie_derivative(*A, T, a)) -
        lie_derivative(*A, T, lie_derivative(*A, S, a));
    CHECK(forms_equal_at(lhs2, rhs2, pts, 1e-8));

    // L_S d = d L_S
    AlgebroidForm b = random_form(A, 1, rng);
    AlgebroidForm lhs3 = lie_derivative(*A, S, exterior_derivative(*A, b));
    AlgebroidForm rhs3 = exterior_derivative(*A, lie_derivative(*A, S, b));
    CHECK(forms_equal_at(lhs3, rhs3, pts, 1e-8));
  }
}

TEST_CASE("lie derivative of a top form") {
  auto A = so3();
  auto chart = A->chart();
  AlgebroidForm vol(chart, 3, 3);
  vol.add({0, 1, 2}, ScalarField::constant(chart, 1.0));
  // unimodular structure constants: L_{e_a} vol = 0
  for (int a = 0; a < 3; ++a) {
    AlgebroidForm lv = lie_derivative(*A, A->frame_section(a), vol);
    Point p(1);
    p << 0.3;
    CHECK(form_abs_at(lv, p) <= 1e-12);
  }
}

TEST_CASE("pullback commutes with d and wedge") {
  auto chart = xy_chart();
  auto uv = make_chart({"u", "v"}, {{-1.0, 1.0}, {-1.0, 1.0}});
  auto TMs = tangent_algebroid(uv);
  auto TMt = tangent_algebroid(chart);

  // phi(u,v) = (u + sin(v)/4, v + u^2/8), unit-triangular-ish Jacobian,
  // a diffeomorphism onto its image with d(phi) as the fiber map
  AlgebroidMorphism phi;
  phi.source = TMs;
  phi.target = TMt;
  phi.base_map = {ScalarField::parse("u + 0.25*sin(v)", uv),
                  ScalarField::parse("v + 0.125*u^2", uv)};
  phi.fiber_map = SymMatrix(2, std::vector<ScalarField>(2));
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      phi.fiber_map[i][j] = phi.base_map[i].derivative(j);
  CHECK(check_morphism(phi, SamplePlan{}, kDefaultTolerance).pass());

  std::mt19937_64 rng(kDefaultSeed + 27);
  SamplePlan plan;
  plan.count = 16;
  auto pts = sample_points(*uv, plan);
  for (int trial = 0; trial < 8; ++trial) {
    AlgebroidForm a = random_form(TMt, 1, rng);
    AlgebroidForm b = random_form(TMt, 1, rng);
    // pullback of d equals d of pullback
    AlgebroidForm lhs = pullback(phi, exterior_derivative(*TMt, a));
    AlgebroidForm rhs = exterior_derivative(*TMs, pullback(phi, a));
    CHECK(forms_equal_at(lhs, rhs, pts, 1e-9));
    // pullback of a wedge equals the wedge of pullbacks
    CHECK(forms_equal_at(pullback(phi, wedge(a, b)),
                         wedge(pullback(phi, a), pullback(phi, b)), pts,
                         1e-9));
  }

  // pullback of a function composes with the base map
  AlgebroidForm f(chart, 2, 0);
  f.add({}, ScalarField::parse("x*y", chart));
  AlgebroidForm pf = pullback(phi, f);
  Point q(2);
  q << 0.5, -0.25;
  double x = 0.5 + 0.25 * std::sin(-0.25), y = -0.25 + 0.125 * 0.25;
  CHECK(pf.coeff({})(q) == doctest::Approx(x * y));
}
