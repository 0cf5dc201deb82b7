#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "algebroid/contact.hpp"

using namespace algebroid;

namespace {

ChartPtr xy_chart() {
  return make_chart({"x", "y"}, {{-2.0, 2.0}, {-2.0, 2.0}});
}

ChartPtr xyz_chart() {
  return make_chart({"x", "y", "z"},
                    {{-2.0, 2.0}, {-2.0, 2.0}, {-2.0, 2.0}});
}

Point pt2(double x, double y) {
  Point p(2);
  p << x, y;
  return p;
}

Point pt3(double x, double y, double z) {
  Point p(3);
  p << x, y, z;
  return p;
}

struct ContactFixture {
  AlgebroidPtr A;
  AlgebroidForm eta;
};

// Heisenberg algebroid over R^2: rho(e1) = d/dx, rho(e2) = d/dy,
// rho(e3) = 0, [e1, e2] = e3; eta = e^3 so d eta(e1, e2) = -1.
ContactFixture heisenberg_contact() {
  auto chart = xy_chart();
  auto zero = ScalarField::constant(chart, 0.0);
  auto one = ScalarField::constant(chart, 1.0);
  std::vector<std::vector<ScalarField>> anchor = {
      {one, zero}, {zero, one}, {zero, zero}};
  LieAlgebroid::StructureMap st;
  st[{0, 1}] = {zero, zero, one};
  auto A = std::make_shared<const LieAlgebroid>(
      chart, std::vector<std::string>{"e1", "e2", "e3"}, anchor, st);
  AlgebroidForm eta(chart, 3, 1);
  eta.add({2}, one);
  return {A, eta};
}

// T R^3 with eta = dz - y dx; d eta = dx ^ dy, Reeb = d/dz with
// nonvanishing anchor.
ContactFixture tr3_contact() {
  auto chart = xyz_chart();
  auto A = tangent_algebroid(chart);
  AlgebroidForm eta(chart, 3, 1);
  eta.add({2}, ScalarField::constant(chart, 1.0));
  eta.add({0}, -1.0 * ScalarField::variable(chart, 1));
  return {A, eta};
}

// Heisenberg with the frame relabeled so the zero-anchor direction comes
// first: rho(e1) = 0, [e2, e3] = e1, eta = e^1.
ContactFixture relabeled_contact() {
  auto chart = xy_chart();
  auto zero = ScalarField::constant(chart, 0.0);
  auto one = ScalarField::constant(chart, 1.0);
  std::vector<std::vector<ScalarField>> anchor = {
      {zero, zero}, {one, zero}, {zero, one}};
  LieAlgebroid::StructureMap st;
  st[{1, 2}] = {one, zero, zero};
  auto A = std::make_shared<const LieAlgebroid>(
      chart, std::vector<std::string>{"f1", "f2", "f3"}, anchor, st);
  AlgebroidForm eta(chart, 3, 1);
  eta.add({0}, one);
  return {A, eta};
}

AlmostContactStructure heisenberg_acs(const ContactFixture& fix) {
  auto chart = fix.A->chart();
  auto zero = ScalarField::constant(chart, 0.0);
  auto one = ScalarField::constant(chart, 1.0);
  SymMatrix phi = sym_zero_matrix(chart, 3, 3);
  phi[1][0] = one;         // phi(e1) = e2
  phi[0][1] = -1.0 * one;  // phi(e2) = -e1
  Section xi({zero, zero, one});
  return AlmostContactStructure{phi, xi, fix.eta, identity_metric(chart, 3)};
}

PointFn coordinate_fn(const ChartPtr& chart, int i) {
  return point_fn(ScalarField::variable(chart, i));
}

}  // namespace

TEST_CASE("contact condition on the Heisenberg fixture") {
  auto fix = heisenberg_contact();
  AlgebroidForm deta = exterior_derivative(*fix.A, fix.eta);
  CHECK(deta.coeff({0, 1})(pt2(0.3, -0.7)) == doctest::Approx(-1.0));
  auto report = check_contact(*fix.A, fix.eta, SamplePlan{}, 1e-8);
  CHECK(report.pass());
}

TEST_CASE("contact condition on T R^3 with eta = dz - y dx") {
  auto fix = tr3_contact();
  AlgebroidForm deta = exterior_derivative(*fix.A, fix.eta);
  AlgebroidForm top = wedge(fix.eta, deta);
  CHECK(top.coeff({0, 1, 2})(pt3(0.5, -1.0, 0.25)) == doctest::Approx(1.0));
  CHECK(check_contact(*fix.A, fix.eta, SamplePlan{}, 1e-8).pass());
}

TEST_CASE("abelian T R^3 with eta = dz is not contact") {
  auto chart = xyz_chart();
  auto A = tangent_algebroid(chart);
  AlgebroidForm eta(chart, 3, 1);
  eta.add({2}, ScalarField::constant(chart, 1.0));
  auto report = check_contact(*A, eta, SamplePlan{}, 1e-8);
  CHECK_FALSE(report.pass());
}

TEST_CASE("even rank is rejected") {
  auto chart = xy_chart();
  auto A = tangent_algebroid(chart);
  AlgebroidForm eta(chart, 2, 1);
  eta.add({0}, ScalarField::constant(chart, 1.0));
  CHECK_THROWS_AS(check_contact(*A, eta, SamplePlan{}, 1e-8), ShapeError);
}

TEST_CASE("Reeb sections") {
  auto heis = heisenberg_contact();
  auto pts = sample_points(*heis.A->chart(), SamplePlan{});
  for (const auto& p : pts) {
    Eigen::VectorXd xi = reeb_section_at(*heis.A, heis.eta, p);
    CHECK(xi.isApprox(Eigen::Vector3d(0, 0, 1), 1e-10));
    CHECK((heis.A->anchor_at(p) * xi).norm() <= 1e-12);
  }

  auto tr3 = tr3_contact();
  Eigen::VectorXd xi = reeb_section_at(*tr3.A, tr3.eta, pt3(0.4, 1.1, -0.2));
  CHECK(xi.isApprox(Eigen::Vector3d(0, 0, 1), 1e-10));

  // scaling eta rescales the Reeb section inversely
  AlgebroidForm two_eta = 2.0 * heis.eta;
  Eigen::VectorXd half =
      reeb_section_at(*heis.A, two_eta, pt2(-0.6, 0.9));
  CHECK(half.isApprox(Eigen::Vector3d(0, 0, 0.5), 1e-10));
}

TEST_CASE("Reeb defining residuals at samples") {
  for (const auto& fix : {heisenberg_contact(), tr3_contact()}) {
    AlgebroidForm deta = exterior_derivative(*fix.A, fix.eta);
    auto pts = sample_points(*fix.A->chart(), SamplePlan{});
    for (const auto& p : pts) {
      Eigen::VectorXd xi = reeb_section_at(*fix.A, fix.eta, p);
      Eigen::VectorXd eta_row = Eigen::VectorXd::Zero(3);
      for (const auto& [idx, f] : fix.eta.coeffs()) eta_row[idx[0]] = f(p);
      CHECK(std::abs(eta_row.dot(xi) - 1.0) <= 1e-10);
      CHECK((deta.matrix_at(p).transpose() * xi).norm() <= 1e-10);
    }
  }
}

TEST_CASE("contact Hamiltonian sections on the Heisenberg fixture") {
  auto fix = heisenberg_contact();
  auto chart = fix.A->chart();
  Point p = pt2(0.7, -0.3);

  auto hx = contact_hamiltonian_section_at(*fix.A, fix.eta,
                                           coordinate_fn(chart, 0), p);
  CHECK(hx.a.isApprox(Eigen::Vector3d(0, 1, 0), 1e-12));
  CHECK(hx.h == doctest::Approx(0.0));

  auto hy = contact_hamiltonian_section_at(*fix.A, fix.eta,
                                           coordinate_fn(chart, 1), p);
  CHECK(hy.a.isApprox(Eigen::Vector3d(-1, 0, 0), 1e-12));

  auto hc = contact_hamiltonian_section_at(
      *fix.A, fix.eta, point_fn(ScalarField::constant(chart, 3.5)), p);
  CHECK(hc.a.norm() <= 1e-12);
  CHECK(hc.h == doctest::Approx(0.0));
}

TEST_CASE("contact Hamiltonian section on T R^3, f = z") {
  auto fix = tr3_contact();
  Point p = pt3(0.2, 0.8, -0.5);
  auto hz = contact_hamiltonian_section_at(*fix.A, fix.eta,
                                           coordinate_fn(fix.A->chart(), 2), p);
  // df = dz = eta + y dx and y dx = i_{-y d/dy}(dx ^ dy)
  CHECK(hz.a.isApprox(Eigen::Vector3d(0, -0.8, 0), 1e-12));
  CHECK(hz.h == doctest::Approx(1.0));
}

TEST_CASE("eta(a_f) vanishes and h = rho(xi).f for random polynomials") {
  std::mt19937_64 rng(2026);
  std::uniform_real_distribution<double> c(-1.5, 1.5);
  for (const auto& fix : {heisenberg_contact(), tr3_contact()}) {
    auto chart = fix.A->chart();
    const int m = chart->dim();
    auto pts = sample_points(*chart, SamplePlan{});
    for (int trial = 0; trial < 5; ++trial) {
      ScalarField f = ScalarField::constant(chart, c(rng));
      for (int i = 0; i < m; ++i)
        for (int j = i; j < m; ++j)
          f = f + c(rng) * ScalarField::variable(chart, i) *
                      ScalarField::variable(chart, j);
      PointFn pf = point_fn(f);
      for (const auto& p : pts) {
        auto ham = contact_hamiltonian_section_at(*fix.A, fix.eta, pf, p);
        double eta_a = 0.0;
        for (const auto& [idx, g] : fix.eta.coeffs())
          eta_a += g(p) * ham.a[idx[0]];
        CHECK(std::abs(eta_a) <= 1e-10);
        Eigen::VectorXd xi = reeb_section_at(*fix.A, fix.eta, p);
        double rho_xi_f = pf.gradient(p).dot(fix.A->anchor_at(p) * xi);
        CHECK(std::abs(ham.h - rho_xi_f) <= 1e-10);
      }
    }
  }
}

TEST_CASE("Hamiltonian jacobian matches finite differences") {
  auto fix = tr3_contact();
  auto chart = fix.A->chart();
  ScalarField f = ScalarField::variable(chart, 0) *
                      ScalarField::variable(chart, 0) *
                      ScalarField::variable(chart, 1) +
                  ScalarField::variable(chart, 2);
  PointFn pf = point_fn(f);
  Point p = pt3(0.3, -0.6, 0.9);
  Eigen::MatrixXd J = contact_hamiltonian_jacobian_at(*fix.A, fix.eta, pf, p);
  const double eps = 1e-6;
  for (int i = 0; i < 3; ++i) {
    Point pp = p, pm = p;
    pp[i] += eps;
    pm[i] -= eps;
    Eigen::VectorXd fd =
        (contact_hamiltonian_section_at(*fix.A, fix.eta, pf, pp).a -
         contact_hamiltonian_section_at(*fix.A, fix.eta, pf, pm).a) /
        (2.0 * eps);
    CHECK((J.col(i) - fd).norm() <= 1e-6);
  }
}

TEST_CASE("contact Poisson bracket values") {
  auto fix = heisenberg_contact();
  auto chart = fix.A->chart();
  PointFn fx = coordinate_fn(chart, 0);
  PointFn fy = coordinate_fn(chart, 1);
  auto br = contact_poisson_bracket(fix.A, fix.eta, fx, fy);
  auto self = contact_poisson_bracket(fix.A, fix.eta, fx, fx);
  ScalarField x2 =
      ScalarField::variable(chart, 0) * ScalarField::variable(chart, 0);
  auto brq = contact_poisson_bracket(fix.A, fix.eta, point_fn(x2), fy);
  for (const auto& p : sample_points(*chart, SamplePlan{})) {
    CHECK(br.value(p) == doctest::Approx(-1.0));
    CHECK(self.value(p) == doctest::Approx(0.0));
    CHECK(brq.value(p) == doctest::Approx(-2.0 * p[0]));
  }
}

TEST_CASE("two pivotings agree: a_f well defined") {
  // the cross-check is internal; a disagreement throws
  auto fix = tr3_contact();
  auto chart = fix.A->chart();
  ScalarField f = ScalarField::variable(chart, 0) *
                      ScalarField::variable(chart, 1) +
                  2.0 * ScalarField::variable(chart, 2);
  for (const auto& p : sample_points(*chart, SamplePlan{}))
    CHECK_NOTHROW(contact_hamiltonian_section_at(*fix.A, fix.eta,
                                                 point_fn(f), p));
}

TEST_CASE("Poisson theorem holds when rho(xi) = 0") {
  auto fix = heisenberg_contact();
  auto report = check_contact_poisson_theorem(fix.A, fix.eta, SamplePlan{},
                                              1e-8);
  CHECK(report.pass());
  CHECK(report.flags().empty());
  CHECK(report.max_residual("bracket_antisymmetric") <= 1e-10);
  CHECK(report.max_residual("agreement_rho_ag_f") <= 1e-8);
  CHECK(report.max_residual("agreement_rho_af_g") <= 1e-8);
}

TEST_CASE("Poisson theorem hypothesis flag when rho(xi) != 0") {
  auto fix = tr3_contact();
  auto report = check_contact_poisson_theorem(fix.A, fix.eta, SamplePlan{},
                                              1e-8);
  CHECK(report.has_flag_containing("rho(xi) nonzero"));
  // antisymmetry and the three-way agreement hold regardless
  CHECK(report.pass());
}

TEST_CASE("Poisson theorem on the relabeled abelian-fiber fixture") {
  auto fix = relabeled_contact();
  CHECK(check_contact(*fix.A, fix.eta, SamplePlan{}, 1e-8).pass());
  auto report = check_contact_poisson_theorem(fix.A, fix.eta, SamplePlan{},
                                              1e-8);
  CHECK(report.pass());
  CHECK(report.flags().empty());
}

TEST_CASE("bracket of Hamiltonian sections projects to a Hamiltonian") {
  // with this module's orientation, [a_f, a_g] - eta([a_f, a_g]) xi is the
  // Hamiltonian section of {g, f} (see docs/conventions.md)
  auto fix = heisenberg_contact();
  auto chart = fix.A->chart();
  auto zero = ScalarField::constant(chart, 0.0);
  ScalarField x = ScalarField::variable(chart, 0);

  // f = x^2, g = y: a_f = 2x e2, a_g = -e1 (verified elsewhere)
  Section af({zero, 2.0 * x, zero});
  Section ag({-1.0 * ScalarField::constant(chart, 1.0), zero, zero});
  Section br = fix.A->bracket(af, ag);
  Section projected = br - fix.eta.apply(br) * fix.A->frame_section(2);

  PointFn gf = contact_poisson_bracket(fix.A, fix.eta,
                                       coordinate_fn(chart, 1),
                                       point_fn(x * x));
  for (const auto& p : sample_points(*chart, SamplePlan{})) {
    Eigen::VectorXd expect =
        contact_hamiltonian_section_at(*fix.A, fix.eta, gf, p).a;
    CHECK((projected.at(p) - expect).norm() <= 1e-10);
  }
}

TEST_CASE("almost contact structure on the Heisenberg fixture") {
  auto fix = heisenberg_contact();
  auto acs = heisenberg_acs(fix);
  auto report = check_almost_contact(fix.A, acs, SamplePlan{}, 1e-8);
  CHECK(report.pass());
  CHECK(report.max_residual("eta_xi_is_one") <= 1e-12);
  CHECK(report.max_residual("phi_squared_identity") <= 1e-12);
  CHECK(report.max_residual("metric_compatibility") <= 1e-12);
  // the Riemannian identity promotes the structure: xi must be the Reeb
  CHECK(report.max_residual("xi_is_reeb") <= 1e-10);
  CHECK_FALSE(report.has_flag_containing("contradiction"));
}

TEST_CASE("almost contact negative controls") {
  auto fix = heisenberg_contact();

  auto bad_phi = heisenberg_acs(fix);
  bad_phi.phi[0][2] = ScalarField::constant(fix.A->chart(), 1.0);
  auto r1 = check_almost_contact(fix.A, bad_phi, SamplePlan{}, 1e-8);
  CHECK_FALSE(r1.pass());
  CHECK(r1.max_residual("phi_squared_identity") > 0.5);

  auto bad_xi = heisenberg_acs(fix);
  bad_xi.xi = 2.0 * bad_xi.xi;
  auto r2 = check_almost_contact(fix.A, bad_xi, SamplePlan{}, 1e-8);
  CHECK_FALSE(r2.pass());
  CHECK(r2.max_residual("eta_xi_is_one") > 0.5);
}

TEST_CASE("base symplectic structure from the Heisenberg fixture") {
  auto fix = heisenberg_contact();
  auto acs = heisenberg_acs(fix);
  auto result = induce_base_symplectic(fix.A, acs, SamplePlan{}, 1e-8);
  CHECK(result.report.pass());

  Point p = pt2(0.4, -0.9);
  CHECK(result.omega_M[0][1](p) == doctest::Approx(-1.0));
  CHECK(result.omega_M[1][0](p) == doctest::Approx(1.0));
  Eigen::MatrixXd JM = sym_eval(result.J_M, p);
  Eigen::Matrix2d expect;
  expect << 0, -1, 1, 0;
  CHECK(JM.isApprox(expect, 1e-12));
  CHECK(sym_eval(result.g_M, p).isApprox(Eigen::Matrix2d::Identity(), 1e-12));
  CHECK(result.report.max_residual("D_splitting") <= 1e-10);
  CHECK(result.report.max_residual("poisson_coincidence") <= 1e-9);
}

TEST_CASE("base symplectic structure on the product fixture") {
  // Heisenberg plus one abelian zero-anchor direction inside the kernel;
  // phi extended by zero on it
  auto chart = xy_chart();
  auto zero = ScalarField::constant(chart, 0.0);
  auto one = ScalarField::constant(chart, 1.0);
  std::vector<std::vector<ScalarField>> anchor = {
      {one, zero}, {zero, one}, {zero, zero}, {zero, zero}};
  LieAlgebroid::StructureMap st;
  st[{0, 1}] = {zero, zero, one, zero};
  auto A = std::make_shared<const LieAlgebroid>(
      chart, std::vector<std::string>{"e1", "e2", "e3", "e4"}, anchor, st);
  AlgebroidForm eta(chart, 4, 1);
  eta.add({2}, one);
  SymMatrix phi = sym_zero_matrix(chart, 4, 4);
  phi[1][0] = one;
  phi[0][1] = -1.0 * one;
  Section xi({zero, zero, one, zero});
  AlmostContactStructure acs{phi, xi, eta, identity_metric(chart, 4)};

  auto result = induce_base_symplectic(A, acs, SamplePlan{}, 1e-8);
  CHECK(result.report.pass());
  Point p = pt2(-0.3, 0.6);
  CHECK(result.omega_M[0][1](p) == doctest::Approx(-1.0));
}

TEST_CASE("phi must preserve the kernel") {
  auto fix = heisenberg_contact();
  auto acs = heisenberg_acs(fix);
  acs.phi[0][2] = ScalarField::constant(fix.A->chart(), 1.0);  // phi(e3)=e1
  CHECK_THROWS_AS(induce_base_symplectic(fix.A, acs, SamplePlan{}, 1e-8),
                  PreconditionError);
}

TEST_CASE("D-splitting pairs horizontal and kernel blocks trivially") {
  auto fix = heisenberg_contact();
  AlgebroidForm deta = exterior_derivative(*fix.A, fix.eta);
  Splitting lam = splitting_from_metric(*fix.A, identity_metric(fix.A->chart(), 3),
                                        SamplePlan{}, 1e-8);
  for (const auto& p : sample_points(*fix.A->chart(), SamplePlan{})) {
    Eigen::MatrixXd H = sym_eval(lam.lambda, p);
    Eigen::MatrixXd K = kernel_basis_at(*fix.A, p);
    CHECK((H.transpose() * deta.matrix_at(p) * K).norm() <= 1e-10);
  }
}
