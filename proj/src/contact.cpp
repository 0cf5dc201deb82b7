#include "algebroid/contact.hpp"

#include <cmath>
#include <limits>
#include <random>

namespace algebroid {

namespace {

// eta as a numeric covector in the frame at p.
Eigen::VectorXd eta_row_at(const AlgebroidForm& eta, const Point& p) {
  Eigen::VectorXd row = Eigen::VectorXd::Zero(eta.rank());
  for (const auto& [idx, f] : eta.coeffs()) row[idx[0]] = f(p);
  return row;
}

Eigen::VectorXd frame_differential_at(const LieAlgebroid& A, const PointFn& f,
                                      const Point& p) {
  if (!f.gradient) throw PreconditionError("function gradient unavailable");
  return A.anchor_at(p).transpose() * f.gradient(p);
}

// Augmented square system for (S, h): rows b give
// sum_a S^a d eta(a,b) + h eta_b = df_b, the last row is the gauge
// constraint c . S = 0 fixing the k xi ambiguity.
struct AugmentedSolve {
  Eigen::VectorXd S;
  double h;
};

AugmentedSolve solve_hamiltonian(const Eigen::MatrixXd& Wd,
                                 const Eigen::VectorXd& eta_row,
                                 const Eigen::VectorXd& df,
                                 const Eigen::VectorXd& constraint) {
  const int n = static_cast<int>(eta_row.size());
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n + 1, n + 1);
  M.topLeftCorner(n, n) = Wd.transpose();
  M.col(n).head(n) = eta_row;
  M.row(n).head(n) = constraint.transpose();
  Eigen::VectorXd rhs(n + 1);
  rhs.head(n) = df;
  rhs[n] = 0.0;
  // minimum-norm least squares tolerates a d-eta radical (directions that
  // pair to zero and carry no eta weight); consistency is asserted
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(M);
  Eigen::VectorXd z = cod.solve(rhs);
  if ((M * z - rhs).norm() > 1e-10)
    throw PreconditionError(
        "contact Hamiltonian system inconsistent at the point");
  return {z.head(n), z[n]};
}

}  // namespace

ValidationReport check_contact(const LieAlgebroid& A, const AlgebroidForm& eta,
                               const SamplePlan& plan, double tol) {
  const int n = A.rank();
  if (n % 2 == 0) throw ShapeError("contact algebroids must have odd rank");
  const int half = (n - 1) / 2;
  ValidationReport report(tol);

  AlgebroidForm deta = exterior_derivative(A, eta);
  AlgebroidForm top = wedge(eta, wedge_power(deta, half));

  auto pts = sample_points(*A.chart(), plan,
                           [&](const Point& p) { return A.finite_at(p); });
  double min_top = std::numeric_limits<double>::infinity();
  double min_det = std::numeric_limits<double>::infinity();
  Point worst_top = pts[0], worst_det = pts[0];
  for (const auto& p : pts) {
    double t = form_abs_at(top, p);
    if (t < min_top) {
      min_top = t;
      worst_top = p;
    }
    // d eta restricted to D = ker eta
    Eigen::VectorXd row = eta_row_at(eta, p);
    Eigen::MatrixXd D = nullspace(row.transpose().eval(), kDefaultRankTolerance);
    Eigen::MatrixXd WD = D.transpose() * deta.matrix_at(p) * D;
    double d = std::abs(WD.determinant());
    if (d < min_det) {
      min_det = d;
      worst_det = p;
    }
  }
  report.add_bool_check("eta_wedge_deta_nonvanishing", min_top > tol);
  report.add_info("min_top_coefficient", min_top, worst_top);
  report.add_bool_check("deta_nondegenerate_on_D", min_det > tol);
  report.add_info("min_deta_D_det", min_det, worst_det);
  return report;
}

Eigen::VectorXd reeb_section_at(const LieAlgebroid& A,
                                const AlgebroidForm& eta, const Point& p) {
  const int n = A.rank();
  AlgebroidForm deta = exterior_derivative(A, eta);
  Eigen::MatrixXd M(n + 1, n);
  M.row(0) = eta_row_at(eta, p).transpose();
  // i_xi d eta = 0: d eta(xi, e_b) = 0 for all b
  M.bottomRows(n) = deta.matrix_at(p).transpose();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + 1);
  rhs[0] = 1.0;
  Eigen::VectorXd xi = M.colPivHouseholderQr().solve(rhs);
  if ((M * xi - rhs).norm() > 1e-10)
    throw PreconditionError("Reeb system inconsistent: not contact at point");
  return xi;
}

ContactHamiltonian contact_hamiltonian_section_at(const LieAlgebroid& A,
                                                  const AlgebroidForm& eta,
                                                  const PointFn& f,
                                                  const Point& p) {
  AlgebroidForm deta = exterior_derivative(A, eta);
  Eigen::MatrixXd Wd = deta.matrix_at(p);
  Eigen::VectorXd row = eta_row_at(eta, p);
  Eigen::VectorXd df = frame_differential_at(A, f, p);
  Eigen::VectorXd xi = reeb_section_at(A, eta, p);

  // two gauge rows: eta(S) = 0, then S . xi = 0; the projected a_f must agree
  AugmentedSolve s1 = solve_hamiltonian(Wd, row, df, row);
  AugmentedSolve s2 = solve_hamiltonian(Wd, row, df, xi);
  Eigen::VectorXd a1 = s1.S - row.dot(s1.S) * xi;
  Eigen::VectorXd a2 = s2.S - row.dot(s2.S) * xi;
  if ((a1 - a2).norm() > 1e-10)
    throw PreconditionError(
        "contact Hamiltonian section is pivot dependent at the point");
  // h = rho(xi) . f is forced by i_xi d eta = 0
  if (std::abs(s1.h - df.dot(xi)) > 1e-8)
    throw PreconditionError("h != rho(xi) . f at the point");
  return {a1, s1.h};
}

Eigen::MatrixXd contact_hamiltonian_jacobian_at(const LieAlgebroid& A,
                                                const AlgebroidForm& eta,
                                                const PointFn& f,
                                                const Point& p) {
  if (!f.hessian) throw PreconditionError("function hessian unavailable");
  const int n = A.rank();
  const int m = A.dim();
  AlgebroidForm deta = exterior_derivative(A, eta);
  Eigen::MatrixXd Wd = deta.matrix_at(p);
  Eigen::VectorXd row = eta_row_at(eta, p);
  Eigen::VectorXd df = frame_differential_at(A, f, p);

  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n + 1, n + 1);
  M.topLeftCorner(n, n) = Wd.transpose();
  M.col(n).head(n) = row;
  M.row(n).head(n) = row.transpose();
  Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
  if (!lu.isInvertible())
    throw PreconditionError(
        "jacobian needs a nondegenerate augmented system");
  Eigen::VectorXd rhs(n + 1);
  rhs.head(n) = df;
  rhs[n] = 0.0;
  Eigen::VectorXd z = lu.solve(rhs);

  Eigen::VectorXd grad = f.gradient(p);
  Eigen::MatrixXd hess = f.hessian(p);
  Eigen::MatrixXd R = A.anchor_at(p);

  // with the eta(S) = 0 gauge the solution S is a_f itself
  Eigen::MatrixXd out(n, m);
  for (int i = 0; i < m; ++i) {
    Eigen::MatrixXd dM = Eigen::MatrixXd::Zero(n + 1, n + 1);
    for (const auto& [idx, g] : deta.coeffs()) {
      double v = g.derivative(i)(p);
      dM(idx[1], idx[0]) = v;  // Wd^T block
      dM(idx[0], idx[1]) = -v;
    }
    for (const auto& [idx, g] : eta.coeffs()) {
      double v = g.derivative(i)(p);
      dM(idx[0], n) = v;
      dM(n, idx[0]) = v;
    }
    Eigen::VectorXd drhs(n + 1);
    for (int b = 0; b < n; ++b) {
      double v = 0.0;
      for (int j = 0; j < m; ++j)
        v += A.anchor_entry(b, j).derivative(i)(p) * grad[j] +
             R(j, b) * hess(i, j);
      drhs[b] = v;
    }
    drhs[n] = 0.0;
    out.col(i) = lu.solve(drhs - dM * z).head(n);
  }
  return out;
}

PointFn contact_poisson_bracket(const AlgebroidPtr& A,
                                const AlgebroidForm& eta, const PointFn& f,
                                const PointFn& g) {
  auto Aptr = A;
  auto et = std::make_shared<AlgebroidForm>(eta);
  auto deta = std::make_shared<AlgebroidForm>(exterior_derivative(*A, eta));
  PointFn out;
  out.value = [Aptr, et, deta, f, g](const Point& p) {
    Eigen::VectorXd af = contact_hamiltonian_section_at(*Aptr, *et, f, p).a;
    Eigen::VectorXd ag = contact_hamiltonian_section_at(*Aptr, *et, g, p).a;
    return af.dot(deta->matrix_at(p) * ag);
  };
  out.gradient = [Aptr, et, deta, f, g](const Point& p) {
    const int m = Aptr->dim();
    Eigen::VectorXd af = contact_hamiltonian_section_at(*Aptr, *et, f, p).a;
    Eigen::VectorXd ag = contact_hamiltonian_section_at(*Aptr, *et, g, p).a;
    Eigen::MatrixXd daf = contact_hamiltonian_jacobian_at(*Aptr, *et, f, p);
    Eigen::MatrixXd dag = contact_hamiltonian_jacobian_at(*Aptr, *et, g, p);
    Eigen::MatrixXd Wd = deta->matrix_at(p);
    Eigen::VectorXd grad(m);
    for (int i = 0; i < m; ++i) {
      Eigen::MatrixXd dWd = Eigen::MatrixXd::Zero(Wd.rows(), Wd.cols());
      for (const auto& [idx, h] : deta->coeffs()) {
        double v = h.derivative(i)(p);
        dWd(idx[0], idx[1]) = v;
        dWd(idx[1], idx[0]) = -v;
      }
      grad[i] = daf.col(i).dot(Wd * ag) + af.dot(dWd * ag) +
                af.dot(Wd * dag.col(i));
    }
    return grad;
  };
  return out;
}

ValidationReport check_contact_poisson_theorem(const AlgebroidPtr& A,
                                               const AlgebroidForm& eta,
                                               const SamplePlan& plan,
                                               double tol) {
  ValidationReport report(tol);
  const auto chart = A->chart();
  const int m = A->dim();
  AlgebroidForm deta = exterior_derivative(*A, eta);
  auto pts = sample_points(*chart, plan,
                           [&](const Point& p) { return A->finite_at(p); });

  ResidualMax rho_xi;
  for (const auto& p : pts) {
    Eigen::VectorXd xi = reeb_section_at(*A, eta, p);
    rho_xi.update((A->anchor_at(p) * xi).norm(), p);
  }
  report.add_info("reeb_anchor_norm", rho_xi.value, rho_xi.at);
  const bool hypothesis = rho_xi.value <= tol;
  if (!hypothesis)
    report.add_flag("rho(xi) nonzero: Poisson laws recorded, not asserted");

  std::mt19937_64 rng(plan.seed + 101);
  std::uniform_real_distribution<double> c(-1.5, 1.5);
  auto random_poly = [&]() {
    ScalarField f = ScalarField::constant(chart, c(rng));
    for (int i = 0; i < m; ++i) {
      f = f + c(rng) * ScalarField::variable(chart, i);
      for (int j = i; j < m; ++j)
        f = f + c(rng) * ScalarField::variable(chart, i) *
                    ScalarField::variable(chart, j);
    }
    return f;
  };

  ResidualMax anti, leib, agree_g, agree_f, jacobi;
  for (int trial = 0; trial < 20; ++trial) {
    ScalarField f = random_poly();
    ScalarField g = random_poly();
    ScalarField h = random_poly();
    PointFn pf = point_fn(f), pg = point_fn(g), ph = point_fn(h);
    auto fg = contact_poisson_bracket(A, eta, pf, pg);
    auto gf = contact_poisson_bracket(A, eta, pg, pf);
    auto gh = contact_poisson_bracket(A, eta, pg, ph);
    auto fh = contact_poisson_bracket(A, eta, pf, ph);
    auto fg_h = contact_poisson_bracket(A, eta, point_fn(f * g), ph);
    auto f_gh = contact_poisson_bracket(A, eta, pf, gh);
    auto hf = contact_poisson_bracket(A, eta, ph, pf);
    auto g_hf = contact_poisson_bracket(A, eta, pg, hf);
    auto h_fg = contact_poisson_bracket(A, eta, ph, fg);
    for (const auto& p : pts) {
      anti.update(std::abs(fg.value(p) + gf.value(p)), p);
      leib.update(std::abs(fg_h.value(p) - f(p) * gh.value(p) -
                           g(p) * fh.value(p)),
                  p);
      Eigen::VectorXd af = contact_hamiltonian_section_at(*A, eta, pf, p).a;
      Eigen::VectorXd ag = contact_hamiltonian_section_at(*A, eta, pg, p).a;
      double v = fg.value(p);
      agree_g.update(
          std::abs(v - pf.gradient(p).dot(A->anchor_at(p) * ag)), p);
      agree_f.update(
          std::abs(v + pg.gradient(p).dot(A->anchor_at(p) * af)), p);
      jacobi.update(
          std::abs(f_gh.value(p) + g_hf.value(p) + h_fg.value(p)), p);
    }
  }
  report.add_check("bracket_antisymmetric", anti);
  report.add_check("agreement_rho_ag_f", agree_g);
  report.add_check("agreement_rho_af_g", agree_f);
  if (hypothesis) {
    report.add_check("leibniz_rule", leib);
    // nested brackets accumulate roundoff: a looser bound than tol
    report.add_bool_check("jacobi_identity", jacobi.value <= 1e-6);
    report.add_info("jacobi_residual", jacobi.value, jacobi.at);
  } else {
    report.add_info("leibniz_residual", leib.value, leib.at);
    report.add_info("jacobi_residual", jacobi.value, jacobi.at);
  }
  return report;
}

ValidationReport check_almost_contact(const AlgebroidPtr& A,
                                      const AlmostContactStructure& acs,
                                      const SamplePlan& plan, double tol) {
  ValidationReport report(tol);
  const int n = A->rank();
  AlgebroidForm deta = exterior_derivative(*A, acs.eta);
  auto pts = sample_points(*A->chart(), plan,
                           [&](const Point& p) { return A->finite_at(p); });

  ResidualMax unit, sq, metric, riem;
  const bool has_g = acs.g.has_value();
  for (const auto& p : pts) {
    Eigen::VectorXd row = eta_row_at(acs.eta, p);
    Eigen::VectorXd xi = acs.xi.at(p);
    Eigen::MatrixXd Phi = sym_eval(acs.phi, p);
    unit.update(std::abs(row.dot(xi) - 1.0), p);
    // phi^2 = -id + xi (x) eta
    sq.update((Phi * Phi + Eigen::MatrixXd::Identity(n, n) -
               xi * row.transpose())
                  .norm(),
              p);
    if (has_g) {
      Eigen::MatrixXd G = acs.g->at(p);
      metric.update(
          (Phi.transpose() * G * Phi - G + row * row.transpose()).norm(), p);
      riem.update((deta.matrix_at(p) - G * Phi).norm(), p);
    }
  }
  report.add_check("eta_xi_is_one", unit);
  report.add_check("phi_squared_identity", sq);
  if (has_g) {
    report.add_check("metric_compatibility", metric);
    report.add_info("riemannian_identity", riem.value, riem.at);
    if (riem.value <= tol) {
      // contact Riemannian: xi must be the Reeb section
      ResidualMax reeb;
      for (const auto& p : pts) {
        try {
          reeb.update((reeb_section_at(*A, acs.eta, p) - acs.xi.at(p)).norm(),
                      p);
        } catch (const PreconditionError&) {
          reeb.update(1.0, p);
        }
      }
      report.add_check("xi_is_reeb", reeb);
    }
  }

  // kernel lemmas (contact hypothesis gated)
  bool contact = true;
  try {
    contact = check_contact(*A, acs.eta, plan, tol).pass();
  } catch (const ShapeError&) {
    contact = false;
  }
  if (contact) {
    bool lemma1 = true;
    bool lemma2 = true;
    for (const auto& p : pts) {
      Eigen::MatrixXd K = kernel_basis_at(*A, p);
      if (K.cols() == 0) continue;
      Eigen::VectorXd row = eta_row_at(acs.eta, p);
      // L_p inside ker eta forces L_p = 0
      if ((row.transpose() * K).norm() <= tol) lemma1 = false;
      // phi(L_p) inside L_p forces rho(xi_p) = 0
      Eigen::MatrixXd PhiK = sym_eval(acs.phi, p) * K;
      bool preserves = (PhiK - K * (K.transpose() * PhiK)).norm() <= tol;
      if (preserves &&
          (A->anchor_at(p) * acs.xi.at(p)).norm() > tol)
        lemma2 = false;
    }
    report.add_bool_check("kernel_eta_lemma", lemma1);
    report.add_bool_check("kernel_phi_lemma", lemma2);
    if (!lemma1 || !lemma2)
      report.add_flag("kernel lemma contradiction: implementation suspect");
  } else {
    report.add_flag("contact hypothesis fails: kernel lemmas skipped");
  }
  return report;
}

BaseSymplecticResult induce_base_symplectic(const AlgebroidPtr& A,
                                            const AlmostContactStructure& acs,
                                            const SamplePlan& plan,
                                            double tol) {
  if (!acs.g)
    throw PreconditionError("base construction needs a bundle metric");
  const int m = A->dim();
  ValidationReport report(tol);
  auto pts = sample_points(*A->chart(), plan,
                           [&](const Point& p) { return A->finite_at(p); });

  // phi must preserve the kernel at samples
  for (const auto& p : pts) {
    Eigen::MatrixXd K = kernel_basis_at(*A, p);
    if (K.cols() == 0) continue;
    Eigen::MatrixXd PhiK = sym_eval(acs.phi, p) * K;
    if ((PhiK - K * (K.transpose() * PhiK)).norm() > tol)
      throw PreconditionError("phi does not preserve the kernel");
  }

  Splitting lam = splitting_from_metric(*A, *acs.g, plan, tol);
  AlgebroidForm deta = exterior_derivative(*A, acs.eta);
  SymMatrix Wd = sym_zero_matrix(A->chart(), A->rank(), A->rank());
  for (const auto& [idx, f] : deta.coeffs()) {
    Wd[idx[0]][idx[1]] = f;
    Wd[idx[1]][idx[0]] = -f;
  }
  SymMatrix lamT = sym_transpose(lam.lambda);
  SymMatrix omega_M = sym_matmul(lamT, sym_matmul(Wd, lam.lambda));
  SymMatrix g_M = sym_matmul(lamT, sym_matmul(acs.g->g, lam.lambda));
  SymMatrix rho = sym_zero_matrix(A->chart(), m, A->rank());
  for (int a = 0; a < A->rank(); ++a)
    for (int i = 0; i < m; ++i) rho[i][a] = A->anchor_entry(a, i);
  SymMatrix J_M = sym_matmul(rho, sym_matmul(acs.phi, lam.lambda));

  auto TM = tangent_algebroid(A->chart());
  AlgebroidForm wM(A->chart(), m, 2);
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) wM.add({i, j}, omega_M[i][j]);
  report.merge(check_symplectic(*TM, wM, plan, tol), "base_");
  CompatibleTriple base{wM, AlmostComplexStructure{J_M}, BundleMetric{g_M}};
  report.merge(check_compatible_triple(*TM, base, plan, tol), "base_");

  // D-splitting: d eta pairs the horizontal block trivially against L
  ResidualMax dsplit;
  for (const auto& p : pts) {
    Eigen::MatrixXd K = kernel_basis_at(*A, p);
    if (K.cols() == 0) {
      dsplit.update(0.0, p);
      continue;
    }
    Eigen::MatrixXd H = sym_eval(lam.lambda, p);  // horizontal lifts
    dsplit.update((H.transpose() * deta.matrix_at(p) * K).norm(), p);
  }
  report.add_check("D_splitting", dsplit);

  // Poisson coincidence on coordinate pairs
  PoissonBivector piM = poisson_from_symplectic(*TM, wM);
  ResidualMax coincide;
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      PointFn fi = point_fn(ScalarField::variable(A->chart(), i));
      PointFn fj = point_fn(ScalarField::variable(A->chart(), j));
      auto br = contact_poisson_bracket(A, acs.eta, fi, fj);
      for (const auto& p : pts) {
        try {
          coincide.update(std::abs(br.value(p) - piM.pi[i][j](p)), p);
        } catch (const DivisionByNearZero&) {
        }
      }
    }
  }
  report.add_check("poisson_coincidence", coincide);

  return BaseSymplecticResult{std::move(omega_M), std::move(J_M),
                              std::move(g_M), std::move(report)};
}

}  // namespace algebroid
