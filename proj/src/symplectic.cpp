#include "algebroid/symplectic.hpp"

#include <cmath>
#include <limits>
#include <memory>

namespace algebroid {

namespace {

// omega frame matrix as a symbolic n x n matrix, W[a][b] = omega(e_a, e_b).
SymMatrix omega_matrix(const AlgebroidForm& omega) {
  const int n = omega.rank();
  SymMatrix W = sym_zero_matrix(omega.chart(), n, n);
  for (const auto& [idx, f] : omega.coeffs()) {
    W[idx[0]][idx[1]] = f;
    W[idx[1]][idx[0]] = -f;
  }
  return W;
}

// anchor as a symbolic m x n matrix (rows are base coordinates).
SymMatrix anchor_matrix(const LieAlgebroid& A) {
  SymMatrix rho = sym_zero_matrix(A.chart(), A.dim(), A.rank());
  for (int a = 0; a < A.rank(); ++a)
    for (int i = 0; i < A.dim(); ++i) rho[i][a] = A.anchor_entry(a, i);
  return rho;
}

// d^A f on frames: (df)_b = rho(e_b).f, as a numeric vector at p.
Eigen::VectorXd frame_differential_at(const LieAlgebroid& A, const PointFn& f,
                                      const Point& p) {
  if (!f.gradient) throw PreconditionError("function gradient unavailable");
  Eigen::VectorXd grad = f.gradient(p);
  return A.anchor_at(p).transpose() * grad;
}

Eigen::MatrixXd hcat(const std::vector<Eigen::MatrixXd>& blocks, int rows) {
  int cols = 0;
  for (const auto& b : blocks) cols += static_cast<int>(b.cols());
  Eigen::MatrixXd out(rows, cols);
  int at = 0;
  for (const auto& b : blocks) {
    if (b.cols() > 0) out.middleCols(at, b.cols()) = b;
    at += static_cast<int>(b.cols());
  }
  return out;
}

Eigen::PartialPivLU<Eigen::MatrixXd> omega_solver(const AlgebroidForm& omega,
                                                  const Point& p) {
  Eigen::MatrixXd Wt = omega.matrix_at(p).transpose();
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(Wt);
  double det = std::abs(lu.determinant());
  if (det < 1e-12)
    throw PreconditionError("omega singular at the queried point");
  return lu;
}

// The omega-orthogonal lift lambda with image L^omega:
// lambda = W^{-T} rho^T (rho W^{-T} rho^T)^{-1}.
Splitting omega_splitting(const LieAlgebroid& A, const AlgebroidForm& omega) {
  SymMatrix W = omega_matrix(omega);
  SymMatrix rho = anchor_matrix(A);
  SymMatrix Winv_t = sym_inverse(sym_transpose(W));
  SymMatrix lift = sym_matmul(Winv_t, sym_transpose(rho));  // n x m
  SymMatrix S = sym_matmul(rho, lift);                      // m x m
  return Splitting{sym_matmul(lift, sym_inverse(S))};
}

}  // namespace

PointFn point_fn(const ScalarField& f) {
  const int m = f.chart()->dim();
  auto first = std::make_shared<std::vector<ScalarField>>();
  auto second = std::make_shared<std::vector<ScalarField>>();
  for (int i = 0; i < m; ++i) first->push_back(f.derivative(i));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) second->push_back((*first)[i].derivative(j));
  PointFn fn;
  fn.value = [f](const Point& p) { return f(p); };
  fn.gradient = [first, m](const Point& p) {
    Eigen::VectorXd g(m);
    for (int i = 0; i < m; ++i) g[i] = (*first)[i](p);
    return g;
  };
  fn.hessian = [second, m](const Point& p) {
    Eigen::MatrixXd H(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) H(i, j) = (*second)[i * m + j](p);
    return H;
  };
  return fn;
}

ValidationReport check_symplectic(const LieAlgebroid& A,
                                  const AlgebroidForm& omega,
                                  const SamplePlan& plan, double tol) {
  ValidationReport report(tol);
  AlgebroidForm dw = exterior_derivative(A, omega);
  auto pts = sample_points(*A.chart(), plan,
                           [&](const Point& p) { return A.finite_at(p); });
  ResidualMax closed;
  double min_det = std::numeric_limits<double>::infinity();
  Point worst = pts[0];
  for (const auto& p : pts) {
    closed.update(form_abs_at(dw, p), p);
    double d = std::abs(omega.matrix_at(p).determinant());
    if (d < min_det) {
      min_det = d;
      worst = p;
    }
  }
  report.add_check("omega_closed", closed);
  report.add_bool_check("omega_nondegenerate", min_det > tol);
  report.add_info("omega_min_abs_det", min_det, worst);
  return report;
}

Eigen::VectorXd hamiltonian_section_at(const LieAlgebroid& A,
                                       const AlgebroidForm& omega,
                                       const PointFn& f, const Point& p) {
  // omega(a, e_b) = (d^A f)(e_b): W^T a = df
  return omega_solver(omega, p).solve(frame_differential_at(A, f, p));
}

Eigen::MatrixXd hamiltonian_section_jacobian_at(const LieAlgebroid& A,
                                                const AlgebroidForm& omega,
                                                const PointFn& f,
                                                const Point& p) {
  if (!f.hessian) throw PreconditionError("function hessian unavailable");
  const int n = A.rank();
  const int m = A.dim();
  auto lu = omega_solver(omega, p);
  Eigen::VectorXd a = lu.solve(frame_differential_at(A, f, p));

  Eigen::VectorXd grad = f.gradient(p);
  Eigen::MatrixXd hess = f.hessian(p);
  Eigen::MatrixXd R = A.anchor_at(p);

  Eigen::MatrixXd out(n, m);
  for (int i = 0; i < m; ++i) {
    // d(df)_b/dx_i = sum_j (d_i rho^j_b) (d_j f) + sum_j rho^j_b hess(i,j)
    Eigen::VectorXd d_df(n);
    for (int b = 0; b < n; ++b) {
      double v = 0.0;
      for (int j = 0; j < m; ++j)
        v += A.anchor_entry(b, j).derivative(i)(p) * grad[j] +
             R(j, b) * hess(i, j);
      d_df[b] = v;
    }
    // d(W^T)/dx_i
    Eigen::MatrixXd dWt = Eigen::MatrixXd::Zero(n, n);
    for (const auto& [idx, g] : omega.coeffs()) {
      double v = g.derivative(i)(p);
      dWt(idx[1], idx[0]) = v;   // W^T(b,a) = W(a,b)
      dWt(idx[0], idx[1]) = -v;
    }
    out.col(i) = lu.solve(d_df - dWt * a);
  }
  return out;
}

PointFn poisson_bracket(const AlgebroidPtr& A, const AlgebroidForm& omega,
                        const PointFn& f, const PointFn& g) {
  auto Aptr = A;
  auto om = std::make_shared<AlgebroidForm>(omega);
  PointFn out;
  out.value = [Aptr, om, f, g](const Point& p) {
    Eigen::VectorXd af = hamiltonian_section_at(*Aptr, *om, f, p);
    Eigen::VectorXd ag = hamiltonian_section_at(*Aptr, *om, g, p);
    return af.dot(om->matrix_at(p) * ag);
  };
  out.gradient = [Aptr, om, f, g](const Point& p) {
    const int m = Aptr->dim();
    Eigen::VectorXd af = hamiltonian_section_at(*Aptr, *om, f, p);
    Eigen::VectorXd ag = hamiltonian_section_at(*Aptr, *om, g, p);
    Eigen::MatrixXd daf = hamiltonian_section_jacobian_at(*Aptr, *om, f, p);
    Eigen::MatrixXd dag = hamiltonian_section_jacobian_at(*Aptr, *om, g, p);
    Eigen::MatrixXd W = om->matrix_at(p);
    Eigen::VectorXd grad(m);
    for (int i = 0; i < m; ++i) {
      Eigen::MatrixXd dW = Eigen::MatrixXd::Zero(W.rows(), W.cols());
      for (const auto& [idx, h] : om->coeffs()) {
        double v = h.derivative(i)(p);
        dW(idx[0], idx[1]) = v;
        dW(idx[1], idx[0]) = -v;
      }
      grad[i] = daf.col(i).dot(W * ag) + af.dot(dW * ag) +
                af.dot(W * dag.col(i));
    }
    return grad;
  };
  return out;
}

std::vector<Section> coordinate_hamiltonian_sections(
    const LieAlgebroid& A, const AlgebroidForm& omega) {
  SymMatrix Winv_t = sym_inverse(sym_transpose(omega_matrix(omega)));
  std::vector<Section> out;
  for (int k = 0; k < A.dim(); ++k) {
    // (d^A x_k)_b = rho^k_b
    std::vector<ScalarField> df;
    for (int b = 0; b < A.rank(); ++b) df.push_back(A.anchor_entry(b, k));
    out.emplace_back(sym_matvec(Winv_t, df));
  }
  return out;
}

PoissonBivector poisson_from_symplectic(const LieAlgebroid& A,
                                        const AlgebroidForm& omega) {
  const int m = A.dim();
  auto ham = coordinate_hamiltonian_sections(A, omega);
  PoissonBivector pi{A.chart(), sym_zero_matrix(A.chart(), m, m)};
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      if (i == j) continue;
      // {x_i, x_j} = rho(a_{x_j}) . x_i
      pi.pi[i][j] = A.anchor_apply(ham[j])[i];
    }
  }
  return pi;
}

Section nijenhuis(const LieAlgebroid& A, const AlmostComplexStructure& J,
                  const Section& s, const Section& t) {
  auto apply_J = [&](const Section& u) {
    return Section(sym_matvec(J.J, u.comps));
  };
  Section Js = apply_J(s);
  Section Jt = apply_J(t);
  return A.bracket(Js, Jt) - A.bracket(s, t) - apply_J(A.bracket(Js, t)) -
         apply_J(A.bracket(s, Jt));
}

ValidationReport check_compatible_triple(const LieAlgebroid& A,
                                         const CompatibleTriple& triple,
                                         const SamplePlan& plan, double tol) {
  ValidationReport report(tol);
  const int n = A.rank();
  auto pts = sample_points(*A.chart(), plan,
                           [&](const Point& p) { return A.finite_at(p); });

  ResidualMax jsq, giso, comp;
  for (const auto& p : pts) {
    Eigen::MatrixXd Jp = triple.J.at(p);
    Eigen::MatrixXd G = triple.g.at(p);
    Eigen::MatrixXd W = triple.omega.matrix_at(p);
    jsq.update((Jp * Jp + Eigen::MatrixXd::Identity(n, n)).norm(), p);
    // g(JS, JT) = g(S,T): J^T G J = G
    giso.update((Jp.transpose() * G * Jp - G).norm(), p);
    // omega(S,T) = g(S, JT): W = G J
    comp.update((W - G * Jp).norm(), p);
  }
  report.add_check("J_squares_to_minus_id", jsq);
  report.add_check("g_J_invariant", giso);
  report.add_check("omega_equals_g_J", comp);

  // derived identity 2 g((nabla_a J) b, c) = g(N(b,c), J(a)) through the
  // Levi-Civita connection
  ResidualMax nabla;
  bool computable = true;
  std::vector<std::vector<Section>> N(n, std::vector<Section>(n));
  for (int b = 0; b < n && computable; ++b)
    for (int c = 0; c < n; ++c)
      N[b][c] = nijenhuis(A, triple.J, A.frame_section(b), A.frame_section(c));
  for (const auto& p : pts) {
    Christoffel ch;
    try {
      ch = levi_civita_at(A, triple.g, p);
    } catch (const PreconditionError&) {
      computable = false;
      break;
    }
    Eigen::MatrixXd Jp = triple.J.at(p);
    Eigen::MatrixXd G = triple.g.at(p);
    // rho(e_a) . J[c][b] at p
    Eigen::MatrixXd dJ(n, n);
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        for (int c = 0; c < n; ++c)
          dJ(c, b) = A.frame_derivative(a, triple.J.J[c][b])(p);
        Eigen::VectorXd eb = Eigen::VectorXd::Unit(n, b);
        // (nabla_a J) b = rho(e_a).J(.,b) + Gamma(a, Jb, .) - J Gamma(a,b,.)
        Eigen::VectorXd nJb = dJ.col(b) +
                              ch.apply(Eigen::VectorXd::Unit(n, a), Jp * eb) -
                              Jp * ch.apply(Eigen::VectorXd::Unit(n, a), eb);
        for (int c = 0; c < n; ++c) {
          double lhs = 2.0 * nJb.dot(G * Eigen::VectorXd::Unit(n, c));
          double rhs = N[b][c].at(p).dot(G * Jp.col(a));
          nabla.update(std::abs(lhs - rhs), p);
        }
      }
    }
  }
  if (computable)
    report.add_check("nabla_J_nijenhuis_identity", nabla);
  else
    report.add_flag("levi-civita unavailable: metric degenerate at a sample");
  return report;
}

AdmissibilityResult check_admissible(const LieAlgebroid& A,
                                     const AlmostComplexStructure& J,
                                     const std::optional<SymMatrix>& JM,
                                     const SamplePlan& plan, double tol) {
  AdmissibilityResult result{ValidationReport(tol), std::nullopt};
  const int n = A.rank();
  const int m = A.dim();
  auto pts = sample_points(*A.chart(), plan,
                           [&](const Point& p) { return A.finite_at(p); });

  if (JM) {
    // residual of rho J - JM rho on frames
    ResidualMax res;
    for (const auto& p : pts) {
      Eigen::MatrixXd R = A.anchor_at(p);
      res.update((R * J.at(p) - sym_eval(*JM, p) * R).norm(), p);
    }
    result.report.add_check("anchor_intertwines_J", res);
    return result;
  }

  // criterion: J preserves the kernel pointwise
  ResidualMax kernel_pres;
  for (const auto& p : pts) {
    Eigen::MatrixXd K = kernel_basis_at(A, p);
    if (K.cols() == 0) {
      kernel_pres.update(0.0, p);
      continue;
    }
    Eigen::MatrixXd JK = J.at(p) * K;
    kernel_pres.update((JK - K * (K.transpose() * JK)).norm(), p);
  }
  result.report.add_check("J_preserves_kernel", kernel_pres);

  // induced J_M = rho J lambda through the identity-metric splitting;
  // requires a transitive anchor
  Splitting lam;
  try {
    lam = splitting_from_metric(A, identity_metric(A.chart(), n), plan, tol);
  } catch (const PreconditionError&) {
    throw PreconditionError(
        "induced base structure needs a transitive anchor");
  }
  SymMatrix JMi = sym_zero_matrix(A.chart(), m, m);
  SymMatrix rho = anchor_matrix(A);
  JMi = sym_matmul(rho, sym_matmul(J.J, lam.lambda));
  ResidualMax jm_sq;
  for (const auto& p : pts) {
    Eigen::MatrixXd Jm = sym_eval(JMi, p);
    jm_sq.update((Jm * Jm + Eigen::MatrixXd::Identity(m, m)).norm(), p);
  }
  result.report.add_check("induced_JM_squares_to_minus_id", jm_sq);

  // remark: rho(N_J(a,b)) = N_JM(rho a, rho b)
  auto TM = tangent_algebroid(A.chart());
  AlmostComplexStructure Jm_struct{JMi};
  ResidualMax proj;
  std::vector<std::vector<Section>> NM(m, std::vector<Section>(m));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      NM[i][j] =
          nijenhuis(*TM, Jm_struct, TM->frame_section(i), TM->frame_section(j));
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      Section NA = nijenhuis(A, J, A.frame_section(a), A.frame_section(b));
      for (const auto& p : pts) {
        Eigen::VectorXd lhs = A.anchor_at(p) * NA.at(p);
        Eigen::MatrixXd R = A.anchor_at(p);
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
        // N_JM is tensorial: expand on coordinate frames
        for (int i = 0; i < m; ++i)
          for (int j = 0; j < m; ++j)
            rhs += R(i, a) * R(j, b) * NM[i][j].at(p);
        proj.update((lhs - rhs).norm(), p);
      }
    }
  }
  result.report.add_check("nijenhuis_projects_to_base", proj);
  result.induced_JM = std::move(JMi);
  return result;
}

FiberDecomposition decompose_fiber(const LieAlgebroid& A,
                                   const CompatibleTriple& triple,
                                   const Point& p, double rank_tol) {
  const int n = A.rank();
  Eigen::MatrixXd W = triple.omega.matrix_at(p);
  Eigen::MatrixXd G = triple.g.at(p);
  Eigen::MatrixXd Jp = triple.J.at(p);

  Eigen::MatrixXd L = nullspace(A.anchor_at(p), rank_tol, true);
  // L^omega: omega(v, l) = 0 for all l in L
  Eigen::MatrixXd Lw = L.cols() == 0
                           ? Eigen::MatrixXd::Identity(n, n)
                           : nullspace((W * L).transpose().eval(), rank_tol,
                                       true);
  Eigen::MatrixXd L1 = subspace_intersection(L, Lw, rank_tol);
  // L2: g-complement of L1 inside L
  Eigen::MatrixXd L2(n, 0);
  if (L.cols() > 0) {
    if (L1.cols() == 0) {
      L2 = L;
    } else {
      Eigen::MatrixXd M = L1.transpose() * G * L;  // conditions on L-coords
      L2 = orthonormal_columns(L * nullspace(M, rank_tol, true), rank_tol);
    }
  }
  Eigen::MatrixXd E1 = orthonormal_columns(Jp * L1, rank_tol);
  Eigen::MatrixXd S = hcat({L, E1}, n);
  Eigen::MatrixXd E2 = S.cols() == 0
                           ? Eigen::MatrixXd::Identity(n, n)
                           : nullspace((W * S).transpose().eval(), rank_tol,
                                       true);

  FiberDecomposition dec{p, E1, E2, L1, L2};
  if (dec.dim_E1() + dec.dim_E2() + dec.dim_L1() + dec.dim_L2() != n)
    throw PreconditionError("fiber decomposition dimensions do not sum");
  Eigen::MatrixXd all = hcat({E1, E2, L1, L2}, n);
  if (nullspace(all, rank_tol, true).cols() != 0)
    throw PreconditionError("fiber decomposition blocks are not independent");
  return dec;
}

Eigen::MatrixXd symplectic_distribution_at(const LieAlgebroid& A,
                                           const CompatibleTriple& triple,
                                           const Point& p, double rank_tol) {
  FiberDecomposition dec = decompose_fiber(A, triple, p, rank_tol);
  Eigen::MatrixXd span = hcat({dec.E2, dec.L1}, A.rank());
  if (span.cols() == 0) return Eigen::MatrixXd(A.dim(), 0);
  return orthonormal_columns(A.anchor_at(p) * span, rank_tol);
}

BaseTriple induce_base_triple(const AlgebroidPtr& A,
                              const CompatibleTriple& triple,
                              const SamplePlan& plan, double tol) {
  const int m = A->dim();
  ValidationReport report(tol);
  auto pts = sample_points(*A->chart(), plan,
                           [&](const Point& p) { return A->finite_at(p); });

  // hypotheses: admissibility and Lambda = TM at samples
  auto adm = check_admissible(*A, triple.J, std::nullopt, plan, tol);
  if (!adm.report.pass())
    throw PreconditionError("J is not admissible:\n" + adm.report.to_text());
  for (const auto& p : pts) {
    if (symplectic_distribution_at(*A, triple, p).cols() != m)
      throw PreconditionError(
          "symplectic distribution is smaller than TM at a sample point");
  }

  // E2-lift = omega-orthogonal splitting
  Splitting lam = omega_splitting(*A, triple.omega);
  SymMatrix W = omega_matrix(triple.omega);
  SymMatrix lamT = sym_transpose(lam.lambda);
  SymMatrix omega_M = sym_matmul(lamT, sym_matmul(W, lam.lambda));
  SymMatrix g_M = sym_matmul(lamT, sym_matmul(triple.g.g, lam.lambda));
  SymMatrix J_M = *adm.induced_JM;

  auto TM = tangent_algebroid(A->chart());
  AlgebroidForm wM(A->chart(), m, 2);
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) wM.add({i, j}, omega_M[i][j]);
  CompatibleTriple base{wM, AlmostComplexStructure{J_M}, BundleMetric{g_M}};

  ValidationReport compat = check_compatible_triple(*TM, base, plan, tol);
  report.merge(compat, "base_");
  ValidationReport closed = check_symplectic(*TM, wM, plan, tol);
  report.merge(closed, "base_");

  // Poisson coincidence: pi from omega on A vs pi from omega_M on TM
  PoissonBivector piA = poisson_from_symplectic(*A, triple.omega);
  PoissonBivector piM = poisson_from_symplectic(*TM, wM);
  ResidualMax coincide;
  for (const auto& p : pts) {
    try {
      coincide.update(
          (sym_eval(piA.pi, p) - sym_eval(piM.pi, p)).norm(), p);
    } catch (const DivisionByNearZero&) {
    }
  }
  report.add_check("poisson_coincidence", coincide);
  return BaseTriple{std::move(omega_M), std::move(J_M), std::move(g_M),
                    std::move(report)};
}

AlgebroidPtr cotangent_algebroid(const PoissonBivector& pi,
                                 const SamplePlan& plan, double tol) {
  const auto& chart = pi.chart;
  const int m = chart->dim();
  std::vector<std::string> names;
  std::vector<std::vector<ScalarField>> anchor(m);
  for (int i = 0; i < m; ++i) {
    names.push_back("d" + chart->vars()[i]);
    for (int j = 0; j < m; ++j) anchor[i].push_back(pi.pi[i][j]);
  }
  LieAlgebroid::StructureMap st;
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      std::vector<ScalarField> c;
      bool nonzero = false;
      for (int k = 0; k < m; ++k) {
        c.push_back(pi.pi[i][j].derivative(k));
        nonzero = nonzero || !c.back().is_zero();
      }
      if (nonzero) st[{i, j}] = std::move(c);
    }
  }
  auto A = std::make_shared<const LieAlgebroid>(chart, std::move(names),
                                                std::move(anchor),
                                                std::move(st));
  auto report = validate_algebroid(*A, plan, tol);
  if (!report.pass())
    throw PreconditionError("bivector is not Poisson:\n" + report.to_text());
  return A;
}

PsiResult build_psi_morphism(const AlgebroidPtr& A, const AlgebroidForm& omega,
                             const BundleMetric& g, const SamplePlan& plan,
                             double tol) {
  (void)g;  // kept for interface symmetry; the omega-lift needs no metric
  const int n = A->rank();
  const int m = A->dim();
  ValidationReport report(tol);
  auto pts = sample_points(*A->chart(), plan,
                           [&](const Point& p) { return A->finite_at(p); });

  // omega restricted to the kernel must be nondegenerate
  for (const auto& p : pts) {
    Eigen::MatrixXd K = kernel_basis_at(*A, p);
    if (K.cols() == 0) continue;
    Eigen::MatrixXd Wk = K.transpose() * omega.matrix_at(p) * K;
    if (std::abs(Wk.determinant()) < kDefaultRankTolerance)
      throw PreconditionError(
          "omega degenerate on the kernel at a sample point");
  }

  PoissonBivector pi = poisson_from_symplectic(*A, omega);
  AlgebroidPtr cot = cotangent_algebroid(pi, plan, tol);

  // source: tangent-like algebroid with frame eps_i = lambda_omega(d_i)
  Splitting lam = omega_splitting(*A, omega);
  std::vector<std::string> names;
  auto chart = A->chart();
  auto zero = ScalarField::constant(chart, 0.0);
  std::vector<std::vector<ScalarField>> src_anchor(
      m, std::vector<ScalarField>(m, zero));
  for (int i = 0; i < m; ++i) {
    names.push_back("eps_" + chart->vars()[i]);
    src_anchor[i][i] = ScalarField::constant(chart, 1.0);
  }
  auto source = std::make_shared<const LieAlgebroid>(
      chart, std::move(names), std::move(src_anchor),
      LieAlgebroid::StructureMap{});

  // psi(eps_i)_k = -omega(eps_i, eps_k)
  SymMatrix W = omega_matrix(omega);
  SymMatrix fiber = sym_zero_matrix(chart, m, m);
  for (int i = 0; i < m; ++i) {
    Section ei = splitting_column(*A, lam, i);
    for (int k = 0; k < m; ++k) {
      Section ek = splitting_column(*A, lam, k);
      ScalarField acc = zero;
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
          if (W[a][b].is_zero()) continue;
          acc = acc + ei[a] * ek[b] * W[a][b];
        }
      fiber[k][i] = -acc;
    }
  }

  AlgebroidMorphism psi;
  psi.source = source;
  psi.target = cot;
  for (int i = 0; i < m; ++i)
    psi.base_map.push_back(ScalarField::variable(chart, i));
  psi.fiber_map = std::move(fiber);
  report.merge(check_morphism(psi, plan, tol), "psi_");

  // proof identity rho(a_f) = pi_sharp(df) for coordinate functions and
  // their pairwise products (see docs/conventions.md for the sign)
  std::vector<ScalarField> testers;
  for (int i = 0; i < m; ++i) {
    testers.push_back(ScalarField::variable(chart, i));
    for (int j = i; j < m; ++j)
      testers.push_back(ScalarField::variable(chart, i) *
                        ScalarField::variable(chart, j));
  }
  ResidualMax ident;
  for (const auto& f : testers) {
    PointFn pf = point_fn(f);
    for (const auto& p : pts) {
      Eigen::VectorXd af = hamiltonian_section_at(*A, omega, pf, p);
      Eigen::VectorXd rho_af = A->anchor_at(p) * af;
      Eigen::VectorXd pidf = sym_eval(pi.pi, p) * pf.gradient(p);
      ident.update((rho_af - pidf).norm(), p);
    }
  }
  report.add_check("hamiltonian_anchor_identity", ident);

  return PsiResult{source, cot, std::move(pi), std::move(psi),
                   std::move(report)};
}

ValidationReport check_kernel_bracket_theorems(const AlgebroidPtr& A,
                                               const CompatibleTriple& triple,
                                               const SamplePlan& plan,
                                               double tol) {
  ValidationReport report(tol);
  const int n = A->rank();
  auto pts = sample_points(*A->chart(), plan,
                           [&](const Point& p) { return A->finite_at(p); });

  bool hypotheses = true;

  ValidationReport compat = check_compatible_triple(*A, triple, plan, tol);
  if (!compat.pass()) {
    report.add_flag("compatible triple hypothesis failed");
    hypotheses = false;
  }

  try {
    ValidationReport inv =
        check_invariant_metric(*A, triple.g, plan, tol);
    if (!inv.pass()) {
      report.add_flag("invariant metric hypothesis failed");
      hypotheses = false;
    }
  } catch (const PreconditionError&) {
    report.add_flag("invariant metric hypothesis unverifiable (no splitting)");
    hypotheses = false;
  }

  try {
    auto adm = check_admissible(*A, triple.J, std::nullopt, plan, tol);
    if (!adm.report.pass()) {
      report.add_flag("admissibility hypothesis failed");
      hypotheses = false;
    }
  } catch (const PreconditionError&) {
    report.add_flag("admissibility hypothesis unverifiable (not transitive)");
    hypotheses = false;
  }

  // Kaehler variant: N_J and d omega both small
  ResidualMax nres, dres;
  AlgebroidForm dw = exterior_derivative(*A, triple.omega);
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      Section N =
          nijenhuis(*A, triple.J, A->frame_section(a), A->frame_section(b));
      for (const auto& p : pts) nres.update(N.at(p).norm(), p);
    }
  for (const auto& p : pts) dres.update(form_abs_at(dw, p), p);
  report.add_info("nijenhuis_residual", nres.value, nres.at);
  report.add_info("d_omega_residual", dres.value, dres.at);
  bool kaehler = compat.pass() && nres.value <= tol && dres.value <= tol;
  if (kaehler) report.add_flag("kaehler hypotheses hold");
  hypotheses = hypotheses || kaehler;

  // conclusion: the bracket of two kernel sections vanishes pointwise
  ResidualMax kb;
  for (const auto& p : pts) {
    Eigen::MatrixXd K = kernel_basis_at(*A, p);
    for (int s = 0; s < K.cols(); ++s) {
      for (int t = s + 1; t < K.cols(); ++t) {
        Eigen::VectorXd br = Eigen::VectorXd::Zero(n);
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b) {
            double uv = K(a, s) * K(b, t);
            if (uv == 0.0) continue;
            for (int c = 0; c < n; ++c)
              br[c] += uv * A->structure_fn(a, b, c)(p);
          }
        kb.update(br.norm(), p);
      }
    }
    if (K.cols() < 2) kb.update(0.0, p);
  }
  if (hypotheses)
    report.add_check("kernel_bracket_vanishes", kb);
  else
    report.add_info("kernel_bracket_residual", kb.value, kb.at);

  // integrability: curvature of the omega-orthogonal splitting when
  // omega is nondegenerate on the kernel
  bool kernel_nondeg = true;
  for (const auto& p : pts) {
    Eigen::MatrixXd K = kernel_basis_at(*A, p);
    if (K.cols() == 0) continue;
    Eigen::MatrixXd Wk = K.transpose() * triple.omega.matrix_at(p) * K;
    if (std::abs(Wk.determinant()) < kDefaultRankTolerance) {
      kernel_nondeg = false;
      break;
    }
  }
  if (kernel_nondeg && A->dim() >= 2) {
    try {
      Splitting lam = omega_splitting(*A, triple.omega);
      ResidualMax curv;
      for (int i = 0; i < A->dim(); ++i)
        for (int j = i + 1; j < A->dim(); ++j) {
          Section om = curvature_two_form(*A, lam, i, j);
          for (const auto& p : pts) curv.update(om.at(p).norm(), p);
        }
      if (hypotheses)
        report.add_check("omega_complement_curvature", curv);
      else
        report.add_info("omega_complement_curvature", curv.value, curv.at);
    } catch (const DivisionByNearZero&) {
      report.add_flag("omega splitting degenerate at a sample");
    }
  } else if (!kernel_nondeg) {
    report.add_flag("omega degenerate on the kernel, curvature skipped");
  }
  return report;
}

}  // namespace algebroid
