#include "algebroid/transitive_geometry.hpp"

#include <cmath>

namespace algebroid {

BundleMetric identity_metric(const ChartPtr& chart, int rank) {
  return BundleMetric{sym_identity(chart, rank)};
}

ScalarField metric_pair(const BundleMetric& g, const Section& s,
                        const Section& t) {
  const int n = static_cast<int>(g.g.size());
  ScalarField acc = ScalarField::constant(g.g[0][0].chart(), 0.0);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      if (g.g[a][b].is_zero()) continue;
      acc = acc + g.g[a][b] * s[a] * t[b];
    }
  return acc;
}

Section splitting_column(const LieAlgebroid& A, const Splitting& lam, int i) {
  std::vector<ScalarField> comps;
  for (int a = 0; a < A.rank(); ++a) comps.push_back(lam.lambda[a][i]);
  return Section(std::move(comps));
}

Section apply_splitting(const LieAlgebroid& A, const Splitting& lam,
                        const std::vector<ScalarField>& X) {
  if (static_cast<int>(X.size()) != A.dim())
    throw ShapeError("vector field dimension mismatch");
  Section s = A.zero_section();
  for (int i = 0; i < A.dim(); ++i) s = s + X[i] * splitting_column(A, lam, i);
  return s;
}

Splitting splitting_from_metric(const LieAlgebroid& A, const BundleMetric& g,
                                const SamplePlan& plan, double tol) {
  const int n = A.rank();
  const int m = A.dim();
  if (static_cast<int>(g.g.size()) != n)
    throw ShapeError("metric rank mismatch");

  // rho as an m x n symbolic matrix (rows are coordinates).
  SymMatrix rho = sym_zero_matrix(A.chart(), m, n);
  for (int a = 0; a < n; ++a)
    for (int i = 0; i < m; ++i) rho[i][a] = A.anchor_entry(a, i);

  SymMatrix Ginv = sym_inverse(g.g);
  SymMatrix rhoT = sym_transpose(rho);
  SymMatrix S = sym_matmul(rho, sym_matmul(Ginv, rhoT));  // m x m
  SymMatrix lam = sym_matmul(Ginv, sym_matmul(rhoT, sym_inverse(S)));  // n x m

  // rho . lambda = id at samples; failure means the anchor is not surjective
  // or the metric is degenerate.
  auto pts = sample_points(*A.chart(), plan,
                           [&](const Point& p) { return A.finite_at(p); });
  for (const auto& p : pts) {
    Eigen::MatrixXd R = A.anchor_at(p);
    Eigen::MatrixXd L;
    try {
      L = sym_eval(lam, p);
    } catch (const DivisionByNearZero&) {
      throw PreconditionError("splitting degenerate at a sample point");
    }
    if ((R * L - Eigen::MatrixXd::Identity(m, m)).norm() > tol)
      throw PreconditionError(
          "rho . lambda != id at a sample point (anchor not surjective?)");
  }
  return Splitting{std::move(lam)};
}

Section adjoint_connection(const LieAlgebroid& A, const Splitting& lam,
                           const std::vector<ScalarField>& X, const Section& T,
                           const SamplePlan& plan, double tol) {
  auto pts = sample_points(*A.chart(), plan,
                           [&](const Point& p) { return A.finite_at(p); });
  for (const auto& p : pts) {
    if ((A.anchor_at(p) * T.at(p)).norm() > tol)
      throw PreconditionError(
          "adjoint connection requires a kernel section");
  }
  return A.bracket(apply_splitting(A, lam, X), T);
}

Section curvature_two_form(const LieAlgebroid& A, const Splitting& lam, int i,
                           int j) {
  Section br =
      A.bracket(splitting_column(A, lam, i), splitting_column(A, lam, j));
  return 0.5 * br;
}

LieAlgebroid build_transitive(const TransitiveBuildInput& input,
                              const SamplePlan& plan, double tol) {
  const auto& chart = input.chart;
  const int m = chart->dim();
  const int r = input.fiber_rank;
  const int n = m + r;
  if (static_cast<int>(input.fiber_names.size()) != r)
    throw ShapeError("fiber name count mismatch");
  auto zero = ScalarField::constant(chart, 0.0);
  auto one = ScalarField::constant(chart, 1.0);

  std::vector<std::string> names;
  std::vector<std::vector<ScalarField>> anchor(
      n, std::vector<ScalarField>(m, zero));
  for (int i = 0; i < m; ++i) {
    names.push_back("d_" + chart->vars()[i]);
    anchor[i][i] = one;
  }
  for (const auto& nm : input.fiber_names) names.push_back(nm);

  LieAlgebroid::StructureMap st;
  auto coeffs_at = [&](int a, int b) -> std::vector<ScalarField>& {
    auto it = st.find({a, b});
    if (it == st.end())
      it = st.emplace(std::make_pair(a, b), std::vector<ScalarField>(n, zero))
               .first;
    return it->second;
  };

  // [d_i, d_j] = Omega(d_i, d_j), valued in the fiber.
  for (const auto& [key, om] : input.omega) {
    auto [i, j] = key;
    if (!(0 <= i && i < j && j < m))
      throw ShapeError("omega keys must satisfy 0 <= i < j < dim");
    if (static_cast<int>(om.size()) != r)
      throw ShapeError("omega coefficient count mismatch");
    auto& c = coeffs_at(i, j);
    for (int d = 0; d < r; ++d) c[m + d] = om[d];
  }

  // [d_i, s_d] = nabla_{d_i} s_d = sum_c gamma[i][c][d] s_c.
  if (!input.gamma.empty()) {
    if (static_cast<int>(input.gamma.size()) != m)
      throw ShapeError("gamma must have one matrix per base coordinate");
    for (int i = 0; i < m; ++i) {
      for (int d = 0; d < r; ++d) {
        auto& c = coeffs_at(i, m + d);
        for (int cc = 0; cc < r; ++cc) c[m + cc] = input.gamma[i][cc][d];
      }
    }
  }

  // [s_c, s_d] from the fiber structure.
  for (const auto& [key, fc] : input.fiber_structure) {
    auto [c, d] = key;
    if (!(0 <= c && c < d && d < r))
      throw ShapeError("fiber structure keys must satisfy 0 <= c < d < rank");
    if (static_cast<int>(fc.size()) != r)
      throw ShapeError("fiber structure coefficient count mismatch");
    auto& cf = coeffs_at(m + c, m + d);
    for (int e = 0; e < r; ++e) cf[m + e] = fc[e];
  }

  LieAlgebroid A(chart, std::move(names), std::move(anchor), std::move(st));
  auto report = validate_algebroid(A, plan, tol);
  if (!report.pass())
    throw PreconditionError(
        "connection and curvature data violate the bracket axioms:\n" +
        report.to_text());
  return A;
}

ValidationReport check_invariant_metric(const LieAlgebroid& A,
                                        const BundleMetric& g,
                                        const SamplePlan& plan, double tol) {
  ValidationReport report(tol);
  const int n = A.rank();
  const int m = A.dim();
  Splitting lam = splitting_from_metric(A, g, plan, tol);

  auto pts = sample_points(*A.chart(), plan, [&](const Point& p) {
    if (!A.finite_at(p)) return false;
    try {
      sym_eval(lam.lambda, p);
    } catch (const DivisionByNearZero&) {
      return false;
    }
    return true;
  });

  // Kernel frames: for each point use a numeric kernel basis, so the
  // checks below are pointwise linear-algebra statements.
  ResidualMax holo, adinv;
  for (const auto& p : pts) {
    Eigen::MatrixXd K = kernel_basis_at(A, p);
    const int r = static_cast<int>(K.cols());
    if (r == 0) {
      holo.update(0.0, p);
      adinv.update(0.0, p);
      continue;
    }
    Eigen::MatrixXd G = sym_eval(g.g, p);

    // nabla^lambda g: rho(lambda(d_i)).g(T,U) = g([lam d_i,T],U) + g(T,[lam d_i,U])
    // with T, U frozen kernel vectors extended as constant sections.
    for (int i = 0; i < m; ++i) {
      Section li = splitting_column(A, lam, i);
      for (int s = 0; s < r; ++s) {
        for (int t = s; t < r; ++t) {
          Section T = A.zero_section();
          Section U = A.zero_section();
          for (int a = 0; a < n; ++a) {
            T[a] = A.constant_field(K(a, s));
            U[a] = A.constant_field(K(a, t));
          }
          ScalarField gTU = metric_pair(g, T, U);
          double lhs = A.anchor_derivative(li, gTU)(p);
          double rhs = metric_pair(g, A.bracket(li, T), U)(p) +
                       metric_pair(g, T, A.bracket(li, U))(p);
          holo.update(std::abs(lhs - rhs), p);
        }
      }
    }

    // ad-invariance on the kernel: g([S,T],U) + g(T,[S,U]) = 0 where S,T,U
    // are constant kernel sections (their anchor vanishes, so derivative
    // terms drop pointwise).
    for (int s = 0; s < r; ++s) {
      for (int t = 0; t < r; ++t) {
        for (int u = 0; u < r; ++u) {
          Section S = A.zero_section(), T = A.zero_section(),
                  U = A.zero_section();
          for (int a = 0; a < n; ++a) {
            S[a] = A.constant_field(K(a, s));
            T[a] = A.constant_field(K(a, t));
            U[a] = A.constant_field(K(a, u));
          }
          double lhs = (A.bracket(S, T).at(p).transpose() * G * K.col(u))(0) +
                       (K.col(t).transpose() * G * A.bracket(S, U).at(p))(0);
          adinv.update(std::abs(lhs), p);
        }
      }
    }
  }
  report.add_check("kernel_metric_parallel", holo);
  report.add_check("kernel_metric_ad_invariant", adinv);
  return report;
}

Eigen::VectorXd Christoffel::apply(const Eigen::VectorXd& u,
                                   const Eigen::VectorXd& v) const {
  Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      if (u[a] == 0.0 || v[b] == 0.0) continue;
      for (int c = 0; c < n; ++c) w[c] += u[a] * v[b] * at(a, b, c);
    }
  return w;
}

Christoffel levi_civita_at(const LieAlgebroid& A, const BundleMetric& g,
                           const Point& p) {
  const int n = A.rank();
  Christoffel ch;
  ch.n = n;
  ch.coef.assign(static_cast<std::size_t>(n) * n * n, 0.0);

  Eigen::MatrixXd G = sym_eval(g.g, p);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(G);
  if (eig.eigenvalues().minCoeff() <= 1e-12)
    throw PreconditionError("metric not positive definite at the point");
  Eigen::LDLT<Eigen::MatrixXd> solver(G);

  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      Eigen::VectorXd rhs(n);
      for (int c = 0; c < n; ++c) {
        ScalarField gbc = metric_pair(g, A.frame_section(b), A.frame_section(c));
        ScalarField gac = metric_pair(g, A.frame_section(a), A.frame_section(c));
        ScalarField gab = metric_pair(g, A.frame_section(a), A.frame_section(b));
        double v = A.frame_derivative(a, gbc)(p) +
                   A.frame_derivative(b, gac)(p) -
                   A.frame_derivative(c, gab)(p);
        Section bab = A.bracket(A.frame_section(a), A.frame_section(b));
        Section bac = A.bracket(A.frame_section(a), A.frame_section(c));
        Section bbc = A.bracket(A.frame_section(b), A.frame_section(c));
        v += metric_pair(g, bab, A.frame_section(c))(p);
        v -= metric_pair(g, bac, A.frame_section(b))(p);
        v -= metric_pair(g, bbc, A.frame_section(a))(p);
        rhs[c] = 0.5 * v;
      }
      Eigen::VectorXd gamma = solver.solve(rhs);
      for (int c = 0; c < n; ++c) ch.at(a, b, c) = gamma[c];
    }
  }
  return ch;
}

}  // namespace algebroid
