#ifndef ALGEBROID_TRANSITIVE_GEOMETRY_HPP
#define ALGEBROID_TRANSITIVE_GEOMETRY_HPP

#include <map>
#include <utility>
#include <vector>

#include "algebroid/algebroid_core.hpp"
#include "algebroid/linalg.hpp"

namespace algebroid {

/// A splitting lambda: TM -> A with rho . lambda = id. lambda[a][i] is the
/// coefficient of frame e_a in lambda(d/dx_i).
struct Splitting {
  SymMatrix lambda;  // n x m
};

struct BundleMetric {
  SymMatrix g;  // n x n, symmetric

  const ScalarField& entry(int a, int b) const { return g[a][b]; }
  Eigen::MatrixXd at(const Point& p) const { return sym_eval(g, p); }
};

BundleMetric identity_metric(const ChartPtr& chart, int rank);
ScalarField metric_pair(const BundleMetric& g, const Section& s,
                        const Section& t);

/// lambda(d/dx_i) as a section.
Section splitting_column(const LieAlgebroid& A, const Splitting& lam, int i);
/// lambda(X) for a base vector field X given by m coordinate fields.
Section apply_splitting(const LieAlgebroid& A, const Splitting& lam,
                        const std::vector<ScalarField>& X);

/// The g-orthogonal lift: lambda = G^{-1} rho^T (rho G^{-1} rho^T)^{-1},
/// built symbolically; verifies rho lambda = id and anchor surjectivity at
/// sample points.
Splitting splitting_from_metric(const LieAlgebroid& A, const BundleMetric& g,
                                const SamplePlan& plan, double tol);

/// nabla^lambda_X T = [lambda(X), T]; T must be pointwise in ker rho at
/// samples.
Section adjoint_connection(const LieAlgebroid& A, const Splitting& lam,
                           const std::vector<ScalarField>& X, const Section& T,
                           const SamplePlan& plan, double tol);

/// Omega^lambda(d/dx_i, d/dx_j) = 1/2 [lambda(d/dx_i), lambda(d/dx_j)]
/// (coordinate fields commute).
Section curvature_two_form(const LieAlgebroid& A, const Splitting& lam, int i,
                           int j);

struct TransitiveBuildInput {
  ChartPtr chart;
  int fiber_rank = 0;
  std::vector<std::string> fiber_names;
  /// c<d -> r coefficients of [s_c, s_d] in the fiber frame.
  std::map<std::pair<int, int>, std::vector<ScalarField>> fiber_structure;
  /// gamma[i][c][d]: coefficient of s_c in nabla_{d/dx_i} s_d (r x r per
  /// base coordinate); empty means flat.
  std::vector<SymMatrix> gamma;
  /// i<j -> r coefficients of Omega(d/dx_i, d/dx_j); absent pairs are zero.
  std::map<std::pair<int, int>, std::vector<ScalarField>> omega;
};

/// Rank-(m+r) algebroid with frame (d/dx_1..d/dx_m, s_1..s_r) and the
/// bracket [[X+S, Y+T]] = [X,Y] + nabla_X T - nabla_Y S + [S,T] + Omega(X,Y).
/// Throws PreconditionError if the result fails validate_algebroid (the
/// (nabla, Omega) pair violated the compatibility hypotheses).
LieAlgebroid build_transitive(const TransitiveBuildInput& input,
                              const SamplePlan& plan, double tol);

/// Checks nabla^lambda g_L = 0 for the g-orthogonal splitting and the
/// ad-invariance identity g([S,T],U) = g(S,[T,U]) on kernel frames.
ValidationReport check_invariant_metric(const LieAlgebroid& A,
                                        const BundleMetric& g,
                                        const SamplePlan& plan, double tol);

/// Christoffel coefficients of the Levi-Civita connection at a point:
/// nabla_{e_a} e_b = sum_c Gamma^c_{ab} e_c.
struct Christoffel {
  int n = 0;
  std::vector<double> coef;  // (a*n + b)*n + c
  double at(int a, int b, int c) const { return coef[(a * n + b) * n + c]; }
  double& at(int a, int b, int c) { return coef[(a * n + b) * n + c]; }
  /// nabla_{u} v for constant-coefficient u, v at the point.
  Eigen::VectorXd apply(const Eigen::VectorXd& u,
                        const Eigen::VectorXd& v) const;
};

/// Koszul identity solved pointwise:
/// 2 g(nabla_S T, U) = rho(S).g(T,U) + rho(T).g(S,U) - rho(U).g(S,T)
///                     + g([S,T],U) - g([S,U],T) - g([T,U],S).
Christoffel levi_civita_at(const LieAlgebroid& A, const BundleMetric& g,
                           const Point& p);

}  // namespace algebroid

#endif
