#ifndef ALGEBROID_SYMPLECTIC_HPP
#define ALGEBROID_SYMPLECTIC_HPP

#include <functional>
#include <optional>

#include "algebroid/cartan_calculus.hpp"
#include "algebroid/transitive_geometry.hpp"

namespace algebroid {

/// Endomorphism of the frame bundle: J[c][a] is the coefficient of e_c in
/// J(e_a).
struct AlmostComplexStructure {
  SymMatrix J;
  Eigen::MatrixXd at(const Point& p) const { return sym_eval(J, p); }
};

struct CompatibleTriple {
  AlgebroidForm omega;
  AlmostComplexStructure J;
  BundleMetric g;
};

/// A function on the chart known pointwise with derivative access.
/// `hessian` may be empty; operations state what they require.
struct PointFn {
  std::function<double(const Point&)> value;
  std::function<Eigen::VectorXd(const Point&)> gradient;
  std::function<Eigen::MatrixXd(const Point&)> hessian;
};

PointFn point_fn(const ScalarField& f);

/// Closedness (d^A omega = 0) and |det| of the frame matrix at samples.
ValidationReport check_symplectic(const LieAlgebroid& A,
                                  const AlgebroidForm& omega,
                                  const SamplePlan& plan, double tol);

/// Unique a with omega_p(a, e_b) = (d^A f)_p(e_b); requires f.gradient.
Eigen::VectorXd hamiltonian_section_at(const LieAlgebroid& A,
                                       const AlgebroidForm& omega,
                                       const PointFn& f, const Point& p);
/// d(a_f)/dx_i columns, obtained by differentiating through the solve;
/// requires f.hessian.
Eigen::MatrixXd hamiltonian_section_jacobian_at(const LieAlgebroid& A,
                                                const AlgebroidForm& omega,
                                                const PointFn& f,
                                                const Point& p);

/// {f,g}(p) = omega_p(a_f, a_g), with gradient access (value needs
/// f,g gradients; gradient needs their hessians). The returned hessian is
/// empty, so brackets nest exactly once more.
PointFn poisson_bracket(const AlgebroidPtr& A, const AlgebroidForm& omega,
                        const PointFn& f, const PointFn& g);

/// Symbolic Hamiltonian sections of the coordinate functions (adjugate
/// inverse of the omega frame matrix).
std::vector<Section> coordinate_hamiltonian_sections(const LieAlgebroid& A,
                                                     const AlgebroidForm& omega);

struct PoissonBivector {
  ChartPtr chart;
  SymMatrix pi;  // m x m antisymmetric, pi[i][j] = {x_i, x_j}
};

/// pi^{ij} = {x_i, x_j} induced by omega.
PoissonBivector poisson_from_symplectic(const LieAlgebroid& A,
                                        const AlgebroidForm& omega);

ValidationReport check_compatible_triple(const LieAlgebroid& A,
                                         const CompatibleTriple& triple,
                                         const SamplePlan& plan, double tol);

/// N(S,T) = [JS,JT] - [S,T] - J[JS,T] - J[S,JT]
Section nijenhuis(const LieAlgebroid& A, const AlmostComplexStructure& J,
                  const Section& s, const Section& t);

struct AdmissibilityResult {
  ValidationReport report;
  /// Induced base almost complex structure (transitive path only).
  std::optional<SymMatrix> induced_JM;
};

/// With JM given: residual of rho J - JM rho. Without: checks that J
/// preserves ker rho pointwise, constructs JM through a splitting and
/// verifies JM^2 = -id.
AdmissibilityResult check_admissible(const LieAlgebroid& A,
                                     const AlmostComplexStructure& J,
                                     const std::optional<SymMatrix>& JM,
                                     const SamplePlan& plan, double tol);

struct FiberDecomposition {
  Point p;
  Eigen::MatrixXd E1, E2, L1, L2;  // orthonormal column blocks
  int dim_E1() const { return static_cast<int>(E1.cols()); }
  int dim_E2() const { return static_cast<int>(E2.cols()); }
  int dim_L1() const { return static_cast<int>(L1.cols()); }
  int dim_L2() const { return static_cast<int>(L2.cols()); }
};

/// L1 = L ∩ L^omega, L2 = g-complement of L1 in L, E1 = J(L1),
/// E2 = (L + E1)^omega. Throws RankInstability at ill-conditioned points.
FiberDecomposition decompose_fiber(const LieAlgebroid& A,
                                   const CompatibleTriple& triple,
                                   const Point& p,
                                   double rank_tol = kDefaultRankTolerance);

/// Lambda_p = rho_p(E2 + L1), orthonormal basis of a subspace of T_pM.
Eigen::MatrixXd symplectic_distribution_at(const LieAlgebroid& A,
                                           const CompatibleTriple& triple,
                                           const Point& p,
                                           double rank_tol = kDefaultRankTolerance);

struct BaseTriple {
  SymMatrix omega_M;  // m x m
  SymMatrix J_M;
  SymMatrix g_M;
  ValidationReport report;
};

/// Transitive + admissible + Lambda = TM: builds (omega_M, J_M, g_M) from
/// the omega-complement lifts, checks compatibility, d omega_M = 0, and
/// Poisson coincidence against the algebroid bracket.
BaseTriple induce_base_triple(const AlgebroidPtr& A,
                              const CompatibleTriple& triple,
                              const SamplePlan& plan, double tol);

/// (T*M, pi^sharp, [,]_pi): frame {dx_1..dx_m}, structure functions
/// C^k_{ij} = d pi^{ij} / dx_k. Throws PreconditionError when pi fails
/// Jacobi at samples. See docs/conventions.md for the sign conventions.
AlgebroidPtr cotangent_algebroid(const PoissonBivector& pi,
                                 const SamplePlan& plan, double tol);

struct PsiResult {
  AlgebroidPtr source;  // the sub-algebroid on L^omega, frame = omega-lifts
  AlgebroidPtr cotangent;
  PoissonBivector pi;
  AlgebroidMorphism morphism;
  ValidationReport report;
};

/// psi(a) = -lambda^*(i_a omega) from the L^omega block onto the cotangent
/// algebroid of the induced Poisson structure; runs check_morphism and
/// reports the identity rho(a_f) = -pi^sharp(df).
PsiResult build_psi_morphism(const AlgebroidPtr& A, const AlgebroidForm& omega,
                             const BundleMetric& g, const SamplePlan& plan,
                             double tol);

/// Kernel-bracket theorems: verifies hypotheses (compatible triple,
/// invariant metric, admissible J; Kaehler variant: N_J and d omega small),
/// then asserts the vanishing of the bracket on kernel frames; also reports
/// the curvature of the omega-complement splitting when omega|_L is
/// nondegenerate.
ValidationReport check_kernel_bracket_theorems(const AlgebroidPtr& A,
                                               const CompatibleTriple& triple,
                                               const SamplePlan& plan,
                                               double tol);

}  // namespace algebroid

#endif
