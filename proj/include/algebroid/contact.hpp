#ifndef ALGEBROID_CONTACT_HPP
#define ALGEBROID_CONTACT_HPP

#include <optional>

#include "algebroid/symplectic.hpp"

namespace algebroid {

/// eta ^ (d eta)^n nonvanishing and d eta nondegenerate on ker eta, at
/// samples. Rank must be odd (2n+1).
ValidationReport check_contact(const LieAlgebroid& A, const AlgebroidForm& eta,
                               const SamplePlan& plan, double tol);

/// Unique xi with eta(xi) = 1, i_xi d eta = 0; least-squares solve of the
/// stacked (n+1)-row system with the consistency residual asserted.
Eigen::VectorXd reeb_section_at(const LieAlgebroid& A,
                                const AlgebroidForm& eta, const Point& p);

struct ContactHamiltonian {
  Eigen::VectorXd a;  // a_f = S_f - eta(S_f) xi
  double h;           // = rho(xi) . f
};

/// Solves df = i_{S_f} d eta + h eta; requires f.gradient. The returned a_f
/// is solver-independent (the k xi ambiguity is projected out); computed by
/// two pivotings internally and cross-checked.
ContactHamiltonian contact_hamiltonian_section_at(const LieAlgebroid& A,
                                                  const AlgebroidForm& eta,
                                                  const PointFn& f,
                                                  const Point& p);

/// d(a_f)/dx_i columns, by differentiating through the square augmented
/// solve; requires f.hessian.
Eigen::MatrixXd contact_hamiltonian_jacobian_at(const LieAlgebroid& A,
                                                const AlgebroidForm& eta,
                                                const PointFn& f,
                                                const Point& p);

/// {f,g}(p) = d eta_p(a_f, a_g); gradient available when f,g carry
/// hessians (so brackets nest once for the Jacobi test).
PointFn contact_poisson_bracket(const AlgebroidPtr& A,
                                const AlgebroidForm& eta, const PointFn& f,
                                const PointFn& g);

/// Evaluates rho(xi) at samples; when it vanishes, asserts antisymmetry,
/// the product rule, the three-way agreement of {f,g} = rho(a_g).f
/// = -rho(a_f).g, and Jacobi for random polynomial triples. When rho(xi)
/// does not vanish the same residuals are recorded but not asserted.
ValidationReport check_contact_poisson_theorem(const AlgebroidPtr& A,
                                               const AlgebroidForm& eta,
                                               const SamplePlan& plan,
                                               double tol);

struct AlmostContactStructure {
  SymMatrix phi;       // phi[c][a]: coefficient of e_c in phi(e_a)
  Section xi;
  AlgebroidForm eta;
  std::optional<BundleMetric> g;
};

/// eta(xi) = 1, phi^2 = -id + eta (x) xi, metric compatibility when g is
/// present; the Riemannian identity d eta(S,T) = g(S, phi(T)) promotes the
/// structure to contact Riemannian, in which case the computed Reeb section
/// must match xi. The two kernel lemmas are checked at every sample.
ValidationReport check_almost_contact(const AlgebroidPtr& A,
                                      const AlmostContactStructure& acs,
                                      const SamplePlan& plan, double tol);

struct BaseSymplecticResult {
  SymMatrix omega_M;  // m x m, omega = lambda^*(d eta)
  SymMatrix J_M;
  SymMatrix g_M;
  ValidationReport report;
};

/// rho surjective, phi preserving ker rho, g present: computes the
/// g-orthogonal splitting lambda, omega = lambda^*(d eta), the induced
/// (J_M, g_M), checks the base triple, and verifies that the contact
/// Poisson bracket coincides with the base symplectic bracket.
BaseSymplecticResult induce_base_symplectic(const AlgebroidPtr& A,
                                            const AlmostContactStructure& acs,
                                            const SamplePlan& plan,
                                            double tol);

}  // namespace algebroid

#endif
