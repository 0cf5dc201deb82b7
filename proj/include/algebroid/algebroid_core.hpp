#ifndef ALGEBROID_CORE_HPP
#define ALGEBROID_CORE_HPP

#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "algebroid/report.hpp"
#include "algebroid/scalar_field.hpp"

namespace algebroid {

/// A section of the algebroid: frame coefficients as scalar fields.
struct Section {
  std::vector<ScalarField> comps;

  Section() = default;
  explicit Section(std::vector<ScalarField> c) : comps(std::move(c)) {}

  int size() const { return static_cast<int>(comps.size()); }
  const ScalarField& operator[](int i) const { return comps[i]; }
  ScalarField& operator[](int i) { return comps[i]; }

  Eigen::VectorXd at(const Point& p) const;
};

Section operator+(const Section& a, const Section& b);
Section operator-(const Section& a, const Section& b);
Section operator-(const Section& a);
Section operator*(const ScalarField& f, const Section& a);
Section operator*(double c, const Section& a);

/// Anchored frame bundle over a chart with structure functions
/// [e_a, e_b] = sum_c C^c_{ab} e_c; only a < b is stored.
class LieAlgebroid {
public:
  using StructureMap = std::map<std::pair<int, int>, std::vector<ScalarField>>;

  LieAlgebroid(ChartPtr chart, std::vector<std::string> frame_names,
               std::vector<std::vector<ScalarField>> anchor,
               StructureMap structure);

  int rank() const { return static_cast<int>(frame_names_.size()); }
  int dim() const { return chart_->dim(); }
  const ChartPtr& chart() const { return chart_; }
  const std::vector<std::string>& frame_names() const { return frame_names_; }
  int frame_index(const std::string& name) const;

  /// Coordinate i of rho(e_a).
  const ScalarField& anchor_entry(int a, int i) const { return anchor_[a][i]; }
  /// C^c_{ab}, antisymmetry sign applied.
  ScalarField structure_fn(int a, int b, int c) const;

  ScalarField zero_field() const;
  ScalarField constant_field(double v) const;
  Section zero_section() const;
  Section frame_section(int a) const;

  /// rho(S) as m coordinate fields.
  std::vector<ScalarField> anchor_apply(const Section& s) const;
  /// rho(S) . f
  ScalarField anchor_derivative(const Section& s, const ScalarField& f) const;
  /// rho(e_a) . f
  ScalarField frame_derivative(int a, const ScalarField& f) const;

  /// [S,T]^c = S^a T^b C^c_{ab} + rho(S).T^c - rho(T).S^c
  Section bracket(const Section& s, const Section& t) const;

  /// m x n anchor matrix at p; column a = rho(e_a)(p).
  Eigen::MatrixXd anchor_at(const Point& p) const;

  /// True when an expression of the algebroid evaluates without a
  /// division-by-near-zero signal at p; used for pole rejection in sampling.
  bool finite_at(const Point& p) const;

private:
  ChartPtr chart_;
  std::vector<std::string> frame_names_;
  std::vector<std::vector<ScalarField>> anchor_;  // [a][i], n rows of m
  StructureMap structure_;                        // a<b only
};

using AlgebroidPtr = std::shared_ptr<const LieAlgebroid>;

/// The tangent algebroid TM of a chart: identity anchor, zero structure.
AlgebroidPtr tangent_algebroid(const ChartPtr& chart);

/// Checks the anchor homomorphism condition and the Jacobi identity on
/// frame sections at sample points.
ValidationReport validate_algebroid(const LieAlgebroid& A,
                                    const SamplePlan& plan, double tol);

/// Orthonormal basis (columns) of ker(rho_p).
Eigen::MatrixXd kernel_basis_at(const LieAlgebroid& A, const Point& p,
                                double rank_tol = kDefaultRankTolerance);

struct AlgebroidMorphism {
  AlgebroidPtr source;
  AlgebroidPtr target;
  /// Target coordinates of the base map, as fields on the source chart.
  std::vector<ScalarField> base_map;
  /// fiber_map[c][a]: coefficient of target frame e'_c in Phi(e_a),
  /// as fields on the source chart.
  std::vector<std::vector<ScalarField>> fiber_map;
};

AlgebroidMorphism identity_morphism(const AlgebroidPtr& A);

/// Checks rho_B(Phi(e_a)) = phi_*(rho_A(e_a)) and bracket preservation on
/// frames at samples; requires the base map Jacobian to have full rank.
ValidationReport check_morphism(const AlgebroidMorphism& phi,
                                const SamplePlan& plan, double tol);

}  // namespace algebroid

#endif
