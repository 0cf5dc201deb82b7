#ifndef ALGEBROID_CARTAN_CALCULUS_HPP
#define ALGEBROID_CARTAN_CALCULUS_HPP

#include <map>
#include <vector>

#include "algebroid/algebroid_core.hpp"

namespace algebroid {

/// Degree-k antisymmetric form on an algebroid of rank n. Coefficients are
/// stored on strictly increasing multi-indices only; access with arbitrary
/// index order applies the permutation sign.
class AlgebroidForm {
public:
  AlgebroidForm(ChartPtr chart, int rank, int degree);

  int degree() const { return degree_; }
  int rank() const { return rank_; }
  const ChartPtr& chart() const { return chart_; }

  /// Add f on the (possibly unsorted) index tuple; the sorted coefficient
  /// receives the permutation sign. Tuples with repeated indices must carry
  /// a zero field.
  void add(std::vector<int> idx, const ScalarField& f);
  void set(std::vector<int> idx, const ScalarField& f) { add(std::move(idx), f); }

  /// Coefficient on a strictly increasing index tuple (zero field if absent).
  ScalarField coeff(const std::vector<int>& sorted_idx) const;
  /// Value on an arbitrary frame index tuple, sign applied.
  ScalarField component(std::vector<int> idx) const;

  const std::map<std::vector<int>, ScalarField>& coeffs() const {
    return coeffs_;
  }

  /// Degree-2 only: the antisymmetric n x n matrix W with
  /// W(a,b) = omega(e_a, e_b) at p.
  Eigen::MatrixXd matrix_at(const Point& p) const;

  /// Multilinear evaluation on numeric fiber vectors at p.
  double evaluate(const Point& p,
                  const std::vector<Eigen::VectorXd>& vectors) const;

  /// Degree-1 only: pairing with a section, as a scalar field.
  ScalarField apply(const Section& s) const;

private:
  ChartPtr chart_;
  int rank_;
  int degree_;
  std::map<std::vector<int>, ScalarField> coeffs_;
};

AlgebroidForm operator+(const AlgebroidForm& a, const AlgebroidForm& b);
AlgebroidForm operator-(const AlgebroidForm& a, const AlgebroidForm& b);
AlgebroidForm operator*(const ScalarField& f, const AlgebroidForm& a);
AlgebroidForm operator*(double c, const AlgebroidForm& a);

AlgebroidForm wedge(const AlgebroidForm& a, const AlgebroidForm& b);
/// n-fold wedge power (degree * n must not exceed the rank slot count).
AlgebroidForm wedge_power(const AlgebroidForm& a, int n);

AlgebroidForm interior_product(const Section& s, const AlgebroidForm& a);

AlgebroidForm exterior_derivative(const LieAlgebroid& A,
                                  const AlgebroidForm& a);

/// L_S = i_S d + d i_S
AlgebroidForm lie_derivative(const LieAlgebroid& A, const Section& s,
                             const AlgebroidForm& a);

/// Phi^*(alpha): alpha lives on the target algebroid; the result lives on
/// the source.
AlgebroidForm pullback(const AlgebroidMorphism& phi, const AlgebroidForm& a);

/// Max absolute coefficient value over all stored indices at p.
double form_abs_at(const AlgebroidForm& a, const Point& p);

}  // namespace algebroid

#endif
