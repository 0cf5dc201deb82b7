#include "algebroid/algebroid_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "algebroid/linalg.hpp"

namespace algebroid {

Eigen::VectorXd Section::at(const Point& p) const {
  Eigen::VectorXd v(size());
  for (int i = 0; i < size(); ++i) v[i] = comps[i](p);
  return v;
}

Section operator+(const Section& a, const Section& b) {
  if (a.size() != b.size()) throw ShapeError("section size mismatch");
  Section r;
  for (int i = 0; i < a.size(); ++i) r.comps.push_back(a[i] + b[i]);
  return r;
}

Section operator-(const Section& a, const Section& b) {
  if (a.size() != b.size()) throw ShapeError("section size mismatch");
  Section r;
  for (int i = 0; i < a.size(); ++i) r.comps.push_back(a[i] - b[i]);
  return r;
}

Section operator-(const Section& a) {
  Section r;
  for (int i = 0; i < a.size(); ++i) r.comps.push_back(-a[i]);
  return r;
}

Section operator*(const ScalarField& f, const Section& a) {
  Section r;
  for (int i = 0; i < a.size(); ++i) r.comps.push_back(f * a[i]);
  return r;
}

Section operator*(double c, const Section& a) {
  Section r;
  for (int i = 0; i < a.size(); ++i) r.comps.push_back(c * a[i]);
  return r;
}

LieAlgebroid::LieAlgebroid(ChartPtr chart,
                           std::vector<std::string> frame_names,
                           std::vector<std::vector<ScalarField>> anchor,
                           StructureMap structure)
    : chart_(std::move(chart)),
      frame_names_(std::move(frame_names)),
      anchor_(std::move(anchor)),
      structure_(std::move(structure)) {
  const int n = rank();
  const int m = dim();
  if (n < 1) throw ShapeError("algebroid rank must be positive");
  if (static_cast<int>(anchor_.size()) != n)
    throw ShapeError("anchor must have one row per frame element");
  for (const auto& row : anchor_)
    if (static_cast<int>(row.size()) != m)
      throw ShapeError("anchor row length must match chart dimension");
  for (const auto& [key, coeffs] : structure_) {
    auto [a, b] = key;
    if (!(0 <= a && a < b && b < n))
      throw ShapeError("structure keys must satisfy 0 <= a < b < rank");
    if (static_cast<int>(coeffs.size()) != n)
      throw ShapeError("structure coefficient vectors must have length rank");
  }
}

int LieAlgebroid::frame_index(const std::string& name) const {
  for (int a = 0; a < rank(); ++a)
    if (frame_names_[a] == name) return a;
  return -1;
}

ScalarField LieAlgebroid::structure_fn(int a, int b, int c) const {
  if (a == b) return zero_field();
  const bool flip = a > b;
  if (flip) std::swap(a, b);
  auto it = structure_.find({a, b});
  if (it == structure_.end()) return zero_field();
  return flip ? -it->second[c] : it->second[c];
}

ScalarField LieAlgebroid::zero_field() const {
  return ScalarField::constant(chart_, 0.0);
}

ScalarField LieAlgebroid::constant_field(double v) const {
  return ScalarField::constant(chart_, v);
}

Section LieAlgebroid::zero_section() const {
  return Section(std::vector<ScalarField>(rank(), zero_field()));
}

Section LieAlgebroid::frame_section(int a) const {
  Section s = zero_section();
  s[a] = constant_field(1.0);
  return s;
}

std::vector<ScalarField> LieAlgebroid::anchor_apply(const Section& s) const {
  if (s.size() != rank()) throw ShapeError("section rank mismatch");
  std::vector<ScalarField> out(dim(), zero_field());
  for (int i = 0; i < dim(); ++i)
    for (int a = 0; a < rank(); ++a)
      out[i] = out[i] + anchor_[a][i] * s[a];
  return out;
}

ScalarField LieAlgebroid::anchor_derivative(const Section& s,
                                            const ScalarField& f) const {
  ScalarField out = zero_field();
  for (int a = 0; a < rank(); ++a) {
    if (s[a].is_zero()) continue;
    out = out + s[a] * frame_derivative(a, f);
  }
  return out;
}

ScalarField LieAlgebroid::frame_derivative(int a, const ScalarField& f) const {
  ScalarField out = zero_field();
  for (int i = 0; i < dim(); ++i) {
    if (anchor_[a][i].is_zero()) continue;
    out = out + anchor_[a][i] * f.derivative(i);
  }
  return out;
}

Section LieAlgebroid::bracket(const Section& s, const Section& t) const {
  if (s.size() != rank() || t.size() != rank())
    throw ShapeError("section rank mismatch");
  Section r = zero_section();
  for (int c = 0; c < rank(); ++c) {
    ScalarField acc = zero_field();
    for (const auto& [key, coeffs] : structure_) {
      auto [a, b] = key;
      if (coeffs[c].is_zero()) continue;
      acc = acc + (s[a] * t[b] - s[b] * t[a]) * coeffs[c];
    }
    acc = acc + anchor_derivative(s, t[c]) - anchor_derivative(t, s[c]);
    r[c] = acc;
  }
  return r;
}

Eigen::MatrixXd LieAlgebroid::anchor_at(const Point& p) const {
  Eigen::MatrixXd M(dim(), rank());
  for (int a = 0; a < rank(); ++a)
    for (int i = 0; i < dim(); ++i) M(i, a) = anchor_[a][i](p);
  return M;
}

bool LieAlgebroid::finite_at(const Point& p) const {
  try {
    for (int a = 0; a < rank(); ++a)
      for (int i = 0; i < dim(); ++i) anchor_[a][i](p);
    for (const auto& [key, coeffs] : structure_)
      for (const auto& f : coeffs) f(p);
  } catch (const DivisionByNearZero&) {
    return false;
  }
  return true;
}

AlgebroidPtr tangent_algebroid(const ChartPtr& chart) {
  const int m = chart->dim();
  std::vector<std::string> names;
  std::vector<std::vector<ScalarField>> anchor(
      m, std::vector<ScalarField>(m, ScalarField::constant(chart, 0.0)));
  for (int i = 0; i < m; ++i) {
    names.push_back("d_" + chart->vars()[i]);
    anchor[i][i] = ScalarField::constant(chart, 1.0);
  }
  return std::make_shared<const LieAlgebroid>(chart, std::move(names),
                                              std::move(anchor),
                                              LieAlgebroid::StructureMap{});
}

ValidationReport validate_algebroid(const LieAlgebroid& A,
                                    const SamplePlan& plan, double tol) {
  ValidationReport report(tol);
  const int n = A.rank();
  const int m = A.dim();

  // (i) anchor homomorphism on frames:
  //   sum_c C^c_{ab} rho^i_c = sum_j (rho^j_a d_j rho^i_b - rho^j_b d_j rho^i_a)
  std::vector<ScalarField> hom_residuals;
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      for (int i = 0; i < m; ++i) {
        ScalarField lhs = A.zero_field();
        for (int c = 0; c < n; ++c)
          lhs = lhs + A.structure_fn(a, b, c) * A.anchor_entry(c, i);
        ScalarField rhs = A.frame_derivative(a, A.anchor_entry(b, i)) -
                          A.frame_derivative(b, A.anchor_entry(a, i));
        hom_residuals.push_back(lhs - rhs);
      }
    }
  }

  // (ii) Jacobiator on frames via the bracket.
  std::vector<ScalarField> jac_residuals;
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      for (int c = b + 1; c < n; ++c) {
        Section jac =
            A.bracket(A.bracket(A.frame_section(a), A.frame_section(b)),
                      A.frame_section(c)) +
            A.bracket(A.bracket(A.frame_section(b), A.frame_section(c)),
                      A.frame_section(a)) +
            A.bracket(A.bracket(A.frame_section(c), A.frame_section(a)),
                      A.frame_section(b));
        for (int d = 0; d < n; ++d)
          if (!jac[d].is_zero()) jac_residuals.push_back(jac[d]);
      }
    }
  }

  auto pts = sample_points(*A.chart(), plan,
                           [&](const Point& p) { return A.finite_at(p); });
  ResidualMax hom, jac;
  for (const auto& p : pts) {
    for (const auto& r : hom_residuals) hom.update(std::abs(r(p)), p);
    for (const auto& r : jac_residuals) jac.update(std::abs(r(p)), p);
    if (hom_residuals.empty()) hom.update(0.0, p);
    if (jac_residuals.empty()) jac.update(0.0, p);
  }
  report.add_check("anchor_homomorphism", hom);
  report.add_check("jacobi_identity", jac);
  return report;
}

Eigen::MatrixXd kernel_basis_at(const LieAlgebroid& A, const Point& p,
                                double rank_tol) {
  return nullspace(A.anchor_at(p), rank_tol);
}

AlgebroidMorphism identity_morphism(const AlgebroidPtr& A) {
  AlgebroidMorphism phi;
  phi.source = A;
  phi.target = A;
  const auto chart = A->chart();
  for (int i = 0; i < A->dim(); ++i)
    phi.base_map.push_back(ScalarField::variable(chart, i));
  phi.fiber_map = sym_identity(chart, A->rank());
  return phi;
}

ValidationReport check_morphism(const AlgebroidMorphism& phi,
                                const SamplePlan& plan, double tol) {
  ValidationReport report(tol);
  const LieAlgebroid& A = *phi.source;
  const LieAlgebroid& B = *phi.target;
  const int n = A.rank();
  const int np = B.rank();
  const int m = A.dim();
  const int mp = B.dim();
  if (static_cast<int>(phi.base_map.size()) != mp ||
      static_cast<int>(phi.fiber_map.size()) != np ||
      static_cast<int>(phi.fiber_map[0].size()) != n)
    throw ShapeError("morphism shape mismatch");

  // Target fields composed with the base map live on the source chart.
  auto through_base = [&](const ScalarField& f) {
    return f.compose(phi.base_map);
  };

  // rho_B(Phi(e_a))^i - (phi_* rho_A(e_a))^i, symbolically on the source.
  std::vector<ScalarField> anchor_residuals;
  for (int a = 0; a < n; ++a) {
    for (int i = 0; i < mp; ++i) {
      ScalarField lhs = A.zero_field();
      for (int c = 0; c < np; ++c)
        lhs = lhs + phi.fiber_map[c][a] * through_base(B.anchor_entry(c, i));
      ScalarField rhs = A.zero_field();
      for (int j = 0; j < m; ++j)
        rhs = rhs + A.anchor_entry(a, j) * phi.base_map[i].derivative(j);
      anchor_residuals.push_back(lhs - rhs);
    }
  }

  // Phi([e_a, e_b]) vs [Phi(e_a), Phi(e_b)] over the diffeomorphic base:
  // the target-side derivative terms reduce through the anchor condition to
  // source-side derivatives of the fiber map.
  std::vector<ScalarField> bracket_residuals;
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      for (int c = 0; c < np; ++c) {
        ScalarField lhs = A.zero_field();
        for (int d = 0; d < n; ++d)
          lhs = lhs + A.structure_fn(a, b, d) * phi.fiber_map[c][d];
        ScalarField rhs = A.zero_field();
        for (int d = 0; d < np; ++d) {
          for (int e = 0; e < np; ++e) {
            ScalarField cde = through_base(B.structure_fn(d, e, c));
            if (cde.is_zero()) continue;
            rhs = rhs + phi.fiber_map[d][a] * phi.fiber_map[e][b] * cde;
          }
        }
        rhs = rhs + A.frame_derivative(a, phi.fiber_map[c][b]) -
              A.frame_derivative(b, phi.fiber_map[c][a]);
        bracket_residuals.push_back(lhs - rhs);
      }
    }
  }

  auto pts = sample_points(*A.chart(), plan,
                           [&](const Point& p) { return A.finite_at(p); });

  // Precondition: base map nondegenerate at samples.
  double min_sigma = std::numeric_limits<double>::infinity();
  for (const auto& p : pts) {
    Eigen::MatrixXd Jac(mp, m);
    for (int i = 0; i < mp; ++i)
      for (int j = 0; j < m; ++j) Jac(i, j) = phi.base_map[i].derivative(j)(p);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(Jac);
    min_sigma = std::min(min_sigma, svd.singularValues().minCoeff());
  }
  if (min_sigma < 1e-8)
    throw PreconditionError("morphism base map degenerate at a sample point");

  ResidualMax anch, brck;
  for (const auto& p : pts) {
    for (const auto& r : anchor_residuals) anch.update(std::abs(r(p)), p);
    for (const auto& r : bracket_residuals) brck.update(std::abs(r(p)), p);
    if (bracket_residuals.empty()) brck.update(0.0, p);
  }
  report.add_check("morphism_anchor", anch);
  report.add_check("morphism_bracket", brck);
  return report;
}

}  // namespace algebroid
