#include "algebroid/cartan_calculus.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "algebroid/linalg.hpp"

namespace algebroid {

namespace {

// Sorts idx in place; returns the permutation sign, or 0 on a repeat.
int sort_sign(std::vector<int>& idx) {
  int sign = 1;
  for (std::size_t i = 1; i < idx.size(); ++i) {
    for (std::size_t j = i; j > 0 && idx[j] < idx[j - 1]; --j) {
      std::swap(idx[j], idx[j - 1]);
      sign = -sign;
    }
  }
  for (std::size_t i = 1; i < idx.size(); ++i)
    if (idx[i] == idx[i - 1]) return 0;
  return sign;
}

void for_each_increasing(int n, int k,
                         const std::function<void(const std::vector<int>&)>& f) {
  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i;
  if (k > n) return;
  while (true) {
    f(idx);
    int i = k - 1;
    while (i >= 0 && idx[i] == n - k + i) --i;
    if (i < 0) break;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace

AlgebroidForm::AlgebroidForm(ChartPtr chart, int rank, int degree)
    : chart_(std::move(chart)), rank_(rank), degree_(degree) {
  // degree > rank is allowed and is identically zero
  if (degree < 0) throw ShapeError("form degree must be nonnegative");
}

void AlgebroidForm::add(std::vector<int> idx, const ScalarField& f) {
  if (static_cast<int>(idx.size()) != degree_)
    throw ShapeError("index tuple length must equal the form degree");
  for (int i : idx)
    if (i < 0 || i >= rank_) throw ShapeError("frame index out of range");
  int sign = sort_sign(idx);
  if (sign == 0) {
    if (!f.is_zero())
      throw ShapeError("repeated indices require a zero coefficient");
    return;
  }
  ScalarField g = sign == 1 ? f : -f;
  auto it = coeffs_.find(idx);
  if (it == coeffs_.end()) {
    if (!g.is_zero()) coeffs_.emplace(std::move(idx), g);
  } else {
    it->second = it->second + g;
    if (it->second.is_zero()) coeffs_.erase(it);
  }
}

ScalarField AlgebroidForm::coeff(const std::vector<int>& sorted_idx) const {
  auto it = coeffs_.find(sorted_idx);
  if (it == coeffs_.end()) return ScalarField::constant(chart_, 0.0);
  return it->second;
}

ScalarField AlgebroidForm::component(std::vector<int> idx) const {
  int sign = sort_sign(idx);
  if (sign == 0) return ScalarField::constant(chart_, 0.0);
  ScalarField c = coeff(idx);
  return sign == 1 ? c : -c;
}

Eigen::MatrixXd AlgebroidForm::matrix_at(const Point& p) const {
  if (degree_ != 2) throw ShapeError("matrix_at requires a degree-2 form");
  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(rank_, rank_);
  for (const auto& [idx, f] : coeffs_) {
    double v = f(p);
    W(idx[0], idx[1]) = v;
    W(idx[1], idx[0]) = -v;
  }
  return W;
}

double AlgebroidForm::evaluate(
    const Point& p, const std::vector<Eigen::VectorXd>& vectors) const {
  if (static_cast<int>(vectors.size()) != degree_)
    throw ShapeError("evaluate needs one vector per form slot");
  if (degree_ == 0) return coeffs_.empty() ? 0.0 : coeffs_.begin()->second(p);
  double acc = 0.0;
  for (const auto& [idx, f] : coeffs_) {
    // determinant of the degree x degree matrix of selected components
    Eigen::MatrixXd M(degree_, degree_);
    for (int r = 0; r < degree_; ++r)
      for (int c = 0; c < degree_; ++c) M(r, c) = vectors[c][idx[r]];
    acc += f(p) * M.determinant();
  }
  return acc;
}

ScalarField AlgebroidForm::apply(const Section& s) const {
  if (degree_ != 1) throw ShapeError("apply requires a degree-1 form");
  ScalarField acc = ScalarField::constant(chart_, 0.0);
  for (const auto& [idx, f] : coeffs_) acc = acc + f * s[idx[0]];
  return acc;
}

AlgebroidForm operator+(const AlgebroidForm& a, const AlgebroidForm& b) {
  if (a.degree() != b.degree() || a.rank() != b.rank())
    throw ShapeError("form shape mismatch");
  AlgebroidForm r = a;
  for (const auto& [idx, f] : b.coeffs()) r.add(idx, f);
  return r;
}

AlgebroidForm operator-(const AlgebroidForm& a, const AlgebroidForm& b) {
  return a + (-1.0) * b;
}

AlgebroidForm operator*(const ScalarField& f, const AlgebroidForm& a) {
  AlgebroidForm r(a.chart(), a.rank(), a.degree());
  for (const auto& [idx, g] : a.coeffs()) r.add(idx, f * g);
  return r;
}

AlgebroidForm operator*(double c, const AlgebroidForm& a) {
  return ScalarField::constant(a.chart(), c) * a;
}

AlgebroidForm wedge(const AlgebroidForm& a, const AlgebroidForm& b) {
  if (a.rank() != b.rank()) throw ShapeError("form rank mismatch");
  AlgebroidForm r(a.chart(), a.rank(), a.degree() + b.degree());
  for (const auto& [ia, fa] : a.coeffs()) {
    for (const auto& [ib, fb] : b.coeffs()) {
      std::vector<int> idx = ia;
      idx.insert(idx.end(), ib.begin(), ib.end());
      std::vector<int> probe = idx;
      if (sort_sign(probe) == 0) continue;  // shared index, term vanishes
      r.add(std::move(idx), fa * fb);
    }
  }
  return r;
}

AlgebroidForm wedge_power(const AlgebroidForm& a, int n) {
  if (n < 0) throw ShapeError("wedge power must be nonnegative");
  AlgebroidForm r(a.chart(), a.rank(), 0);
  r.add({}, ScalarField::constant(a.chart(), 1.0));
  for (int i = 0; i < n; ++i) r = wedge(r, a);
  return r;
}

AlgebroidForm interior_product(const Section& s, const AlgebroidForm& a) {
  if (a.degree() == 0) throw ShapeError("interior product needs degree >= 1");
  AlgebroidForm r(a.chart(), a.rank(), a.degree() - 1);
  for (const auto& [idx, f] : a.coeffs()) {
    for (int slot = 0; slot < a.degree(); ++slot) {
      if (s[idx[slot]].is_zero()) continue;
      std::vector<int> rest;
      for (int j = 0; j < a.degree(); ++j)
        if (j != slot) rest.push_back(idx[j]);
      ScalarField term = f * s[idx[slot]];
      r.add(std::move(rest), slot % 2 == 0 ? term : -term);
    }
  }
  return r;
}

AlgebroidForm exterior_derivative(const LieAlgebroid& A,
                                  const AlgebroidForm& a) {
  const int n = A.rank();
  const int k = a.degree();
  AlgebroidForm r(a.chart(), n, k + 1);
  for_each_increasing(n, k + 1, [&](const std::vector<int>& idx) {
    ScalarField acc = A.zero_field();
    // sum_i (-1)^i rho(e_{a_i}) . alpha(..hat i..)
    for (int i = 0; i <= k; ++i) {
      std::vector<int> rest;
      for (int j = 0; j <= k; ++j)
        if (j != i) rest.push_back(idx[j]);
      ScalarField term = A.frame_derivative(idx[i], a.component(rest));
      acc = i % 2 == 0 ? acc + term : acc - term;
    }
    // sum_{i<j} (-1)^{i+j} alpha([e_{a_i}, e_{a_j}], ..hat i, hat j..)
    for (int i = 0; i <= k; ++i) {
      for (int j = i + 1; j <= k; ++j) {
        std::vector<int> rest;
        for (int l = 0; l <= k; ++l)
          if (l != i && l != j) rest.push_back(idx[l]);
        ScalarField term = A.zero_field();
        for (int c = 0; c < n; ++c) {
          ScalarField cf = A.structure_fn(idx[i], idx[j], c);
          if (cf.is_zero()) continue;
          std::vector<int> full;
          full.push_back(c);
          full.insert(full.end(), rest.begin(), rest.end());
          term = term + cf * a.component(full);
        }
        acc = (i + j) % 2 == 0 ? acc + term : acc - term;
      }
    }
    if (!acc.is_zero()) r.add(idx, acc);
  });
  return r;
}

AlgebroidForm lie_derivative(const LieAlgebroid& A, const Section& s,
                             const AlgebroidForm& a) {
  if (a.degree() == 0) {
    AlgebroidForm r(a.chart(), a.rank(), 0);
    ScalarField f = a.coeffs().empty() ? A.zero_field()
                                       : a.coeffs().begin()->second;
    r.add({}, A.anchor_derivative(s, f));
    return r;
  }
  AlgebroidForm rhs = exterior_derivative(A, interior_product(s, a));
  if (a.degree() == a.rank()) return rhs;  // d(alpha) vanishes above top degree
  return interior_product(s, exterior_derivative(A, a)) + rhs;
}

AlgebroidForm pullback(const AlgebroidMorphism& phi, const AlgebroidForm& a) {
  const LieAlgebroid& A = *phi.source;
  const int n = A.rank();
  const int k = a.degree();
  AlgebroidForm r(A.chart(), n, k);
  if (k == 0) {
    ScalarField f = a.coeffs().empty()
                        ? ScalarField::constant(a.chart(), 0.0)
                        : a.coeffs().begin()->second;
    r.add({}, f.compose(phi.base_map));
    return r;
  }
  for_each_increasing(n, k, [&](const std::vector<int>& idx) {
    ScalarField acc = A.zero_field();
    // (Phi^* alpha)(e_{a_1..a_k}) = alpha(Phi e_{a_1}, .., Phi e_{a_k})
    for (const auto& [tgt, f] : a.coeffs()) {
      // sum over permutations via the k x k symbolic determinant
      SymMatrix M(k, std::vector<ScalarField>(k, A.zero_field()));
      for (int rr = 0; rr < k; ++rr)
        for (int cc = 0; cc < k; ++cc)
          M[rr][cc] = phi.fiber_map[tgt[rr]][idx[cc]];
      acc = acc + f.compose(phi.base_map) * sym_det(M);
    }
    if (!acc.is_zero()) r.add(idx, acc);
  });
  return r;
}

double form_abs_at(const AlgebroidForm& a, const Point& p) {
  double m = 0.0;
  for (const auto& [idx, f] : a.coeffs()) m = std::max(m, std::abs(f(p)));
  return m;
}

}  // namespace algebroid
