#include "algebroid/linalg.hpp"

namespace algebroid {

namespace {

struct SvdSplit {
  Eigen::MatrixXd null_basis;   // right singular vectors below threshold
  Eigen::MatrixXd range_basis;  // left singular vectors above threshold
};

SvdSplit svd_split(const Eigen::MatrixXd& M, double rel_tol,
                   bool check_stability) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(
      M, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double smax = sv.size() ? sv[0] : 0.0;
  const double thresh = rel_tol * std::max(smax, 1.0);
  if (check_stability) {
    for (int i = 0; i < sv.size(); ++i)
      if (sv[i] > thresh / 10 && sv[i] < thresh * 10)
        throw RankInstability(
            "singular value " + std::to_string(sv[i]) +
            " within a factor 10 of the rank threshold " +
            std::to_string(thresh));
  }
  int r = 0;
  while (r < sv.size() && sv[r] > thresh) ++r;
  SvdSplit out;
  out.null_basis = svd.matrixV().rightCols(M.cols() - r);
  out.range_basis = svd.matrixU().leftCols(r);
  return out;
}

}  // namespace

Eigen::MatrixXd nullspace(const Eigen::MatrixXd& M, double rel_tol,
                          bool check_stability) {
  if (M.rows() == 0) return Eigen::MatrixXd::Identity(M.cols(), M.cols());
  return svd_split(M, rel_tol, check_stability).null_basis;
}

Eigen::MatrixXd orthonormal_columns(const Eigen::MatrixXd& M, double rel_tol) {
  if (M.cols() == 0) return Eigen::MatrixXd(M.rows(), 0);
  return svd_split(M, rel_tol, false).range_basis;
}

Eigen::MatrixXd subspace_intersection(const Eigen::MatrixXd& U,
                                      const Eigen::MatrixXd& V,
                                      double rel_tol) {
  if (U.cols() == 0 || V.cols() == 0) return Eigen::MatrixXd(U.rows(), 0);
  // Solve U u = V v: nullspace of [U, -V] yields coefficient pairs.
  Eigen::MatrixXd stacked(U.rows(), U.cols() + V.cols());
  stacked << U, -V;
  Eigen::MatrixXd ns = nullspace(stacked, rel_tol);
  if (ns.cols() == 0) return Eigen::MatrixXd(U.rows(), 0);
  return orthonormal_columns(U * ns.topRows(U.cols()), rel_tol);
}

SymMatrix sym_zero_matrix(const ChartPtr& chart, int rows, int cols) {
  return SymMatrix(rows, std::vector<ScalarField>(
                             cols, ScalarField::constant(chart, 0.0)));
}

SymMatrix sym_identity(const ChartPtr& chart, int n) {
  SymMatrix I = sym_zero_matrix(chart, n, n);
  for (int i = 0; i < n; ++i) I[i][i] = ScalarField::constant(chart, 1.0);
  return I;
}

SymMatrix sym_matmul(const SymMatrix& A, const SymMatrix& B) {
  const int r = static_cast<int>(A.size());
  const int k = static_cast<int>(B.size());
  const int c = static_cast<int>(B[0].size());
  SymMatrix R = sym_zero_matrix(A[0][0].chart(), r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j)
      for (int l = 0; l < k; ++l) R[i][j] = R[i][j] + A[i][l] * B[l][j];
  return R;
}

SymMatrix sym_transpose(const SymMatrix& A) {
  const int r = static_cast<int>(A.size());
  const int c = static_cast<int>(A[0].size());
  SymMatrix R(c, std::vector<ScalarField>(r));
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) R[j][i] = A[i][j];
  return R;
}

namespace {

ScalarField minor_det(const SymMatrix& A, const std::vector<int>& rows,
                      const std::vector<int>& cols) {
  const auto chart = A[0][0].chart();
  if (rows.empty()) return ScalarField::constant(chart, 1.0);
  if (rows.size() == 1) return A[rows[0]][cols[0]];
  ScalarField acc = ScalarField::constant(chart, 0.0);
  std::vector<int> sub_rows(rows.begin() + 1, rows.end());
  for (std::size_t j = 0; j < cols.size(); ++j) {
    std::vector<int> sub_cols;
    for (std::size_t l = 0; l < cols.size(); ++l)
      if (l != j) sub_cols.push_back(cols[l]);
    ScalarField term = A[rows[0]][cols[j]] * minor_det(A, sub_rows, sub_cols);
    acc = (j % 2 == 0) ? acc + term : acc - term;
  }
  return acc;
}

}  // namespace

ScalarField sym_det(const SymMatrix& A) {
  const int n = static_cast<int>(A.size());
  std::vector<int> all(n);
  for (int i = 0; i < n; ++i) all[i] = i;
  return minor_det(A, all, all);
}

SymMatrix sym_inverse(const SymMatrix& A) {
  const int n = static_cast<int>(A.size());
  const auto chart = A[0][0].chart();
  const ScalarField det = sym_det(A);
  SymMatrix inv = sym_zero_matrix(chart, n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      std::vector<int> rows, cols;
      for (int k = 0; k < n; ++k) {
        if (k != j) rows.push_back(k);
        if (k != i) cols.push_back(k);
      }
      ScalarField cof = minor_det(A, rows, cols);
      if ((i + j) % 2 == 1) cof = -cof;
      inv[i][j] = cof / det;
    }
  }
  return inv;
}

std::vector<ScalarField> sym_matvec(const SymMatrix& A,
                                    const std::vector<ScalarField>& x) {
  const int r = static_cast<int>(A.size());
  const int c = static_cast<int>(A[0].size());
  std::vector<ScalarField> y(r, ScalarField::constant(A[0][0].chart(), 0.0));
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) y[i] = y[i] + A[i][j] * x[j];
  return y;
}

Eigen::MatrixXd sym_eval(const SymMatrix& A, const Point& p) {
  const int r = static_cast<int>(A.size());
  const int c = static_cast<int>(A[0].size());
  Eigen::MatrixXd M(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) M(i, j) = A[i][j](p);
  return M;
}

}  // namespace algebroid
