#ifndef ALGEBROID_LINALG_HPP
#define ALGEBROID_LINALG_HPP

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

#include "algebroid/scalar_field.hpp"

namespace algebroid {

/// Raised when singular values fall inside the guard band around the rank
/// threshold, i.e. the rank decision would be unstable at this point.
class RankInstability : public std::runtime_error {
public:
  explicit RankInstability(const std::string& what)
      : std::runtime_error(what) {}
};

/// Orthonormal basis of the nullspace of M. Singular values below
/// rel_tol * sigma_max count as zero. With check_stability set, throws
/// RankInstability if any singular value lies within a factor 10 of the
/// threshold.
Eigen::MatrixXd nullspace(const Eigen::MatrixXd& M, double rel_tol,
                          bool check_stability = false);

/// Orthonormal basis of the column space of M.
Eigen::MatrixXd orthonormal_columns(const Eigen::MatrixXd& M, double rel_tol);

/// Orthonormal basis of span(U) ∩ span(V); U, V have orthonormal columns.
Eigen::MatrixXd subspace_intersection(const Eigen::MatrixXd& U,
                                      const Eigen::MatrixXd& V,
                                      double rel_tol);

// --- symbolic dense matrices (small sizes only; cofactor expansion) ---

using SymMatrix = std::vector<std::vector<ScalarField>>;

SymMatrix sym_zero_matrix(const ChartPtr& chart, int rows, int cols);
SymMatrix sym_identity(const ChartPtr& chart, int n);
SymMatrix sym_matmul(const SymMatrix& A, const SymMatrix& B);
SymMatrix sym_transpose(const SymMatrix& A);
ScalarField sym_det(const SymMatrix& A);
/// Inverse via adjugate; entries are quotients by det(A).
SymMatrix sym_inverse(const SymMatrix& A);
std::vector<ScalarField> sym_matvec(const SymMatrix& A,
                                    const std::vector<ScalarField>& x);
Eigen::MatrixXd sym_eval(const SymMatrix& A, const Point& p);

}  // namespace algebroid

#endif
