#pragma once

// Dense linear-algebra substrate shared by every other module. Matrices are
// Eigen double-precision dynamic matrices; the helpers here add the
// contract checks (finiteness, symmetry, rank) the rest of the code relies on.

#include <Eigen/Dense>

#include "grassdict/errors.hpp"

namespace grassdict {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

inline constexpr double kDefaultRankTol = 1e-10;

struct SvdResult {
  Mat left_vectors;
  Vec singular_values;  // nonincreasing, nonnegative
  Mat right_vectors;
};

struct SymEigenResult {
  Vec values;  // nondecreasing
  Mat vectors;
};

namespace linops {

[[nodiscard]] bool all_finite(const Mat& m);
void require_finite(const Mat& m, const char* what);

/// Thin SVD. Throws DecompositionError on non-finite input or output.
[[nodiscard]] SvdResult svd(const Mat& m);

/// Singular values only, nonincreasing.
[[nodiscard]] Vec singular_values(const Mat& m);

/// Orthonormal basis of the column space of m. The numerical rank counts
/// singular values above rank_tol * sigma_max. Throws EmptySpanError if m == 0.
[[nodiscard]] Mat orthonormal_basis(const Mat& m, double rank_tol = kDefaultRankTol);

/// Eigen-decomposition of a symmetric matrix (asymmetry above 1e-12 relative
/// is rejected with ContractError).
[[nodiscard]] SymEigenResult sym_eigen(const Mat& m);

/// argmin_X ||a X - b||_F. Throws RankDeficiencyError when a does not have
/// full column rank at tolerance 1e-10.
[[nodiscard]] Mat lstsq(const Mat& a, const Mat& b);

/// Minimum-norm least squares through a complete orthogonal decomposition;
/// used where rank deficiency is tolerated.
[[nodiscard]] Mat pinv_solve(const Mat& a, const Mat& b, double rank_tol = kDefaultRankTol);

/// Frobenius inner product trace(b^T a).
[[nodiscard]] inline double frob_inner(const Mat& a, const Mat& b) {
  return (a.array() * b.array()).sum();
}

}  // namespace linops
}  // namespace grassdict
