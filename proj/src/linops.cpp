#include "grassdict/linops.hpp"

#include <cmath>
#include <string>

namespace grassdict::linops {

bool all_finite(const Mat& m) { return m.allFinite(); }

void require_finite(const Mat& m, const char* what) {
  if (m.size() == 0) throw ContractError(std::string(what) + ": empty matrix");
  if (!m.allFinite()) throw ContractError(std::string(what) + ": non-finite entries");
}

SvdResult svd(const Mat& m) {
  require_finite(m, "svd");
  Eigen::JacobiSVD<Mat> solver(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (solver.info() != Eigen::Success) throw DecompositionError("svd: decomposition failed");
  SvdResult out{solver.matrixU(), solver.singularValues(), solver.matrixV()};
  if (!out.left_vectors.allFinite() || !out.singular_values.allFinite() ||
      !out.right_vectors.allFinite()) {
    throw DecompositionError("svd: non-finite factors");
  }
  return out;
}

Vec singular_values(const Mat& m) {
  require_finite(m, "singular_values");
  Eigen::JacobiSVD<Mat> solver(m);
  if (solver.info() != Eigen::Success) throw DecompositionError("svd: decomposition failed");
  return solver.singularValues();
}

Mat orthonormal_basis(const Mat& m, double rank_tol) {
  if (!(rank_tol > 0.0)) throw ContractError("orthonormal_basis: rank_tol must be positive");
  require_finite(m, "orthonormal_basis");
  const SvdResult f = svd(m);
  const double top = f.singular_values.size() ? f.singular_values(0) : 0.0;
  if (!(top > 0.0)) throw EmptySpanError("orthonormal_basis: zero matrix spans nothing");
  Eigen::Index rank = 0;
  while (rank < f.singular_values.size() && f.singular_values(rank) > rank_tol * top) ++rank;
  return f.left_vectors.leftCols(rank);
}

SymEigenResult sym_eigen(const Mat& m) {
  require_finite(m, "sym_eigen");
  if (m.rows() != m.cols()) throw ShapeError("sym_eigen: matrix is not square");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw ContractError("sym_eigen: matrix is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Mat> solver(m);
  if (solver.info() != Eigen::Success) throw DecompositionError("sym_eigen: decomposition failed");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

Mat lstsq(const Mat& a, const Mat& b) {
  require_finite(a, "lstsq");
  require_finite(b, "lstsq");
  if (a.rows() != b.rows()) throw ShapeError("lstsq: row counts differ");
  if (a.cols() > a.rows()) throw RankDeficiencyError("lstsq: more unknowns than equations");
  Eigen::ColPivHouseholderQR<Mat> qr(a);
  qr.setThreshold(1e-10);
  if (qr.rank() < a.cols()) throw RankDeficiencyError("lstsq: matrix is rank deficient");
  return qr.solve(b);
}

Mat pinv_solve(const Mat& a, const Mat& b, double rank_tol) {
  require_finite(a, "pinv_solve");
  require_finite(b, "pinv_solve");
  if (a.rows() != b.rows()) throw ShapeError("pinv_solve: row counts differ");
  Eigen::CompleteOrthogonalDecomposition<Mat> cod(a);
  cod.setThreshold(rank_tol);
  return cod.solve(b);
}

}  // namespace grassdict::linops
