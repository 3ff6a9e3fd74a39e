#pragma once

// Principal angles and ground distances between linear subspaces, i.e.
// points of the Grassmannian Gr(k, n).

#include "grassdict/linops.hpp"

namespace grassdict {

/// A multivariate atom is an N x rho matrix; dictionaries keep them at unit
/// Frobenius norm.
using Atom = Mat;

/// Orthonormal basis of a subspace of R^n.
class Subspace {
 public:
  /// Wraps an existing orthonormal basis; throws ContractError when
  /// basis^T basis deviates from the identity by more than 1e-10.
  static Subspace from_orthonormal(Mat basis);

  /// Column span of an arbitrary nonzero matrix.
  static Subspace span_of(const Mat& m, double rank_tol = kDefaultRankTol);

  [[nodiscard]] Eigen::Index ambient_dim() const noexcept { return basis_.rows(); }
  [[nodiscard]] Eigen::Index dim() const noexcept { return basis_.cols(); }
  [[nodiscard]] const Mat& basis() const noexcept { return basis_; }

 private:
  explicit Subspace(Mat basis) : basis_(std::move(basis)) {}
  Mat basis_;
};

/// Principal angles sorted nondecreasing in [0, pi/2]. Cosines and sines are
/// kept alongside the angles: small angles are resolved from the sines of the
/// complement projection, large ones from the cross-Gram cosines.
struct PrincipalAngles {
  Vec angles;
  Vec cosines;
  Vec sines;
};

[[nodiscard]] PrincipalAngles principal_angles(const Subspace& u, const Subspace& w);

// Distances. All require equal ambient dimension; subspaces of unequal
// dimension are compared through the min(dim u, dim w) principal angles.

[[nodiscard]] double geodesic(const Subspace& u, const Subspace& w);
[[nodiscard]] double chordal(const Subspace& u, const Subspace& w);
[[nodiscard]] double chordal_2norm(const Subspace& u, const Subspace& w);
[[nodiscard]] double projection(const Subspace& u, const Subspace& w);
[[nodiscard]] double projection_2norm(const Subspace& u, const Subspace& w);
/// Equal subspace dimensions only.
[[nodiscard]] double fubini_study(const Subspace& u, const Subspace& w);
[[nodiscard]] double spectral(const Subspace& u, const Subspace& w);
[[nodiscard]] double binet_cauchy(const Subspace& u, const Subspace& w);

/// Alternative chordal evaluations, equal subspace dimensions only:
/// sqrt(k - ||A^T B||_F^2) and ||A A^T - B B^T||_F / sqrt(2).
[[nodiscard]] double chordal_gram(const Subspace& u, const Subspace& w);
[[nodiscard]] double chordal_projector(const Subspace& u, const Subspace& w);

/// sqrt(2 - 2 <a, b>_F) for unit-norm atoms of identical shape.
[[nodiscard]] double atom_frobenius_distance(const Atom& a, const Atom& b);

[[nodiscard]] Subspace subspace_of(const Atom& atom, double rank_tol = kDefaultRankTol);

}  // namespace grassdict
