#pragma once

#include <optional>
#include <vector>

#include "grassdict/grassmann.hpp"

namespace grassdict {

/// Ordered collection of M unit-Frobenius-norm atoms of a common N x rho shape.
class Dictionary {
 public:
  Dictionary() = default;

  /// Validates shapes and unit norms (1e-10).
  explicit Dictionary(std::vector<Atom> atoms);

  /// Rescales every atom to unit Frobenius norm; zero atoms are rejected.
  static Dictionary normalized(std::vector<Atom> atoms);

  [[nodiscard]] std::size_t size() const noexcept { return atoms_.size(); }
  [[nodiscard]] Eigen::Index signal_length() const noexcept { return atoms_.empty() ? 0 : atoms_.front().rows(); }
  [[nodiscard]] Eigen::Index channels() const noexcept { return atoms_.empty() ? 0 : atoms_.front().cols(); }
  [[nodiscard]] const Atom& operator[](std::size_t m) const { return atoms_[m]; }
  [[nodiscard]] const std::vector<Atom>& atoms() const noexcept { return atoms_; }

  /// Atoms flattened column-major into the columns of an (N*rho) x M matrix.
  [[nodiscard]] Mat flattened() const;

  /// Column spans of every atom.
  [[nodiscard]] std::vector<Subspace> subspaces(double rank_tol = kDefaultRankTol) const;

 private:
  std::vector<Atom> atoms_;
};

struct CodeEntry {
  std::size_t index = 0;
  double coeff = 0.0;
  std::optional<Mat> rotation;  // rho x rho orthogonal, rotation-invariant codes only
};

using SparseCode = std::vector<CodeEntry>;

/// Sum of coeff * U_index (* rotation) over the code.
[[nodiscard]] Mat reconstruct(const Dictionary& dict, const SparseCode& code);

}  // namespace grassdict
