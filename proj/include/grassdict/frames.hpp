#pragma once

// Frame-theoretic diagnostics for univariate dictionaries: the frame
// elements are the columns of an N x M matrix.

#include <optional>

#include "grassdict/dictionary.hpp"

namespace grassdict {

class Frame {
 public:
  /// Columns are the frame elements. When unit_norm is set every column must
  /// have norm 1 within 1e-12.
  explicit Frame(Mat elements, bool unit_norm = false);

  /// Columns rescaled to unit norm.
  static Frame unit(Mat elements);

  /// Multivariate atoms flattened column-wise into R^(N*rho).
  static Frame from_dictionary(const Dictionary& dict);

  [[nodiscard]] const Mat& elements() const noexcept { return elements_; }
  [[nodiscard]] Eigen::Index dimension() const noexcept { return elements_.rows(); }
  [[nodiscard]] Eigen::Index size() const noexcept { return elements_.cols(); }
  [[nodiscard]] bool unit_norm() const noexcept { return unit_norm_; }

 private:
  Mat elements_;
  bool unit_norm_;
};

/// (<w, u_i>)_i
[[nodiscard]] Vec analysis(const Frame& frame, const Vec& w);
/// sum_i c_i u_i
[[nodiscard]] Vec synthesis(const Frame& frame, const Vec& c);

struct FrameBounds {
  double lower = 0.0;
  double upper = 0.0;
  [[nodiscard]] bool tight(double tol = 1e-9) const { return upper - lower <= tol; }
  [[nodiscard]] bool parseval(double tol = 1e-9) const {
    return tight(tol) && std::abs(lower - 1.0) <= tol && std::abs(upper - 1.0) <= tol;
  }
};

/// Extreme eigenvalues of S = sum_i u_i u_i^T. Throws ContractError ("not a
/// frame") when the elements do not span R^N.
[[nodiscard]] FrameBounds frame_operator_bounds(const Frame& frame);

/// max_{i != j} |<u_i, u_j>| / (||u_i|| ||u_j||). Needs M >= 2.
[[nodiscard]] double coherence(const Frame& frame);

/// sqrt((M - N) / (N (M - 1))), the lower bound on the coherence of M unit
/// vectors in R^N.
[[nodiscard]] double welch_bound(Eigen::Index m, Eigen::Index n);

struct EtfReport {
  bool equiangular_tight = false;
  double coherence = 0.0;
  double welch = 0.0;
  double gap = 0.0;  // coherence - welch
  double min_abs_inner = 0.0;
  double max_abs_inner = 0.0;
  FrameBounds bounds;
  bool size_admissible = false;  // M <= N (N + 1) / 2
};

[[nodiscard]] EtfReport is_equiangular_tight(const Frame& frame, double tol = 1e-9);

/// Exact restricted isometry constant of order K: the largest spectral
/// deviation ||U_S^T U_S - I||_2 over all K-subsets S. Refuses with
/// ContractError when C(M, K) exceeds 1e6.
[[nodiscard]] double rip_constant_exact(const Frame& frame, Eigen::Index k);

/// (K - 1) * coherence.
[[nodiscard]] double rip_gershgorin_bound(const Frame& frame, Eigen::Index k);

/// Squared Frobenius distance from the Gram matrix to the nearest matrix
/// with unit diagonal and off-diagonal magnitudes at most gram_cap (Welch
/// bound when unset).
[[nodiscard]] double etf_penalty(const Frame& frame, std::optional<double> gram_cap = std::nullopt);

}  // namespace grassdict
