#pragma once

// Set-level distances between dictionaries seen as finite point sets on a
// Grassmannian (or, for the Frobenius ground, in the atom space itself).

#include <limits>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

#include "grassdict/dictionary.hpp"

namespace grassdict {

enum class GroundDistance {
  geodesic,
  chordal,
  chordal2,
  projection,
  projection2,
  fubini_study,
  spectral,
  binet_cauchy,
  frobenius,
};

/// False for the pseudo-metrics (chordal2, projection2, spectral, frobenius).
[[nodiscard]] bool is_true_metric(GroundDistance g) noexcept;
[[nodiscard]] std::string_view ground_name(GroundDistance g) noexcept;
/// Accepts the command-line spellings: geodesic chordal chordal2 projection
/// projection2 fubini spectral binetcauchy frobenius.
[[nodiscard]] std::optional<GroundDistance> parse_ground(std::string_view name) noexcept;

/// Largest value the ground distance can take between dim-dimensional
/// subspaces (or unit atoms for frobenius).
[[nodiscard]] double ground_upper_bound(GroundDistance g, Eigen::Index dim);

[[nodiscard]] double ground_distance(GroundDistance g, const Subspace& u, const Subspace& w);

/// Points with nonnegative weights summing to one. Grassmannian grounds need
/// subspace points; the frobenius ground needs atom points.
struct DiscreteMeasureSet {
  std::variant<std::vector<Subspace>, std::vector<Atom>> points;
  Vec weights;

  [[nodiscard]] static DiscreteMeasureSet uniform(std::vector<Subspace> subspaces);
  [[nodiscard]] static DiscreteMeasureSet uniform(std::vector<Atom> atoms);
  [[nodiscard]] static DiscreteMeasureSet weighted(std::vector<Subspace> subspaces, Vec weights);

  [[nodiscard]] std::size_t size() const noexcept;
  /// Throws ContractError when weights are negative, do not match the point
  /// count, or do not sum to 1 within 1e-12.
  void validate() const;
};

enum class SetMetric { hausdorff, wasserstein };

inline constexpr double kInfiniteOrder = std::numeric_limits<double>::infinity();

/// D(i, j) = ground distance between point i of a and point j of b.
[[nodiscard]] Mat pairwise_ground(const DiscreteMeasureSet& a, const DiscreteMeasureSet& b, GroundDistance g);

/// max(max_i min_j D, max_j min_i D).
[[nodiscard]] double hausdorff(const Mat& ground);
[[nodiscard]] double hausdorff(const DiscreteMeasureSet& a, const DiscreteMeasureSet& b, GroundDistance g);

struct TransportResult {
  double value = 0.0;
  Mat plan;  // coupling of the two weight vectors
};

/// Order p > 0 or kInfiniteOrder. For p >= 1 the p-th root of the optimal
/// cost is returned; for 0 < p < 1 the cost itself; for p = infinity the
/// bottleneck value.
[[nodiscard]] TransportResult wasserstein(const Mat& ground, const Vec& wa, const Vec& wb, double p);
[[nodiscard]] double wasserstein(const DiscreteMeasureSet& a, const DiscreteMeasureSet& b, GroundDistance g,
                                 double p);

/// Distance between the sets of atom spans (or atoms, frobenius ground) of
/// two dictionaries with uniform weights.
[[nodiscard]] double dictionary_distance(const Dictionary& a, const Dictionary& b, GroundDistance g, SetMetric s,
                                         double p = 1.0, double rank_tol = kDefaultRankTol);

/// (B - d) / B * 100, clamped to [0, 100]. B is sqrt(dim) for chordal,
/// sqrt(2) for frobenius and the ground's upper bound otherwise. Throws
/// ContractError when d is outside the ground's range beyond 1e-9.
[[nodiscard]] double normalized_score(double d, GroundDistance g, Eigen::Index dim);

}  // namespace grassdict
