#pragma once

// Analytics over distance matrices between dictionaries: Gaussian
// similarities, affinity propagation, consensus of partitions, Hausdorff
// linkage agglomeration, Laplacian eigenmaps and session purity.

#include <cstddef>
#include <vector>

#include "grassdict/linops.hpp"

namespace grassdict {

/// Throws ContractError unless d is square, finite, nonnegative, symmetric
/// within 1e-12 (relative) and has a zero diagonal.
void validate_distance_matrix(const Mat& d);

struct Partition {
  std::vector<int> labels;           // in [0, k), every label used
  std::vector<std::size_t> exemplars;  // one per cluster when the method has them

  [[nodiscard]] std::size_t size() const noexcept { return labels.size(); }
  [[nodiscard]] int num_clusters() const;
};

/// Relabels clusters 0, 1, ... in order of first appearance.
[[nodiscard]] Partition canonical(const Partition& p);

/// exp(-g^2 / (2 sigma^2)) off the diagonal; the diagonal (preferences) is
/// the same map applied to the median off-diagonal distance.
[[nodiscard]] Mat to_similarity(const Mat& d, double sigma = 1.0);

struct ApOptions {
  double damping = 0.5;
  std::size_t convergence_window = 50;
  std::size_t max_iterations = 500;
};

struct ApResult {
  Partition partition;
  bool converged = false;  // false when the cap was hit with a moving exemplar set
  std::size_t iterations = 0;
};

/// Responsibility/availability message passing; the diagonal of s holds the
/// preferences.
[[nodiscard]] ApResult affinity_propagation(const Mat& s, const ApOptions& options = {});

/// I(X; Y) / sqrt(H(X) H(Y)); 1 when both partitions are trivial.
[[nodiscard]] double normalized_mutual_information(const Partition& a, const Partition& b);

enum class Linkage { average, complete, hausdorff };

struct Merge {
  std::size_t a = 0;  // cluster ids: leaves are 0..n-1, merge s creates n+s
  std::size_t b = 0;
  double height = 0.0;
  std::size_t size = 0;
};

using Dendrogram = std::vector<Merge>;

/// Agglomerative clustering; ties go to the smallest (a, b) id pair.
[[nodiscard]] Dendrogram agglomerate(const Mat& d, Linkage linkage);

/// Linkage = discrete Hausdorff distance between the member sets.
[[nodiscard]] Dendrogram hierarchical_hausdorff(const Mat& d);

/// Partition obtained by stopping after n - clusters merges.
[[nodiscard]] Partition cut_dendrogram(const Dendrogram& tree, std::size_t n, std::size_t clusters);

struct ConsensusResult {
  Partition partition;
  double mean_nmi = 0.0;  // against the input partitions
};

/// Co-association matrix clustered by average linkage into `clusters` groups.
[[nodiscard]] ConsensusResult consensus_ensemble(const std::vector<Partition>& partitions, std::size_t clusters);

struct Embedding {
  Mat coordinates;  // n x out_dim
  Vec eigenvalues;  // of the full graph Laplacian, nondecreasing
  std::size_t components = 1;
  bool disconnected = false;
};

/// Symmetric k-nearest-neighbour graph with binary weights and the
/// unnormalised Laplacian L = D - W. Coordinates are the eigenvectors of the
/// out_dim smallest nonzero eigenvalues. A disconnected graph is embedded
/// component by component, each shifted along the first axis by 3 units per
/// component. Eigenvector signs are fixed so the first entry above 1e-12 in
/// magnitude is positive.
[[nodiscard]] Embedding laplacian_eigenmaps(const Mat& d, std::size_t neighbors = 10, std::size_t out_dim = 2);

/// 2 * (weighted mean majority-session fraction) - 1, with session labels in
/// {0, 1}.
[[nodiscard]] double session_purity(const Partition& partition, const std::vector<int>& sessions);

}  // namespace grassdict
