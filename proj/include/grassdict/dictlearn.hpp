#pragma once

// Multivariate sparse approximation and dictionary learning, with and
// without per-occurrence rotation invariance.

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "grassdict/dictionary.hpp"

namespace grassdict {

struct CodingResult {
  SparseCode code;
  Mat residual;
};

/// Multivariate orthogonal matching pursuit: at most k atoms, each scaled by
/// one coefficient shared across channels. Active coefficients are refit by
/// least squares after every selection.
[[nodiscard]] CodingResult m_omp(const Mat& signal, const Dictionary& dict, std::size_t k);

/// Scale and orthogonal matrix minimising ||z - alpha u R||_F.
struct Registration {
  double alpha = 0.0;
  Mat rotation;
};

[[nodiscard]] Registration nd_registration(const Atom& u, const Mat& z);

/// Rotation-invariant pursuit: each step registers every unused atom on the
/// residual and subtracts the best registered atom.
[[nodiscard]] CodingResult ndri_omp(const Mat& signal, const Dictionary& dict, std::size_t k);

struct LearningOptions {
  std::size_t atoms = 135;
  std::size_t sparsity = 3;
  std::size_t iterations = 80;
  std::uint64_t seed = 0;
  /// Starting dictionary; drawn from distinct training signals when unset.
  std::optional<Dictionary> initial;
  /// Called with the dictionary before the first iteration (iteration 0) and
  /// after each iteration.
  std::function<void(std::size_t, const Dictionary&)> on_iteration;
};

struct IterationRecord {
  std::size_t iteration = 0;
  double squared_error = 0.0;             // total over the dataset after the update step
  std::vector<std::size_t> replaced_atoms;  // unused atoms revived this iteration
};

struct LearningResult {
  Dictionary dictionary;
  std::vector<IterationRecord> trace;
};

[[nodiscard]] LearningResult m_dla(const std::vector<Mat>& dataset, const LearningOptions& options);
[[nodiscard]] LearningResult ndri_dla(const std::vector<Mat>& dataset, const LearningOptions& options);

/// Percentage of original atoms matched by some learned atom with
/// correlation >= threshold. The correlation is |<U, V>_F|, or the
/// registration scale of V onto U when rotation_invariant is set.
[[nodiscard]] double detection_rate(const Dictionary& original, const Dictionary& learned, double threshold,
                                    bool rotation_invariant);

}  // namespace grassdict
