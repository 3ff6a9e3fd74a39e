#pragma once

// Synthetic dictionary-recovery experiments: planted dictionaries, straight
// and rotated training sets, SNR-controlled noise, per-iteration recovery
// traces and noise sweeps.

#include <cstdint>
#include <optional>
#include <random>
#include <string_view>
#include <vector>

#include "grassdict/dictionary.hpp"

namespace grassdict {

struct SynthConfig {
  std::size_t atoms = 135;
  Eigen::Index length = 20;
  Eigen::Index channels = 10;
  std::size_t signals = 2000;
  std::size_t atoms_per_signal = 3;
  bool rotate = false;
  std::optional<double> snr_db;
  std::uint64_t seed = 0;
  std::size_t iterations = 80;
  std::size_t repeats = 10;
  std::size_t sparsity = 3;
  double coeff_min = 0.5;  // |c| ~ U[coeff_min, coeff_max], random sign
  double coeff_max = 1.5;

  void validate() const;
};

/// Stream ids passed to derive_seed for each source of randomness.
namespace SeedStream {
inline constexpr std::uint64_t dictionary = 1;
inline constexpr std::uint64_t dataset = 2;
inline constexpr std::uint64_t noise = 3;
inline constexpr std::uint64_t learning = 4;
}  // namespace SeedStream

/// Independent stream seed derived from a base seed (splitmix64 mixing).
[[nodiscard]] std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) noexcept;

/// Haar-distributed orthogonal matrix: QR of a Gaussian matrix with the
/// signs of R's diagonal folded into Q.
[[nodiscard]] Mat haar_orthogonal(Eigen::Index n, std::mt19937_64& rng);

/// Atoms with i.i.d. U(-1, 1) entries, Frobenius-normalised.
[[nodiscard]] Dictionary gen_original_dictionary(const SynthConfig& cfg);

struct Dataset {
  std::vector<Mat> signals;
  std::vector<SparseCode> truth;
};

/// Each signal sums atoms_per_signal distinct random atoms with random
/// coefficients (and a Haar rotation per atom when cfg.rotate). No noise.
[[nodiscard]] Dataset gen_dataset(const Dictionary& dict, const SynthConfig& cfg);

struct NoiseResult {
  std::vector<Mat> signals;
  std::vector<std::size_t> skipped;  // zero signals left untouched
};

/// Adds white Gaussian noise per signal so that 10 log10(|s|^2 / |n|^2) is
/// exactly snr_db. A +inf snr_db returns the signals unchanged.
[[nodiscard]] NoiseResult add_noise(const std::vector<Mat>& signals, double snr_db, std::uint64_t seed);

enum class Algorithm { mdla, ndri };

[[nodiscard]] std::string_view algorithm_name(Algorithm a) noexcept;

struct TraceRow {
  std::size_t iteration = 0;
  double t99 = 0.0;
  double t97 = 0.0;
  double wass_chordal = 0.0;
  double wass_frob = 0.0;
  double haus_chordal = 0.0;
  double haus_frob = 0.0;
};

/// Detection rates and the four normalised set distances (Wasserstein p = 1
/// and Hausdorff over chordal and Frobenius grounds) of a learned dictionary
/// against the original; the original's subspaces are computed once.
class RecoveryEvaluator {
 public:
  RecoveryEvaluator(Dictionary original, bool rotation_invariant);
  [[nodiscard]] TraceRow evaluate(const Dictionary& learned, std::size_t iteration) const;

 private:
  Dictionary original_;
  std::vector<Subspace> original_spans_;
  bool rotation_invariant_;
};

struct ExperimentTrace {
  TraceRow initial;           // dictionary at initialisation
  std::vector<TraceRow> rows;  // one per iteration, 1-based
  std::vector<std::size_t> replacement_events;  // per iteration, atoms revived
};

struct ExperimentOptions {
  /// Skip learning and evaluate the original against itself each iteration.
  bool inject_original = false;
};

/// Generates the original dictionary and training set from cfg, learns with
/// the chosen algorithm and evaluates every iteration. Detection for ndri is
/// rotation invariant.
[[nodiscard]] ExperimentTrace run_recovery_experiment(const SynthConfig& cfg, Algorithm algo,
                                                      const ExperimentOptions& options = {});

struct SweepRow {
  double snr_db = 0.0;  // +inf for the noiseless column
  Algorithm algo = Algorithm::mdla;
  bool rotated = false;
  TraceRow mean;  // final-iteration values averaged over repeats
};

/// Final-iteration averages over cfg.repeats runs (seeds cfg.seed + r) for
/// each SNR level; the default levels are 10, 20, 30 dB and noiseless.
[[nodiscard]] std::vector<SweepRow> run_noise_sweep(const SynthConfig& cfg, Algorithm algo,
                                                    std::vector<double> levels = {});

}  // namespace grassdict
