#include "grassdict/synthetic.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include "grassdict/dictlearn.hpp"
#include "grassdict/parallel.hpp"
#include "grassdict/setmetric.hpp"

namespace grassdict {

void SynthConfig::validate() const {
  if (atoms == 0 || length < 1 || channels < 1 || signals == 0) throw ContractError("SynthConfig: sizes must be positive");
  if (atoms_per_signal == 0 || atoms_per_signal > atoms) {
    throw ContractError("SynthConfig: atoms_per_signal must lie in [1, atoms]");
  }
  if (sparsity == 0 || sparsity > atoms) throw ContractError("SynthConfig: sparsity must lie in [1, atoms]");
  if (!(coeff_min >= 0.0 && coeff_max >= coeff_min)) throw ContractError("SynthConfig: bad coefficient range");
  if (snr_db && std::isnan(*snr_db)) throw ContractError("SynthConfig: snr must be a number");
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) noexcept {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Mat haar_orthogonal(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Mat g(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) g(i, j) = gauss(rng);
  }
  Eigen::HouseholderQR<Mat> qr(g);
  Mat q = qr.householderQ() * Mat::Identity(n, n);
  const Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < n; ++j) {
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  }
  return q;
}

Dictionary gen_original_dictionary(const SynthConfig& cfg) {
  cfg.validate();
  std::mt19937_64 rng(derive_seed(cfg.seed, SeedStream::dictionary));
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  std::vector<Atom> atoms;
  atoms.reserve(cfg.atoms);
  for (std::size_t m = 0; m < cfg.atoms; ++m) {
    Atom a(cfg.length, cfg.channels);
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      for (Eigen::Index i = 0; i < a.rows(); ++i) a(i, j) = uniform(rng);
    }
    atoms.push_back(std::move(a));
  }
  return Dictionary::normalized(std::move(atoms));
}

Dataset gen_dataset(const Dictionary& dict, const SynthConfig& cfg) {
  cfg.validate();
  if (cfg.atoms_per_signal > dict.size()) throw ContractError("gen_dataset: atoms_per_signal exceeds dictionary size");
  std::mt19937_64 rng(derive_seed(cfg.seed, SeedStream::dataset));
  std::uniform_real_distribution<double> magnitude(cfg.coeff_min, cfg.coeff_max);
  std::bernoulli_distribution negative(0.5);

  Dataset out;
  out.signals.reserve(cfg.signals);
  out.truth.reserve(cfg.signals);
  std::vector<std::size_t> pool(dict.size());
  for (std::size_t q = 0; q < cfg.signals; ++q) {
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    SparseCode code;
    for (std::size_t k = 0; k < cfg.atoms_per_signal; ++k) {
      std::uniform_int_distribution<std::size_t> pick(k, pool.size() - 1);
      std::swap(pool[k], pool[pick(rng)]);
      double c = magnitude(rng);
      if (negative(rng)) c = -c;
      CodeEntry entry{pool[k], c, std::nullopt};
      if (cfg.rotate) entry.rotation = haar_orthogonal(dict.channels(), rng);
      code.push_back(std::move(entry));
    }
    out.signals.push_back(reconstruct(dict, code));
    out.truth.push_back(std::move(code));
  }
  return out;
}

NoiseResult add_noise(const std::vector<Mat>& signals, double snr_db, std::uint64_t seed) {
  if (std::isnan(snr_db) || snr_db == -std::numeric_limits<double>::infinity()) {
    throw ContractError("add_noise: snr must be finite or +inf");
  }
  NoiseResult out{signals, {}};
  if (std::isinf(snr_db)) return out;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (std::size_t q = 0; q < out.signals.size(); ++q) {
    Mat& s = out.signals[q];
    Mat noise(s.rows(), s.cols());
    for (Eigen::Index j = 0; j < noise.cols(); ++j) {
      for (Eigen::Index i = 0; i < noise.rows(); ++i) noise(i, j) = gauss(rng);
    }
    const double signal_norm = s.norm();
    const double noise_norm = noise.norm();
    if (!(signal_norm > 0.0) || !(noise_norm > 0.0)) {
      out.skipped.push_back(q);
      continue;
    }
    s += noise * (signal_norm * std::pow(10.0, -snr_db / 20.0) / noise_norm);
  }
  return out;
}

std::string_view algorithm_name(Algorithm a) noexcept { return a == Algorithm::mdla ? "mdla" : "ndri"; }

RecoveryEvaluator::RecoveryEvaluator(Dictionary original, bool rotation_invariant)
    : original_(std::move(original)), original_spans_(original_.subspaces()), rotation_invariant_(rotation_invariant) {}

TraceRow RecoveryEvaluator::evaluate(const Dictionary& learned, std::size_t iteration) const {
  TraceRow row;
  row.iteration = iteration;
  row.t99 = detection_rate(original_, learned, 0.99, rotation_invariant_);
  row.t97 = detection_rate(original_, learned, 0.97, rotation_invariant_);

  const auto spans_a = DiscreteMeasureSet::uniform(original_spans_);
  const auto spans_b = DiscreteMeasureSet::uniform(learned.subspaces());
  const Mat chordal_ground = pairwise_ground(spans_a, spans_b, GroundDistance::chordal);
  const auto atoms_a = DiscreteMeasureSet::uniform(original_.atoms());
  const auto atoms_b = DiscreteMeasureSet::uniform(learned.atoms());
  const Mat frob_ground = pairwise_ground(atoms_a, atoms_b, GroundDistance::frobenius);

  // Span dimension of the original atoms sets the chordal scale.
  const Eigen::Index dim = original_spans_.front().dim();
  row.wass_chordal = normalized_score(wasserstein(chordal_ground, spans_a.weights, spans_b.weights, 1.0).value,
                                      GroundDistance::chordal, dim);
  row.wass_frob = normalized_score(wasserstein(frob_ground, atoms_a.weights, atoms_b.weights, 1.0).value,
                                   GroundDistance::frobenius, dim);
  row.haus_chordal = normalized_score(hausdorff(chordal_ground), GroundDistance::chordal, dim);
  row.haus_frob = normalized_score(hausdorff(frob_ground), GroundDistance::frobenius, dim);
  return row;
}

ExperimentTrace run_recovery_experiment(const SynthConfig& cfg, Algorithm algo, const ExperimentOptions& options) {
  cfg.validate();
  const Dictionary original = gen_original_dictionary(cfg);
  const RecoveryEvaluator evaluator(original, algo == Algorithm::ndri);

  ExperimentTrace trace;
  if (options.inject_original) {
    trace.initial = evaluator.evaluate(original, 0);
    for (std::size_t it = 1; it <= cfg.iterations; ++it) trace.rows.push_back(evaluator.evaluate(original, it));
    trace.replacement_events.assign(cfg.iterations, 0);
    return trace;
  }

  Dataset data = gen_dataset(original, cfg);
  std::vector<Mat> signals = std::move(data.signals);
  if (cfg.snr_db) signals = add_noise(signals, *cfg.snr_db, derive_seed(cfg.seed, SeedStream::noise)).signals;

  LearningOptions learn;
  learn.atoms = cfg.atoms;
  learn.sparsity = cfg.sparsity;
  learn.iterations = cfg.iterations;
  learn.seed = derive_seed(cfg.seed, SeedStream::learning);
  learn.on_iteration = [&](std::size_t it, const Dictionary& current) {
    const TraceRow row = evaluator.evaluate(current, it);
    if (it == 0) {
      trace.initial = row;
    } else {
      trace.rows.push_back(row);
    }
  };
  const LearningResult result = algo == Algorithm::mdla ? m_dla(signals, learn) : ndri_dla(signals, learn);
  for (const IterationRecord& r : result.trace) trace.replacement_events.push_back(r.replaced_atoms.size());
  return trace;
}

std::vector<SweepRow> run_noise_sweep(const SynthConfig& cfg, Algorithm algo, std::vector<double> levels) {
  cfg.validate();
  if (cfg.repeats == 0) throw ContractError("run_noise_sweep: repeats must be positive");
  if (levels.empty()) levels = {10.0, 20.0, 30.0, std::numeric_limits<double>::infinity()};

  const std::size_t jobs = levels.size() * cfg.repeats;
  std::vector<TraceRow> finals(jobs);
  parallel_for(jobs, [&](std::size_t job) {
    SynthConfig run = cfg;
    run.seed = cfg.seed + job % cfg.repeats;
    const double snr = levels[job / cfg.repeats];
    run.snr_db = std::isinf(snr) ? std::nullopt : std::optional<double>(snr);
    const ExperimentTrace trace = run_recovery_experiment(run, algo);
    finals[job] = trace.rows.empty() ? trace.initial : trace.rows.back();
  });

  std::vector<SweepRow> out;
  for (std::size_t l = 0; l < levels.size(); ++l) {
    SweepRow row;
    row.snr_db = levels[l];
    row.algo = algo;
    row.rotated = cfg.rotate;
    TraceRow& mean = row.mean;
    mean.iteration = cfg.iterations;
    for (std::size_t r = 0; r < cfg.repeats; ++r) {
      const TraceRow& f = finals[l * cfg.repeats + r];
      mean.t99 += f.t99;
      mean.t97 += f.t97;
      mean.wass_chordal += f.wass_chordal;
      mean.wass_frob += f.wass_frob;
      mean.haus_chordal += f.haus_chordal;
      mean.haus_frob += f.haus_frob;
    }
    const double n = static_cast<double>(cfg.repeats);
    mean.t99 /= n;
    mean.t97 /= n;
    mean.wass_chordal /= n;
    mean.wass_frob /= n;
    mean.haus_chordal /= n;
    mean.haus_frob /= n;
    out.push_back(row);
  }
  return out;
}

}  // namespace grassdict
