#include "grassdict/dictlearn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "grassdict/parallel.hpp"

namespace grassdict {

namespace {

void require_signal_shape(const Mat& signal, const Dictionary& dict, const char* what) {
  if (dict.size() == 0) throw ContractError(std::string(what) + ": empty dictionary");
  if (signal.rows() != dict.signal_length() || signal.cols() != dict.channels()) {
    throw ShapeError(std::string(what) + ": signal shape differs from atom shape");
  }
  linops::require_finite(signal, what);
}

// Sum of singular values from the eigenvalues of c^T c. Loses relative
// accuracy on singular values below sqrt(eps) * sigma_max, which is fine for
// ranking candidates; registrations themselves go through a full SVD.
double nuclear_norm(const Mat& c) {
  const Mat gram = c.transpose() * c;
  Eigen::SelfAdjointEigenSolver<Mat> eig(gram, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
}

// Batch variant of M-OMP working on flattened atoms: correlations are
// updated through the Gram matrix instead of recomputed from the residual.
class FlatCoder {
 public:
  explicit FlatCoder(const Dictionary& dict)
      : rows_(dict.signal_length()), cols_(dict.channels()), atoms_(dict.flattened()) {
    gram_ = atoms_.transpose() * atoms_;
  }

  [[nodiscard]] const Mat& atoms() const noexcept { return atoms_; }

  CodingResult encode(const Mat& signal, const Vec& initial_corr, std::size_t k) const {
    const Eigen::Map<const Vec> y(signal.data(), signal.size());
    const double scale = std::max(1.0, y.norm());
    const double tol = 1e-12 * scale;

    Vec corr = initial_corr;
    std::vector<Eigen::Index> active;
    std::vector<char> used(static_cast<std::size_t>(atoms_.cols()), 0);
    Vec coeffs;
    Vec residual = y;

    while (active.size() < k && residual.norm() > tol) {
      Eigen::Index best = -1;
      double best_abs = 0.0;
      for (Eigen::Index m = 0; m < corr.size(); ++m) {
        if (used[static_cast<std::size_t>(m)]) continue;
        if (std::abs(corr(m)) > best_abs) {
          best_abs = std::abs(corr(m));
          best = m;
        }
      }
      if (best < 0 || best_abs <= tol * 1e-3) break;
      active.push_back(best);
      used[static_cast<std::size_t>(best)] = 1;

      Mat sub(atoms_.rows(), static_cast<Eigen::Index>(active.size()));
      for (std::size_t i = 0; i < active.size(); ++i) sub.col(static_cast<Eigen::Index>(i)) = atoms_.col(active[i]);
      try {
        coeffs = linops::lstsq(sub, y);
      } catch (const RankDeficiencyError&) {
        coeffs = linops::pinv_solve(sub, y);
      }
      residual = y - sub * coeffs;
      corr = initial_corr;
      for (std::size_t i = 0; i < active.size(); ++i) corr -= coeffs(static_cast<Eigen::Index>(i)) * gram_.col(active[i]);
    }

    CodingResult out;
    out.residual = Eigen::Map<const Mat>(residual.data(), rows_, cols_);
    for (std::size_t i = 0; i < active.size(); ++i) {
      out.code.push_back({static_cast<std::size_t>(active[i]), coeffs(static_cast<Eigen::Index>(i)), std::nullopt});
    }
    return out;
  }

 private:
  Eigen::Index rows_;
  Eigen::Index cols_;
  Mat atoms_;
  Mat gram_;
};

// Atoms laid side by side, N x (M * rho), so that one product gives every
// atom's cross matrix with a residual.
class RotationCoder {
 public:
  explicit RotationCoder(const Dictionary& dict)
      : dict_(dict), channels_(dict.channels()), stacked_(dict.signal_length(), dict.channels() * static_cast<Eigen::Index>(dict.size())) {
    norms_.resize(static_cast<Eigen::Index>(dict.size()));
    for (std::size_t m = 0; m < dict.size(); ++m) {
      stacked_.middleCols(static_cast<Eigen::Index>(m) * channels_, channels_) = dict[m];
      norms_(static_cast<Eigen::Index>(m)) = dict[m].norm();
    }
  }

  CodingResult encode(const Mat& signal, std::size_t k) const {
    const double tol = 1e-12 * std::max(1.0, signal.norm());
    const auto count = static_cast<Eigen::Index>(dict_.size());
    const double rank_factor = std::sqrt(static_cast<double>(channels_));

    CodingResult out;
    out.residual = signal;
    std::vector<char> used(dict_.size(), 0);
    std::vector<Eigen::Index> order(static_cast<std::size_t>(count));
    Vec bound(count);

    while (out.code.size() < k && out.residual.norm() > tol) {
      const Mat cross = stacked_.transpose() * out.residual;  // (M rho) x rho
      for (Eigen::Index m = 0; m < count; ++m) {
        bound(m) = rank_factor * cross.middleRows(m * channels_, channels_).norm() / norms_(m);
      }
      std::iota(order.begin(), order.end(), Eigen::Index{0});
      std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return bound(a) > bound(b); });

      // nuclear <= sqrt(rho) * Frobenius, so candidates whose bound falls
      // below the best exact score cannot win.
      Eigen::Index best = -1;
      double best_score = 0.0;
      for (const Eigen::Index m : order) {
        if (used[static_cast<std::size_t>(m)]) continue;
        if (best >= 0 && bound(m) < best_score) break;
        const double score = nuclear_norm(cross.middleRows(m * channels_, channels_)) / norms_(m);
        if (score > best_score || (score == best_score && best >= 0 && m < best)) {
          best_score = score;
          best = m;
        }
      }
      if (best < 0 || best_score <= tol * 1e-3) break;

      const Registration reg = nd_registration(dict_[static_cast<std::size_t>(best)], out.residual);
      out.residual -= reg.alpha * dict_[static_cast<std::size_t>(best)] * reg.rotation;
      used[static_cast<std::size_t>(best)] = 1;
      out.code.push_back({static_cast<std::size_t>(best), reg.alpha, reg.rotation});
    }
    return out;
  }

 private:
  const Dictionary& dict_;
  Eigen::Index channels_;
  Mat stacked_;
  Vec norms_;
};

void require_dataset(const std::vector<Mat>& dataset, const LearningOptions& options, const char* what) {
  if (dataset.empty()) throw ContractError(std::string(what) + ": empty dataset");
  for (const Mat& y : dataset) {
    if (y.rows() != dataset.front().rows() || y.cols() != dataset.front().cols()) {
      throw ShapeError(std::string(what) + ": signals have different shapes");
    }
    linops::require_finite(y, what);
  }
  if (options.atoms == 0) throw ContractError(std::string(what) + ": atom count must be positive");
  if (options.sparsity == 0 || options.sparsity > options.atoms) {
    throw ContractError(std::string(what) + ": sparsity must lie in [1, atoms]");
  }
  if (options.initial) {
    if (options.initial->size() != options.atoms || options.initial->signal_length() != dataset.front().rows() ||
        options.initial->channels() != dataset.front().cols()) {
      throw ShapeError(std::string(what) + ": initial dictionary shape mismatch");
    }
  }
}

Dictionary initial_dictionary(const std::vector<Mat>& dataset, const LearningOptions& options) {
  if (options.initial) return *options.initial;
  std::vector<std::size_t> candidates;
  for (std::size_t q = 0; q < dataset.size(); ++q) {
    if (dataset[q].norm() > 0.0) candidates.push_back(q);
  }
  if (candidates.size() < options.atoms) {
    throw ContractError("dictionary learning: fewer nonzero training signals than atoms");
  }
  std::mt19937_64 rng(options.seed);
  // Partial Fisher-Yates: the first `atoms` entries become a uniform sample.
  for (std::size_t i = 0; i < options.atoms; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, candidates.size() - 1);
    std::swap(candidates[i], candidates[pick(rng)]);
  }
  std::vector<Atom> atoms;
  atoms.reserve(options.atoms);
  for (std::size_t i = 0; i < options.atoms; ++i) atoms.push_back(dataset[candidates[i]]);
  return Dictionary::normalized(std::move(atoms));
}

struct Usage {
  std::size_t signal;
  std::size_t entry;
};

// Shared alternation: sparse step, per-atom least-squares refit against the
// residual plus the atom's own contribution, renormalisation, revival of
// unused atoms from the worst-reconstructed signals.
template <typename CodeAll>
LearningResult learn(const std::vector<Mat>& dataset, const LearningOptions& options, bool rotations,
                     CodeAll&& code_all) {
  std::vector<Atom> atoms = initial_dictionary(dataset, options).atoms();
  const std::size_t count = atoms.size();
  LearningResult result;
  if (options.on_iteration) options.on_iteration(0, Dictionary(atoms));

  std::vector<CodingResult> codes(dataset.size());
  for (std::size_t it = 1; it <= options.iterations; ++it) {
    const Dictionary current(atoms);
    code_all(current, codes);

    std::vector<std::vector<Usage>> usage(count);
    for (std::size_t q = 0; q < codes.size(); ++q) {
      for (std::size_t e = 0; e < codes[q].code.size(); ++e) usage[codes[q].code[e].index].push_back({q, e});
    }

    IterationRecord record;
    record.iteration = it;
    std::vector<std::size_t> unused;
    for (std::size_t m = 0; m < count; ++m) {
      if (usage[m].empty()) {
        unused.push_back(m);
        continue;
      }
      Mat numerator = Mat::Zero(atoms[m].rows(), atoms[m].cols());
      double denominator = 0.0;
      for (const Usage& u : usage[m]) {
        const CodeEntry& entry = codes[u.signal].code[u.entry];
        const Mat& residual = codes[u.signal].residual;
        if (rotations) {
          const Mat& r = *entry.rotation;
          numerator += entry.coeff * (residual + entry.coeff * atoms[m] * r) * r.transpose();
        } else {
          numerator += entry.coeff * (residual + entry.coeff * atoms[m]);
        }
        denominator += entry.coeff * entry.coeff;
      }
      if (!(denominator > 0.0)) {
        unused.push_back(m);
        continue;
      }
      Atom updated = numerator / denominator;
      const double norm = updated.norm();
      if (!(norm > 1e-300)) {
        unused.push_back(m);
        continue;
      }
      updated /= norm;
      for (const Usage& u : usage[m]) {
        CodeEntry& entry = codes[u.signal].code[u.entry];
        Mat& residual = codes[u.signal].residual;
        const double rescaled = entry.coeff * norm;
        if (rotations) {
          residual += (entry.coeff * atoms[m] - rescaled * updated) * *entry.rotation;
        } else {
          residual += entry.coeff * atoms[m] - rescaled * updated;
        }
        entry.coeff = rescaled;
      }
      atoms[m] = std::move(updated);
    }

    if (!unused.empty()) {
      std::vector<std::size_t> worst(codes.size());
      std::iota(worst.begin(), worst.end(), std::size_t{0});
      std::vector<double> err(codes.size());
      for (std::size_t q = 0; q < codes.size(); ++q) err[q] = codes[q].residual.squaredNorm();
      std::stable_sort(worst.begin(), worst.end(), [&](auto a, auto b) { return err[a] > err[b]; });
      std::size_t next = 0;
      for (const std::size_t m : unused) {
        while (next < worst.size() && !(codes[worst[next]].residual.norm() > 0.0)) ++next;
        if (next >= worst.size()) break;
        atoms[m] = codes[worst[next]].residual / codes[worst[next]].residual.norm();
        record.replaced_atoms.push_back(m);
        ++next;
      }
    }

    for (const CodingResult& c : codes) record.squared_error += c.residual.squaredNorm();
    result.trace.push_back(std::move(record));
    if (options.on_iteration) options.on_iteration(it, Dictionary(atoms));
  }
  result.dictionary = Dictionary(std::move(atoms));
  return result;
}

}  // namespace

CodingResult m_omp(const Mat& signal, const Dictionary& dict, std::size_t k) {
  require_signal_shape(signal, dict, "m_omp");
  if (k < 1 || k > dict.size()) throw ContractError("m_omp: sparsity must lie in [1, M]");
  const FlatCoder coder(dict);
  const Eigen::Map<const Vec> y(signal.data(), signal.size());
  return coder.encode(signal, coder.atoms().transpose() * y, k);
}

Registration nd_registration(const Atom& u, const Mat& z) {
  if (u.rows() != z.rows() || u.cols() != z.cols()) throw ShapeError("nd_registration: shapes differ");
  linops::require_finite(u, "nd_registration");
  linops::require_finite(z, "nd_registration");
  const double energy = u.squaredNorm();
  if (!(energy > 0.0)) throw ContractError("nd_registration: zero atom");
  const SvdResult f = linops::svd(u.transpose() * z);
  return {f.singular_values.sum() / energy, f.left_vectors * f.right_vectors.transpose()};
}

CodingResult ndri_omp(const Mat& signal, const Dictionary& dict, std::size_t k) {
  require_signal_shape(signal, dict, "ndri_omp");
  if (k < 1 || k > dict.size()) throw ContractError("ndri_omp: sparsity must lie in [1, M]");
  return RotationCoder(dict).encode(signal, k);
}

LearningResult m_dla(const std::vector<Mat>& dataset, const LearningOptions& options) {
  require_dataset(dataset, options, "m_dla");
  const Eigen::Index len = dataset.front().size();
  return learn(dataset, options, false, [&](const Dictionary& dict, std::vector<CodingResult>& codes) {
    const FlatCoder coder(dict);
    parallel_for(dataset.size(), [&](std::size_t q) {
      const Eigen::Map<const Vec> y(dataset[q].data(), len);
      codes[q] = coder.encode(dataset[q], coder.atoms().transpose() * y, options.sparsity);
    });
  });
}

LearningResult ndri_dla(const std::vector<Mat>& dataset, const LearningOptions& options) {
  require_dataset(dataset, options, "ndri_dla");
  return learn(dataset, options, true, [&](const Dictionary& dict, std::vector<CodingResult>& codes) {
    const RotationCoder coder(dict);
    parallel_for(dataset.size(), [&](std::size_t q) { codes[q] = coder.encode(dataset[q], options.sparsity); });
  });
}

double detection_rate(const Dictionary& original, const Dictionary& learned, double threshold,
                      bool rotation_invariant) {
  if (original.size() == 0 || learned.size() == 0) throw ContractError("detection_rate: empty dictionary");
  if (original.signal_length() != learned.signal_length() || original.channels() != learned.channels()) {
    throw ShapeError("detection_rate: dictionaries have different atom shapes");
  }
  if (!(threshold > 0.0 && threshold <= 1.0)) throw ContractError("detection_rate: threshold must lie in (0, 1]");

  std::size_t detected = 0;
  if (!rotation_invariant) {
    const Mat corr = original.flattened().transpose() * learned.flattened();
    for (Eigen::Index m = 0; m < corr.rows(); ++m) {
      if (corr.row(m).cwiseAbs().maxCoeff() >= threshold) ++detected;
    }
  } else {
    const double rank_factor = std::sqrt(static_cast<double>(original.channels()));
    for (std::size_t m = 0; m < original.size(); ++m) {
      for (std::size_t j = 0; j < learned.size(); ++j) {
        const Mat cross = learned[j].transpose() * original[m];
        const double energy = learned[j].squaredNorm();
        if (rank_factor * cross.norm() / energy < threshold) continue;
        if (nuclear_norm(cross) / energy >= threshold) {
          ++detected;
          break;
        }
      }
    }
  }
  return 100.0 * static_cast<double>(detected) / static_cast<double>(original.size());
}

}  // namespace grassdict
