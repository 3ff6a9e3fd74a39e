#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "grassdict/dictionary.hpp"
#include "grassdict/grassmann.hpp"

namespace testing {

using grassdict::Mat;
using grassdict::Vec;

inline Mat gaussian(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Mat m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = n(rng);
  }
  return m;
}

inline Mat orthonormal(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  Eigen::HouseholderQR<Mat> qr(gaussian(rows, cols, rng));
  return qr.householderQ() * Mat::Identity(rows, cols);
}

inline grassdict::Subspace random_subspace(Eigen::Index n, Eigen::Index k, std::mt19937_64& rng) {
  return grassdict::Subspace::from_orthonormal(orthonormal(n, k, rng));
}

inline Mat rotation(Eigen::Index n, std::mt19937_64& rng) { return orthonormal(n, n, rng); }

inline grassdict::Subspace line(double phi) {
  Mat b(2, 1);
  b << std::cos(phi), std::sin(phi);
  return grassdict::Subspace::from_orthonormal(b);
}

inline grassdict::Subspace span_e(Eigen::Index n, std::vector<Eigen::Index> axes) {
  Mat b = Mat::Zero(n, static_cast<Eigen::Index>(axes.size()));
  for (std::size_t k = 0; k < axes.size(); ++k) b(axes[k], static_cast<Eigen::Index>(k)) = 1.0;
  return grassdict::Subspace::from_orthonormal(b);
}

inline grassdict::Dictionary random_dictionary(std::size_t m, Eigen::Index n, Eigen::Index rho, std::mt19937_64& rng) {
  std::vector<grassdict::Atom> atoms;
  for (std::size_t i = 0; i < m; ++i) atoms.push_back(gaussian(n, rho, rng));
  return grassdict::Dictionary::normalized(std::move(atoms));
}

// Minimum of sum_i cost(i, perm(i)) over all permutations, by enumeration.
inline double brute_force_assignment(const Mat& cost) {
  std::vector<int> perm(static_cast<std::size_t>(cost.rows()));
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double c = 0.0;
    for (std::size_t i = 0; i < perm.size(); ++i) c += cost(static_cast<Eigen::Index>(i), perm[i]);
    best = std::min(best, c);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// Minimum over permutations of the largest matched cost.
inline double brute_force_bottleneck(const Mat& cost) {
  std::vector<int> perm(static_cast<std::size_t>(cost.rows()));
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double c = 0.0;
    for (std::size_t i = 0; i < perm.size(); ++i) c = std::max(c, cost(static_cast<Eigen::Index>(i), perm[i]));
    best = std::min(best, c);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// Integer masses expanded into unit copies so that a transport problem with
// rational weights becomes an assignment problem.
inline Mat replicate(const Mat& cost, const std::vector<int>& rows, const std::vector<int>& cols) {
  const int nr = std::accumulate(rows.begin(), rows.end(), 0);
  const int nc = std::accumulate(cols.begin(), cols.end(), 0);
  Mat out(nr, nc);
  int r = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (int a = 0; a < rows[i]; ++a, ++r) {
      int c = 0;
      for (std::size_t j = 0; j < cols.size(); ++j) {
        for (int b = 0; b < cols[j]; ++b, ++c) out(r, c) = cost(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      }
    }
  }
  return out;
}

}  // namespace testing
