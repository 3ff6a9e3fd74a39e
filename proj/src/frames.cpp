#include "grassdict/frames.hpp"

#include <cmath>
#include <numeric>

namespace grassdict {

Frame::Frame(Mat elements, bool unit_norm) : elements_(std::move(elements)), unit_norm_(unit_norm) {
  linops::require_finite(elements_, "Frame");
  if (unit_norm_) {
    for (Eigen::Index i = 0; i < elements_.cols(); ++i) {
      if (std::abs(elements_.col(i).norm() - 1.0) > 1e-12) throw ContractError("Frame: element is not unit norm");
    }
  }
}

Frame Frame::unit(Mat elements) {
  for (Eigen::Index i = 0; i < elements.cols(); ++i) {
    const double norm = elements.col(i).norm();
    if (!(norm > 0.0)) throw ContractError("Frame: zero element");
    elements.col(i) /= norm;
  }
  return Frame(std::move(elements), true);
}

Frame Frame::from_dictionary(const Dictionary& dict) { return Frame::unit(dict.flattened()); }

Vec analysis(const Frame& frame, const Vec& w) {
  if (w.size() != frame.dimension()) throw ShapeError("analysis: vector dimension differs from frame");
  return frame.elements().transpose() * w;
}

Vec synthesis(const Frame& frame, const Vec& c) {
  if (c.size() != frame.size()) throw ShapeError("synthesis: coefficient count differs from frame size");
  return frame.elements() * c;
}

FrameBounds frame_operator_bounds(const Frame& frame) {
  const Mat& u = frame.elements();
  Mat s = u * u.transpose();
  s = 0.5 * (s + s.transpose());
  const SymEigenResult eig = linops::sym_eigen(s);
  const double upper = eig.values.maxCoeff();
  const double lower = eig.values.minCoeff();
  if (!(lower > 1e-12 * std::max(1.0, upper))) throw ContractError("frame_operator_bounds: not a frame (rank deficient)");
  return {lower, upper};
}

namespace {

Mat normalized_gram(const Frame& frame) {
  Mat u = frame.elements();
  for (Eigen::Index i = 0; i < u.cols(); ++i) {
    const double norm = u.col(i).norm();
    if (!(norm > 0.0)) throw ContractError("coherence: zero frame element");
    u.col(i) /= norm;
  }
  return u.transpose() * u;
}

}  // namespace

double coherence(const Frame& frame) {
  if (frame.size() < 2) throw ContractError("coherence: needs at least two elements");
  Mat g = normalized_gram(frame).cwiseAbs();
  g.diagonal().setZero();
  return std::min(1.0, g.maxCoeff());
}

double welch_bound(Eigen::Index m, Eigen::Index n) {
  if (n < 1 || m < 2) throw ContractError("welch_bound: needs M >= 2 and N >= 1");
  if (m < n) throw ContractError("welch_bound: M < N");
  const auto md = static_cast<double>(m);
  const auto nd = static_cast<double>(n);
  return std::sqrt((md - nd) / (nd * (md - 1.0)));
}

EtfReport is_equiangular_tight(const Frame& frame, double tol) {
  if (frame.size() < 2) throw ContractError("is_equiangular_tight: needs at least two elements");
  if (!frame.unit_norm()) throw ContractError("is_equiangular_tight: frame must be unit norm");
  EtfReport r;
  const Mat g = frame.elements().transpose() * frame.elements();
  r.min_abs_inner = std::numeric_limits<double>::infinity();
  r.max_abs_inner = 0.0;
  for (Eigen::Index i = 0; i < g.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < g.cols(); ++j) {
      r.min_abs_inner = std::min(r.min_abs_inner, std::abs(g(i, j)));
      r.max_abs_inner = std::max(r.max_abs_inner, std::abs(g(i, j)));
    }
  }
  r.coherence = r.max_abs_inner;
  const Eigen::Index m = frame.size();
  const Eigen::Index n = frame.dimension();
  r.welch = m >= n ? welch_bound(m, n) : 0.0;
  r.gap = r.coherence - r.welch;
  r.size_admissible = m <= n * (n + 1) / 2;
  bool spanning = true;
  try {
    r.bounds = frame_operator_bounds(frame);
  } catch (const ContractError&) {
    spanning = false;
  }
  r.equiangular_tight = spanning && (r.max_abs_inner - r.min_abs_inner) <= tol && r.bounds.tight(tol);
  return r;
}

namespace {

double binomial(Eigen::Index n, Eigen::Index k) {
  double out = 1.0;
  for (Eigen::Index i = 1; i <= k; ++i) out = out * static_cast<double>(n - k + i) / static_cast<double>(i);
  return out;
}

}  // namespace

double rip_constant_exact(const Frame& frame, Eigen::Index k) {
  const Eigen::Index m = frame.size();
  if (k < 1 || k > m) throw ContractError("rip_constant_exact: need 1 <= K <= M");
  if (binomial(m, k) > 1e6) throw ContractError("rip_constant_exact: too many subsets to enumerate");

  const Mat g = frame.elements().transpose() * frame.elements();
  std::vector<Eigen::Index> subset(static_cast<std::size_t>(k));
  std::iota(subset.begin(), subset.end(), Eigen::Index{0});
  Mat block(k, k);
  double worst = 0.0;
  while (true) {
    for (Eigen::Index a = 0; a < k; ++a) {
      for (Eigen::Index b = 0; b < k; ++b) block(a, b) = g(subset[a], subset[b]);
    }
    block.diagonal().array() -= 1.0;
    Eigen::SelfAdjointEigenSolver<Mat> eig(block, Eigen::EigenvaluesOnly);
    worst = std::max(worst, eig.eigenvalues().cwiseAbs().maxCoeff());

    // Next subset in lexicographic order.
    Eigen::Index pos = k - 1;
    while (pos >= 0 && subset[pos] == m - k + pos) --pos;
    if (pos < 0) break;
    ++subset[pos];
    for (Eigen::Index q = pos + 1; q < k; ++q) subset[q] = subset[q - 1] + 1;
  }
  return worst;
}

double rip_gershgorin_bound(const Frame& frame, Eigen::Index k) {
  if (k < 1) throw ContractError("rip_gershgorin_bound: K must be positive");
  if (k == 1) return 0.0;
  return static_cast<double>(k - 1) * coherence(frame);
}

double etf_penalty(const Frame& frame, std::optional<double> gram_cap) {
  const Eigen::Index m = frame.size();
  const double cap = gram_cap ? *gram_cap : (m >= 2 && m >= frame.dimension() ? welch_bound(m, frame.dimension()) : 0.0);
  if (cap < 0.0 || cap > 1.0) throw ContractError("etf_penalty: gram cap must lie in [0, 1]");
  const Mat g = frame.elements().transpose() * frame.elements();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      if (i == j) {
        acc += (g(i, i) - 1.0) * (g(i, i) - 1.0);
      } else {
        const double excess = std::max(0.0, std::abs(g(i, j)) - cap);
        acc += excess * excess;
      }
    }
  }
  return acc;
}

}  // namespace grassdict
