#include "grassdict/setmetric.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "grassdict/parallel.hpp"
#include "grassdict/transport.hpp"

namespace grassdict {

namespace {

struct GroundInfo {
  GroundDistance kind;
  std::string_view name;
  bool metric;
};

constexpr std::array<GroundInfo, 9> kGrounds{{
    {GroundDistance::geodesic, "geodesic", true},
    {GroundDistance::chordal, "chordal", true},
    {GroundDistance::chordal2, "chordal2", false},
    {GroundDistance::projection, "projection", true},
    {GroundDistance::projection2, "projection2", false},
    {GroundDistance::fubini_study, "fubini", true},
    {GroundDistance::spectral, "spectral", false},
    {GroundDistance::binet_cauchy, "binetcauchy", true},
    {GroundDistance::frobenius, "frobenius", false},
}};

const GroundInfo& info(GroundDistance g) {
  return kGrounds[static_cast<std::size_t>(g)];
}

bool is_uniform(const Vec& w) {
  return (w.array() - w(0)).abs().maxCoeff() <= 1e-15;
}

}  // namespace

bool is_true_metric(GroundDistance g) noexcept { return info(g).metric; }

std::string_view ground_name(GroundDistance g) noexcept { return info(g).name; }

std::optional<GroundDistance> parse_ground(std::string_view name) noexcept {
  for (const auto& entry : kGrounds) {
    if (entry.name == name) return entry.kind;
  }
  return std::nullopt;
}

double ground_upper_bound(GroundDistance g, Eigen::Index dim) {
  if (dim < 1) throw ContractError("ground_upper_bound: dimension must be positive");
  const double k = static_cast<double>(dim);
  switch (g) {
    case GroundDistance::geodesic: return std::numbers::pi * std::sqrt(k) / 2.0;
    case GroundDistance::chordal: return std::sqrt(k);
    case GroundDistance::projection: return std::sqrt(2.0 * k);
    case GroundDistance::projection2: return std::numbers::sqrt2;
    case GroundDistance::fubini_study: return std::numbers::pi / 2.0;
    case GroundDistance::chordal2:
    case GroundDistance::spectral:
    case GroundDistance::binet_cauchy: return 1.0;
    case GroundDistance::frobenius: return 2.0;
  }
  return 0.0;
}

double ground_distance(GroundDistance g, const Subspace& u, const Subspace& w) {
  switch (g) {
    case GroundDistance::geodesic: return geodesic(u, w);
    case GroundDistance::chordal: return chordal(u, w);
    case GroundDistance::chordal2: return chordal_2norm(u, w);
    case GroundDistance::projection: return projection(u, w);
    case GroundDistance::projection2: return projection_2norm(u, w);
    case GroundDistance::fubini_study: return fubini_study(u, w);
    case GroundDistance::spectral: return spectral(u, w);
    case GroundDistance::binet_cauchy: return binet_cauchy(u, w);
    case GroundDistance::frobenius: break;
  }
  throw ContractError("ground_distance: frobenius ground compares atoms, not subspaces");
}

DiscreteMeasureSet DiscreteMeasureSet::uniform(std::vector<Subspace> subspaces) {
  const auto n = static_cast<Eigen::Index>(subspaces.size());
  if (n == 0) throw ContractError("DiscreteMeasureSet: empty set");
  return {std::move(subspaces), Vec::Constant(n, 1.0 / static_cast<double>(n))};
}

DiscreteMeasureSet DiscreteMeasureSet::uniform(std::vector<Atom> atoms) {
  const auto n = static_cast<Eigen::Index>(atoms.size());
  if (n == 0) throw ContractError("DiscreteMeasureSet: empty set");
  return {std::move(atoms), Vec::Constant(n, 1.0 / static_cast<double>(n))};
}

DiscreteMeasureSet DiscreteMeasureSet::weighted(std::vector<Subspace> subspaces, Vec weights) {
  DiscreteMeasureSet out{std::move(subspaces), std::move(weights)};
  out.validate();
  return out;
}

std::size_t DiscreteMeasureSet::size() const noexcept {
  return std::visit([](const auto& v) { return v.size(); }, points);
}

void DiscreteMeasureSet::validate() const {
  if (size() == 0) throw ContractError("DiscreteMeasureSet: empty set");
  if (static_cast<std::size_t>(weights.size()) != size()) {
    throw ContractError("DiscreteMeasureSet: weight count differs from point count");
  }
  if (!weights.allFinite() || (weights.array() < 0.0).any()) {
    throw ContractError("DiscreteMeasureSet: weights must be finite and nonnegative");
  }
  if (std::abs(weights.sum() - 1.0) > 1e-12) throw ContractError("DiscreteMeasureSet: weights must sum to 1");
}

Mat pairwise_ground(const DiscreteMeasureSet& a, const DiscreteMeasureSet& b, GroundDistance g) {
  a.validate();
  b.validate();
  const auto rows = static_cast<Eigen::Index>(a.size());
  const auto cols = static_cast<Eigen::Index>(b.size());
  Mat out(rows, cols);

  if (g == GroundDistance::frobenius) {
    const auto* pa = std::get_if<std::vector<Atom>>(&a.points);
    const auto* pb = std::get_if<std::vector<Atom>>(&b.points);
    if (!pa || !pb) throw ContractError("pairwise_ground: frobenius ground needs atom points");
    if (pa->front().rows() != pb->front().rows() || pa->front().cols() != pb->front().cols()) {
      throw ShapeError("pairwise_ground: atom shapes differ");
    }
    parallel_for(static_cast<std::size_t>(rows), [&](std::size_t i) {
      for (Eigen::Index j = 0; j < cols; ++j) out(static_cast<Eigen::Index>(i), j) = atom_frobenius_distance((*pa)[i], (*pb)[j]);
    });
    return out;
  }

  const auto* sa = std::get_if<std::vector<Subspace>>(&a.points);
  const auto* sb = std::get_if<std::vector<Subspace>>(&b.points);
  if (!sa || !sb) throw ContractError("pairwise_ground: Grassmannian grounds need subspace points");
  if (sa->front().ambient_dim() != sb->front().ambient_dim()) {
    throw ShapeError("pairwise_ground: ambient dimensions differ");
  }
  parallel_for(static_cast<std::size_t>(rows), [&](std::size_t i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      out(static_cast<Eigen::Index>(i), j) = ground_distance(g, (*sa)[i], (*sb)[static_cast<std::size_t>(j)]);
    }
  });
  return out;
}

double hausdorff(const Mat& ground) {
  if (ground.size() == 0) throw ContractError("hausdorff: empty set");
  linops::require_finite(ground, "hausdorff");
  return std::max(ground.rowwise().minCoeff().maxCoeff(), ground.colwise().minCoeff().maxCoeff());
}

double hausdorff(const DiscreteMeasureSet& a, const DiscreteMeasureSet& b, GroundDistance g) {
  return hausdorff(pairwise_ground(a, b, g));
}

TransportResult wasserstein(const Mat& ground, const Vec& wa, const Vec& wb, double p) {
  if (!(p > 0.0)) throw ContractError("wasserstein: order must be positive");
  if (ground.size() == 0) throw ContractError("wasserstein: empty set");
  if (ground.rows() != wa.size() || ground.cols() != wb.size()) throw ShapeError("wasserstein: weight sizes differ");
  linops::require_finite(ground, "wasserstein");

  TransportResult out;
  if (std::isinf(p)) {
    auto b = transport::solve_bottleneck(wa, wb, ground);
    out.value = b.value;
    out.plan = std::move(b.flow);
    return out;
  }

  const Mat cost = ground.array().pow(p).matrix();
  double total = 0.0;
  if (wa.size() == wb.size() && is_uniform(wa) && is_uniform(wb)) {
    const auto match = transport::solve_assignment(cost);
    const double mass = wa(0);
    out.plan = Mat::Zero(ground.rows(), ground.cols());
    for (std::size_t i = 0; i < match.row_to_col.size(); ++i) {
      out.plan(static_cast<Eigen::Index>(i), match.row_to_col[i]) = mass;
    }
    total = match.cost * mass;
  } else {
    auto plan = transport::solve_transportation(wa, wb, cost);
    total = plan.cost;
    out.plan = std::move(plan.flow);
  }
  total = std::max(0.0, total);
  out.value = p >= 1.0 ? std::pow(total, 1.0 / p) : total;
  return out;
}

double wasserstein(const DiscreteMeasureSet& a, const DiscreteMeasureSet& b, GroundDistance g, double p) {
  return wasserstein(pairwise_ground(a, b, g), a.weights, b.weights, p).value;
}

double dictionary_distance(const Dictionary& a, const Dictionary& b, GroundDistance g, SetMetric s, double p,
                           double rank_tol) {
  if (a.size() == 0 || b.size() == 0) throw ContractError("dictionary_distance: empty dictionary");
  if (a.signal_length() != b.signal_length() || a.channels() != b.channels()) {
    throw ShapeError("dictionary_distance: dictionaries have different atom shapes");
  }
  const auto sa = g == GroundDistance::frobenius ? DiscreteMeasureSet::uniform(a.atoms())
                                                 : DiscreteMeasureSet::uniform(a.subspaces(rank_tol));
  const auto sb = g == GroundDistance::frobenius ? DiscreteMeasureSet::uniform(b.atoms())
                                                 : DiscreteMeasureSet::uniform(b.subspaces(rank_tol));
  const Mat ground = pairwise_ground(sa, sb, g);
  if (s == SetMetric::hausdorff) return hausdorff(ground);
  return wasserstein(ground, sa.weights, sb.weights, p).value;
}

double normalized_score(double d, GroundDistance g, Eigen::Index dim) {
  // Frobenius distances range over [0, 2] but are scored against sqrt(2),
  // the distance between uncorrelated atoms; anything beyond scores 0.
  const double range = ground_upper_bound(g, dim);
  const double scale = g == GroundDistance::frobenius ? std::numbers::sqrt2 : range;
  if (!std::isfinite(d) || d < -1e-9 || d > range + 1e-9) {
    throw ContractError("normalized_score: distance outside the ground distance range");
  }
  return std::clamp((scale - d) / scale * 100.0, 0.0, 100.0);
}

}  // namespace grassdict
