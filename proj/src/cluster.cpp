#include "grassdict/cluster.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <queue>
#include <string>

#include "grassdict/errors.hpp"

namespace grassdict {

namespace {

std::size_t dim(const Mat& m) { return static_cast<std::size_t>(m.rows()); }

void require_square(const Mat& m, const char* what) {
  if (m.rows() != m.cols()) throw ShapeError(std::string(what) + ": matrix must be square");
  if (m.rows() == 0) throw ContractError(std::string(what) + ": empty matrix");
  linops::require_finite(m, what);
}

void require_partition(const Partition& p, const char* what) {
  if (p.labels.empty()) throw ContractError(std::string(what) + ": empty partition");
  for (const int l : p.labels) {
    if (l < 0) throw ContractError(std::string(what) + ": negative cluster label");
  }
}

std::map<std::pair<int, int>, std::size_t> joint_counts(const Partition& a, const Partition& b) {
  std::map<std::pair<int, int>, std::size_t> joint;
  for (std::size_t i = 0; i < a.size(); ++i) ++joint[{a.labels[i], b.labels[i]}];
  return joint;
}

double entropy(const std::vector<int>& labels) {
  std::map<int, std::size_t> counts;
  for (const int l : labels) ++counts[l];
  const auto n = static_cast<double>(labels.size());
  double h = 0.0;
  for (const auto& [label, c] : counts) {
    const double p = static_cast<double>(c) / n;
    h -= p * std::log(p);
  }
  return h;
}

// Union-find over cluster ids for dendrogram replay.
struct DisjointSets {
  std::vector<std::size_t> parent;
  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), std::size_t{0}); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
};

// First entry above 1e-12 in magnitude made positive.
void fix_sign(Eigen::Ref<Vec> v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) > 1e-12) {
      if (v(i) < 0.0) v = -v;
      return;
    }
  }
}

}  // namespace

void validate_distance_matrix(const Mat& d) {
  require_square(d, "distance matrix");
  const double scale = std::max(1.0, d.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < d.rows(); ++i) {
    if (d(i, i) != 0.0) throw ContractError("distance matrix: nonzero diagonal");
    for (Eigen::Index j = 0; j < d.cols(); ++j) {
      if (d(i, j) < 0.0) throw ContractError("distance matrix: negative entry");
      if (std::abs(d(i, j) - d(j, i)) > 1e-12 * scale) throw ContractError("distance matrix: not symmetric");
    }
  }
}

int Partition::num_clusters() const {
  if (labels.empty()) return 0;
  return *std::max_element(labels.begin(), labels.end()) + 1;
}

Partition canonical(const Partition& p) {
  std::map<int, int> rename;
  Partition out;
  out.labels.reserve(p.labels.size());
  for (const int l : p.labels) {
    const auto it = rename.try_emplace(l, static_cast<int>(rename.size())).first;
    out.labels.push_back(it->second);
  }
  if (!p.exemplars.empty()) {
    out.exemplars.assign(rename.size(), 0);
    for (const auto& [old_label, new_label] : rename) {
      if (static_cast<std::size_t>(old_label) < p.exemplars.size()) {
        out.exemplars[static_cast<std::size_t>(new_label)] = p.exemplars[static_cast<std::size_t>(old_label)];
      }
    }
  }
  return out;
}

Mat to_similarity(const Mat& d, double sigma) {
  validate_distance_matrix(d);
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ContractError("to_similarity: sigma must be positive");
  const Eigen::Index n = d.rows();
  Mat s = (-d.array().square() / (2.0 * sigma * sigma)).exp().matrix();
  std::vector<double> off;
  off.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) off.push_back(d(i, j));
  }
  double preference = 1.0;
  if (!off.empty()) {
    std::sort(off.begin(), off.end());
    const std::size_t h = off.size() / 2;
    const double median = off.size() % 2 == 1 ? off[h] : 0.5 * (off[h - 1] + off[h]);
    preference = std::exp(-median * median / (2.0 * sigma * sigma));
  }
  s.diagonal().setConstant(preference);
  return s;
}

ApResult affinity_propagation(const Mat& s, const ApOptions& options) {
  require_square(s, "affinity_propagation");
  if (!(options.damping >= 0.5 && options.damping < 1.0)) {
    throw ContractError("affinity_propagation: damping must lie in [0.5, 1)");
  }
  if (options.convergence_window == 0 || options.max_iterations == 0) {
    throw ContractError("affinity_propagation: window and cap must be positive");
  }
  const Eigen::Index n = s.rows();
  ApResult result;
  if (n == 1) {
    result.partition = {{0}, {0}};
    result.converged = true;
    return result;
  }

  const double lambda = options.damping;
  Mat r = Mat::Zero(n, n);
  Mat a = Mat::Zero(n, n);
  std::vector<char> exemplar(static_cast<std::size_t>(n), 0);
  std::size_t stable = 0;

  for (std::size_t it = 1; it <= options.max_iterations; ++it) {
    const Mat as = a + s;
    for (Eigen::Index i = 0; i < n; ++i) {
      double first = -std::numeric_limits<double>::infinity();
      double second = first;
      Eigen::Index arg = 0;
      for (Eigen::Index k = 0; k < n; ++k) {
        const double v = as(i, k);
        if (v > first) {
          second = first;
          first = v;
          arg = k;
        } else if (v > second) {
          second = v;
        }
      }
      for (Eigen::Index k = 0; k < n; ++k) {
        const double fresh = s(i, k) - (k == arg ? second : first);
        r(i, k) = lambda * r(i, k) + (1.0 - lambda) * fresh;
      }
    }
    for (Eigen::Index k = 0; k < n; ++k) {
      double total = r(k, k);
      for (Eigen::Index i = 0; i < n; ++i) {
        if (i != k) total += std::max(0.0, r(i, k));
      }
      for (Eigen::Index i = 0; i < n; ++i) {
        const double fresh = i == k ? total - r(k, k) : std::min(0.0, total - std::max(0.0, r(i, k)));
        a(i, k) = lambda * a(i, k) + (1.0 - lambda) * fresh;
      }
    }

    bool changed = false;
    bool any = false;
    for (Eigen::Index k = 0; k < n; ++k) {
      const char e = a(k, k) + r(k, k) > 0.0 ? 1 : 0;
      any = any || e;
      if (e != exemplar[static_cast<std::size_t>(k)]) changed = true;
      exemplar[static_cast<std::size_t>(k)] = e;
    }
    stable = changed ? 1 : stable + 1;
    result.iterations = it;
    if (any && stable >= options.convergence_window) {
      result.converged = true;
      break;
    }
  }

  std::vector<Eigen::Index> centers;
  for (Eigen::Index k = 0; k < n; ++k) {
    if (exemplar[static_cast<std::size_t>(k)]) centers.push_back(k);
  }
  if (centers.empty()) {
    Eigen::Index best = 0;
    (a + r).diagonal().maxCoeff(&best);
    centers.push_back(best);
    result.converged = false;
  }

  Partition p;
  p.labels.assign(static_cast<std::size_t>(n), 0);
  for (Eigen::Index i = 0; i < n; ++i) {
    std::size_t label = 0;
    const auto own = std::find(centers.begin(), centers.end(), i);
    if (own != centers.end()) {
      label = static_cast<std::size_t>(own - centers.begin());
    } else {
      for (std::size_t c = 1; c < centers.size(); ++c) {
        if (s(i, centers[c]) > s(i, centers[label])) label = c;
      }
    }
    p.labels[static_cast<std::size_t>(i)] = static_cast<int>(label);
  }
  for (const Eigen::Index c : centers) p.exemplars.push_back(static_cast<std::size_t>(c));
  result.partition = canonical(p);
  return result;
}

double normalized_mutual_information(const Partition& a, const Partition& b) {
  require_partition(a, "normalized_mutual_information");
  require_partition(b, "normalized_mutual_information");
  if (a.size() != b.size()) throw ShapeError("normalized_mutual_information: partitions differ in size");
  const double ha = entropy(a.labels);
  const double hb = entropy(b.labels);
  if (ha == 0.0 && hb == 0.0) return 1.0;
  if (ha == 0.0 || hb == 0.0) return 0.0;

  std::map<int, std::size_t> ca;
  std::map<int, std::size_t> cb;
  for (const int l : a.labels) ++ca[l];
  for (const int l : b.labels) ++cb[l];
  const auto n = static_cast<double>(a.size());
  double mi = 0.0;
  for (const auto& [key, c] : joint_counts(a, b)) {
    const double pxy = static_cast<double>(c) / n;
    const double px = static_cast<double>(ca[key.first]) / n;
    const double py = static_cast<double>(cb[key.second]) / n;
    mi += pxy * std::log(pxy / (px * py));
  }
  return std::clamp(mi / std::sqrt(ha * hb), 0.0, 1.0);
}

Dendrogram agglomerate(const Mat& d, Linkage linkage) {
  validate_distance_matrix(d);
  const std::size_t n = dim(d);
  Dendrogram tree;
  if (n < 2) return tree;
  tree.reserve(n - 1);

  // Active clusters: id, members, and linkage distances kept in a matrix
  // indexed by slot.
  std::vector<std::size_t> ids(n);
  std::iota(ids.begin(), ids.end(), std::size_t{0});
  std::vector<std::vector<std::size_t>> members(n);
  for (std::size_t i = 0; i < n; ++i) members[i] = {i};
  Mat dist = d;
  // Hausdorff bookkeeping: nearest[p][slot] = min distance from point p to
  // the members of the cluster in that slot.
  Mat nearest;
  if (linkage == Linkage::hausdorff) nearest = d;
  std::vector<char> alive(n, 1);

  auto hausdorff_between = [&](std::size_t x, std::size_t y) {
    double h = 0.0;
    for (const std::size_t p : members[x]) h = std::max(h, nearest(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(y)));
    for (const std::size_t p : members[y]) h = std::max(h, nearest(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(x)));
    return h;
  };

  for (std::size_t step = 0; step + 1 < n; ++step) {
    std::size_t bx = 0;
    std::size_t by = 0;
    double best = std::numeric_limits<double>::infinity();
    std::pair<std::size_t, std::size_t> best_ids{std::numeric_limits<std::size_t>::max(), 0};
    for (std::size_t x = 0; x < n; ++x) {
      if (!alive[x]) continue;
      for (std::size_t y = x + 1; y < n; ++y) {
        if (!alive[y]) continue;
        const double v = dist(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y));
        const std::pair<std::size_t, std::size_t> pair_ids = std::minmax(ids[x], ids[y]);
        if (v < best || (v == best && pair_ids < best_ids)) {
          best = v;
          best_ids = pair_ids;
          bx = x;
          by = y;
        }
      }
    }

    const std::size_t size_x = members[bx].size();
    const std::size_t size_y = members[by].size();
    tree.push_back({best_ids.first, best_ids.second, best, size_x + size_y});

    // Merge slot by into slot bx.
    members[bx].insert(members[bx].end(), members[by].begin(), members[by].end());
    members[by].clear();
    alive[by] = 0;
    ids[bx] = n + step;
    if (linkage == Linkage::hausdorff) {
      for (std::size_t p = 0; p < n; ++p) {
        auto& slot = nearest(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(bx));
        slot = std::min(slot, nearest(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(by)));
      }
    }
    for (std::size_t z = 0; z < n; ++z) {
      if (!alive[z] || z == bx) continue;
      const auto ez = static_cast<Eigen::Index>(z);
      const double dx = dist(static_cast<Eigen::Index>(bx), ez);
      const double dy = dist(static_cast<Eigen::Index>(by), ez);
      double v = 0.0;
      switch (linkage) {
        case Linkage::average:
          v = (static_cast<double>(size_x) * dx + static_cast<double>(size_y) * dy) / static_cast<double>(size_x + size_y);
          break;
        case Linkage::complete:
          v = std::max(dx, dy);
          break;
        case Linkage::hausdorff:
          v = hausdorff_between(bx, z);
          break;
      }
      dist(static_cast<Eigen::Index>(bx), ez) = v;
      dist(ez, static_cast<Eigen::Index>(bx)) = v;
    }
  }
  return tree;
}

Dendrogram hierarchical_hausdorff(const Mat& d) { return agglomerate(d, Linkage::hausdorff); }

Partition cut_dendrogram(const Dendrogram& tree, std::size_t n, std::size_t clusters) {
  if (n == 0) throw ContractError("cut_dendrogram: no points");
  if (tree.size() + 1 != n) throw ContractError("cut_dendrogram: dendrogram does not match point count");
  if (clusters < 1 || clusters > n) throw ContractError("cut_dendrogram: cluster count must lie in [1, n]");
  DisjointSets sets(2 * n - 1);
  for (std::size_t s = 0; s < n - clusters; ++s) {
    const Merge& m = tree[s];
    if (m.a >= n + s || m.b >= n + s) throw ContractError("cut_dendrogram: merge refers to a future cluster");
    sets.parent[sets.find(m.a)] = n + s;
    sets.parent[sets.find(m.b)] = n + s;
  }
  Partition p;
  std::map<std::size_t, int> rename;
  for (std::size_t i = 0; i < n; ++i) {
    const auto it = rename.try_emplace(sets.find(i), static_cast<int>(rename.size())).first;
    p.labels.push_back(it->second);
  }
  return p;
}

ConsensusResult consensus_ensemble(const std::vector<Partition>& partitions, std::size_t clusters) {
  if (partitions.empty()) throw ContractError("consensus_ensemble: no partitions");
  const std::size_t n = partitions.front().size();
  for (const Partition& p : partitions) {
    require_partition(p, "consensus_ensemble");
    if (p.size() != n) throw ShapeError("consensus_ensemble: partitions differ in size");
  }
  if (clusters < 1 || clusters > n) throw ContractError("consensus_ensemble: cluster count must lie in [1, n]");

  Mat together = Mat::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (const Partition& p : partitions) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (p.labels[i] == p.labels[j]) together(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) += 1.0;
      }
    }
  }
  const Mat dist = (1.0 - together.array() / static_cast<double>(partitions.size())).matrix();
  Mat clean = dist;
  clean.diagonal().setZero();

  ConsensusResult out;
  out.partition = cut_dendrogram(agglomerate(clean, Linkage::average), n, clusters);
  double total = 0.0;
  for (const Partition& p : partitions) total += normalized_mutual_information(out.partition, p);
  out.mean_nmi = total / static_cast<double>(partitions.size());
  return out;
}

Embedding laplacian_eigenmaps(const Mat& d, std::size_t neighbors, std::size_t out_dim) {
  validate_distance_matrix(d);
  const std::size_t n = dim(d);
  if (neighbors < 1 || neighbors >= n) throw ContractError("laplacian_eigenmaps: neighbors must lie in [1, n)");
  if (out_dim < 1) throw ContractError("laplacian_eigenmaps: output dimension must be positive");

  Mat w = Mat::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
      return d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(x)) <
             d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(y));
    });
    std::size_t taken = 0;
    for (const std::size_t j : order) {
      if (taken == neighbors) break;
      if (j == i) continue;
      w(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = 1.0;
      w(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = 1.0;
      ++taken;
    }
  }
  const Vec degree = w.rowwise().sum();
  const Mat laplacian = Mat(degree.asDiagonal()) - w;

  // Connected components by breadth-first search.
  std::vector<int> component(n, -1);
  int count = 0;
  for (std::size_t s = 0; s < n; ++s) {
    if (component[s] >= 0) continue;
    std::queue<std::size_t> todo;
    todo.push(s);
    component[s] = count;
    while (!todo.empty()) {
      const std::size_t v = todo.front();
      todo.pop();
      for (std::size_t u = 0; u < n; ++u) {
        if (component[u] < 0 && w(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(u)) > 0.0) {
          component[u] = count;
          todo.push(u);
        }
      }
    }
    ++count;
  }

  Embedding out;
  out.components = static_cast<std::size_t>(count);
  out.disconnected = count > 1;
  out.eigenvalues = linops::sym_eigen(laplacian).values;
  out.coordinates = Mat::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(out_dim));

  for (int c = 0; c < count; ++c) {
    std::vector<Eigen::Index> idx;
    for (std::size_t i = 0; i < n; ++i) {
      if (component[i] == c) idx.push_back(static_cast<Eigen::Index>(i));
    }
    const auto m = static_cast<Eigen::Index>(idx.size());
    if (m > 1) {
      Mat sub(m, m);
      for (Eigen::Index x = 0; x < m; ++x) {
        for (Eigen::Index y = 0; y < m; ++y) sub(x, y) = laplacian(idx[static_cast<std::size_t>(x)], idx[static_cast<std::size_t>(y)]);
      }
      Mat vectors = linops::sym_eigen(sub).vectors;
      const Eigen::Index usable = std::min<Eigen::Index>(static_cast<Eigen::Index>(out_dim), m - 1);
      for (Eigen::Index k = 0; k < usable; ++k) {
        Vec v = vectors.col(k + 1);
        fix_sign(v);
        for (Eigen::Index x = 0; x < m; ++x) out.coordinates(idx[static_cast<std::size_t>(x)], k) = v(x);
      }
    }
    if (out.disconnected) {
      const double shift = 3.0 * (static_cast<double>(c) - 0.5 * static_cast<double>(count - 1));
      for (const Eigen::Index i : idx) out.coordinates(i, 0) += shift;
    }
  }
  return out;
}

double session_purity(const Partition& partition, const std::vector<int>& sessions) {
  require_partition(partition, "session_purity");
  if (sessions.size() != partition.size()) throw ShapeError("session_purity: one session label per point required");
  std::map<int, std::array<std::size_t, 2>> counts;
  for (std::size_t i = 0; i < sessions.size(); ++i) {
    if (sessions[i] != 0 && sessions[i] != 1) throw ContractError("session_purity: session labels must be 0 or 1");
    ++counts[partition.labels[i]][static_cast<std::size_t>(sessions[i])];
  }
  std::size_t majority = 0;
  for (const auto& [label, c] : counts) majority += std::max(c[0], c[1]);
  const double fraction = static_cast<double>(majority) / static_cast<double>(sessions.size());
  return 2.0 * fraction - 1.0;
}

}  // namespace grassdict
