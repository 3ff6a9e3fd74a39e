#include "grassdict/transport.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

namespace grassdict::transport {

namespace {

void check_marginals(const Vec& supply, const Vec& demand) {
  if (supply.size() == 0 || demand.size() == 0) throw ContractError("transport: empty marginal");
  if ((supply.array() < 0.0).any() || (demand.array() < 0.0).any()) {
    throw ContractError("transport: negative mass");
  }
  if (std::abs(supply.sum() - demand.sum()) > 1e-9 * std::max(1.0, supply.sum())) {
    throw ContractError("transport: unbalanced marginals");
  }
}

}  // namespace

Assignment solve_assignment(const Mat& cost) {
  const int n = static_cast<int>(cost.rows());
  if (n == 0 || cost.cols() != cost.rows()) throw ShapeError("solve_assignment: cost must be square");
  linops::require_finite(cost, "solve_assignment");

  // Potentials formulation, 1-based with a virtual column 0.
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }

  Assignment out;
  out.row_to_col.assign(n, -1);
  for (int j = 1; j <= n; ++j) out.row_to_col[p[j] - 1] = j - 1;
  for (int i = 0; i < n; ++i) out.cost += cost(i, out.row_to_col[i]);
  return out;
}

Plan solve_transportation(const Vec& supply, const Vec& demand, const Mat& cost) {
  check_marginals(supply, demand);
  const int m = static_cast<int>(supply.size());
  const int n = static_cast<int>(demand.size());
  if (cost.rows() != m || cost.cols() != n) throw ShapeError("solve_transportation: cost shape mismatch");
  linops::require_finite(cost, "solve_transportation");

  Mat flow = Mat::Zero(m, n);
  std::vector<std::vector<char>> basic(m, std::vector<char>(n, 0));

  // North-west corner: exactly m + n - 1 basic cells, zero-flow ones included.
  {
    Vec s = supply;
    Vec d = demand;
    int i = 0, j = 0;
    while (true) {
      const double q = std::min(s(i), d(j));
      flow(i, j) = q;
      basic[i][j] = 1;
      s(i) -= q;
      d(j) -= q;
      if (i == m - 1 && j == n - 1) break;
      if (i == m - 1) {
        ++j;
      } else if (j == n - 1) {
        ++i;
      } else if (s(i) <= d(j)) {
        ++i;
      } else {
        ++j;
      }
    }
  }

  const double scale = std::max(1.0, cost.cwiseAbs().maxCoeff());
  const double eps = 1e-12 * scale;
  const int max_pivots = 50 * (m + n) * (m + n) + 1000;
  // Switch from Dantzig's rule to first-improving after this many pivots to
  // escape degenerate cycling.
  const int bland_after = 5 * (m + n) * (m + n) + 100;

  Plan out;
  std::vector<double> u(m), v(n);
  std::vector<char> seen_row(m), seen_col(n);
  // Tree nodes: rows are 0..m-1, columns are m..m+n-1.
  std::vector<int> parent(m + n);

  for (int pivot = 0;; ++pivot) {
    if (pivot > max_pivots) throw DecompositionError("solve_transportation: pivot limit exceeded");

    // Potentials by traversing the basis tree from row 0.
    std::fill(seen_row.begin(), seen_row.end(), 0);
    std::fill(seen_col.begin(), seen_col.end(), 0);
    std::deque<int> queue{0};
    u[0] = 0.0;
    seen_row[0] = 1;
    while (!queue.empty()) {
      const int node = queue.front();
      queue.pop_front();
      if (node < m) {
        for (int j = 0; j < n; ++j) {
          if (basic[node][j] && !seen_col[j]) {
            v[j] = cost(node, j) - u[node];
            seen_col[j] = 1;
            queue.push_back(m + j);
          }
        }
      } else {
        const int j = node - m;
        for (int i = 0; i < m; ++i) {
          if (basic[i][j] && !seen_row[i]) {
            u[i] = cost(i, j) - v[j];
            seen_row[i] = 1;
            queue.push_back(i);
          }
        }
      }
    }

    int ei = -1, ej = -1;
    double best = -eps;
    for (int i = 0; i < m && !(pivot > bland_after && ei >= 0); ++i) {
      for (int j = 0; j < n; ++j) {
        if (basic[i][j]) continue;
        const double reduced = cost(i, j) - u[i] - v[j];
        if (reduced < best) {
          best = reduced;
          ei = i;
          ej = j;
          if (pivot > bland_after) break;
        }
      }
    }
    if (ei < 0) break;

    // Path in the basis tree from column ej back to row ei.
    std::fill(parent.begin(), parent.end(), -2);
    parent[m + ej] = -1;
    queue.assign(1, m + ej);
    while (!queue.empty() && parent[ei] == -2) {
      const int node = queue.front();
      queue.pop_front();
      if (node < m) {
        for (int j = 0; j < n; ++j) {
          if (basic[node][j] && parent[m + j] == -2) {
            parent[m + j] = node;
            queue.push_back(m + j);
          }
        }
      } else {
        const int j = node - m;
        for (int i = 0; i < m; ++i) {
          if (basic[i][j] && parent[i] == -2) {
            parent[i] = node;
            queue.push_back(i);
          }
        }
      }
    }
    if (parent[ei] == -2) throw DecompositionError("solve_transportation: basis is not a spanning tree");

    // Walk row ei -> ... -> column ej; cells alternate -, +, -, ...
    std::vector<std::pair<int, int>> cycle_cells;
    for (int node = ei; parent[node] != -1; node = parent[node]) {
      const int next = parent[node];
      if (node < m) {
        cycle_cells.emplace_back(node, next - m);
      } else {
        cycle_cells.emplace_back(next, node - m);
      }
    }
    double theta = std::numeric_limits<double>::infinity();
    std::size_t leave = 0;
    for (std::size_t k = 0; k < cycle_cells.size(); k += 2) {
      const auto [i, j] = cycle_cells[k];
      if (flow(i, j) < theta) {
        theta = flow(i, j);
        leave = k;
      }
    }
    flow(ei, ej) += theta;
    for (std::size_t k = 0; k < cycle_cells.size(); ++k) {
      const auto [i, j] = cycle_cells[k];
      flow(i, j) += (k % 2 == 0) ? -theta : theta;
    }
    const auto [li, lj] = cycle_cells[leave];
    flow(li, lj) = 0.0;
    basic[li][lj] = 0;
    basic[ei][ej] = 1;
    ++out.pivots;
  }

  out.flow = flow.cwiseMax(0.0);
  out.cost = (out.flow.array() * cost.array()).sum();
  return out;
}

namespace {

// Dinic max-flow on a dense bipartite network with real capacities.
class FlowNetwork {
 public:
  explicit FlowNetwork(int nodes) : adj_(nodes), level_(nodes), it_(nodes) {}

  int add_edge(int from, int to, double cap) {
    adj_[from].push_back(static_cast<int>(edges_.size()));
    edges_.push_back({to, cap});
    adj_[to].push_back(static_cast<int>(edges_.size()));
    edges_.push_back({from, 0.0});
    return static_cast<int>(edges_.size()) - 2;
  }

  double max_flow(int s, int t) {
    double total = 0.0;
    while (bfs(s, t)) {
      std::fill(it_.begin(), it_.end(), 0);
      while (true) {
        const double pushed = dfs(s, t, std::numeric_limits<double>::infinity());
        if (pushed <= kEps) break;
        total += pushed;
      }
    }
    return total;
  }

  [[nodiscard]] double flow_on(int edge) const { return edges_[edge ^ 1].cap; }

 private:
  struct Edge {
    int to;
    double cap;
  };
  static constexpr double kEps = 1e-15;

  bool bfs(int s, int t) {
    std::fill(level_.begin(), level_.end(), -1);
    std::deque<int> queue{s};
    level_[s] = 0;
    while (!queue.empty()) {
      const int node = queue.front();
      queue.pop_front();
      for (int e : adj_[node]) {
        if (edges_[e].cap > kEps && level_[edges_[e].to] < 0) {
          level_[edges_[e].to] = level_[node] + 1;
          queue.push_back(edges_[e].to);
        }
      }
    }
    return level_[t] >= 0;
  }

  double dfs(int node, int t, double limit) {
    if (node == t) return limit;
    for (auto& k = it_[node]; k < static_cast<int>(adj_[node].size()); ++k) {
      const int e = adj_[node][k];
      const int to = edges_[e].to;
      if (edges_[e].cap <= kEps || level_[to] != level_[node] + 1) continue;
      const double pushed = dfs(to, t, std::min(limit, edges_[e].cap));
      if (pushed > kEps) {
        edges_[e].cap -= pushed;
        edges_[e ^ 1].cap += pushed;
        return pushed;
      }
    }
    return 0.0;
  }

  std::vector<Edge> edges_;
  std::vector<std::vector<int>> adj_;
  std::vector<int> level_;
  std::vector<int> it_;
};

}  // namespace

bool coupling_feasible(const Vec& supply, const Vec& demand,
                       const Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>& allowed, Mat* flow) {
  check_marginals(supply, demand);
  const int m = static_cast<int>(supply.size());
  const int n = static_cast<int>(demand.size());
  if (allowed.rows() != m || allowed.cols() != n) throw ShapeError("coupling_feasible: mask shape mismatch");

  const int source = m + n;
  const int sink = m + n + 1;
  FlowNetwork net(m + n + 2);
  for (int i = 0; i < m; ++i) net.add_edge(source, i, supply(i));
  for (int j = 0; j < n; ++j) net.add_edge(m + j, sink, demand(j));
  std::vector<std::tuple<int, int, int>> cells;
  const double unbounded = supply.sum() + 1.0;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      if (allowed(i, j)) cells.emplace_back(i, j, net.add_edge(i, m + j, unbounded));
    }
  }
  const double total = net.max_flow(source, sink);
  const bool ok = total >= supply.sum() - 1e-9 * std::max(1.0, supply.sum());
  if (ok && flow) {
    *flow = Mat::Zero(m, n);
    for (const auto& [i, j, e] : cells) (*flow)(i, j) = net.flow_on(e);
  }
  return ok;
}

Bottleneck solve_bottleneck(const Vec& supply, const Vec& demand, const Mat& dist) {
  check_marginals(supply, demand);
  if (dist.rows() != supply.size() || dist.cols() != demand.size()) {
    throw ShapeError("solve_bottleneck: distance shape mismatch");
  }
  linops::require_finite(dist, "solve_bottleneck");
  std::vector<double> levels(dist.data(), dist.data() + dist.size());
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

  // Every coupling is supported on the full grid, so the largest level is
  // always feasible.
  std::size_t lo = 0, hi = levels.size() - 1;
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (coupling_feasible(supply, demand, dist.array() <= levels[mid])) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  Bottleneck out;
  out.value = levels[lo];
  if (!coupling_feasible(supply, demand, dist.array() <= levels[lo], &out.flow)) {
    throw DecompositionError("solve_bottleneck: threshold search lost feasibility");
  }
  return out;
}

}  // namespace grassdict::transport
