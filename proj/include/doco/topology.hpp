#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "doco/error.hpp"

namespace doco {

enum class TopologyKind { cycle, complete, path, grid2d };

inline const char* to_string(TopologyKind k) {
  switch (k) {
    case TopologyKind::cycle: return "cycle";
    case TopologyKind::complete: return "complete";
    case TopologyKind::path: return "path";
    case TopologyKind::grid2d: return "grid2d";
  }
  return "?";
}

inline TopologyKind topology_from_string(const std::string& s) {
  if (s == "cycle") return TopologyKind::cycle;
  if (s == "complete") return TopologyKind::complete;
  if (s == "path") return TopologyKind::path;
  if (s == "grid2d") return TopologyKind::grid2d;
  fail("invalid-size", "unknown topology '" + s + "'");
}

/// Undirected communication graph. Edges are stored once as (i, j) with
/// i < j; self-loops are implicit in the gossip matrix, never stored here.
struct Graph {
  int n = 0;
  std::vector<std::pair<int, int>> edges;

  bool has_edge(int i, int j) const {
    if (i > j) std::swap(i, j);
    return std::binary_search(edges.begin(), edges.end(), std::make_pair(i, j));
  }

  /// Neighbor lists excluding self.
  std::vector<std::vector<int>> neighbors() const {
    std::vector<std::vector<int>> adj(n);
    for (auto [i, j] : edges) {
      adj[i].push_back(j);
      adj[j].push_back(i);
    }
    return adj;
  }

  bool connected() const {
    if (n == 0) return false;
    if (n == 1) return true;
    auto adj = neighbors();
    std::vector<char> seen(n, 0);
    std::queue<int> q;
    q.push(0);
    seen[0] = 1;
    int count = 1;
    while (!q.empty()) {
      int u = q.front();
      q.pop();
      for (int v : adj[u]) {
        if (!seen[v]) {
          seen[v] = 1;
          ++count;
          q.push(v);
        }
      }
    }
    return count == n;
  }
};

inline Graph build_topology(TopologyKind kind, int n) {
  if (n < 2) fail("invalid-size", "topology needs n >= 2");
  Graph g;
  g.n = n;
  switch (kind) {
    case TopologyKind::cycle:
      for (int i = 0; i + 1 < n; ++i) g.edges.emplace_back(i, i + 1);
      if (n > 2) g.edges.emplace_back(0, n - 1);
      break;
    case TopologyKind::complete:
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) g.edges.emplace_back(i, j);
      break;
    case TopologyKind::path:
      for (int i = 0; i + 1 < n; ++i) g.edges.emplace_back(i, i + 1);
      break;
    case TopologyKind::grid2d: {
      int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(n))));
      if (side * side != n) fail("invalid-size", "grid2d needs a perfect-square n");
      auto id = [side](int r, int c) { return r * side + c; };
      for (int r = 0; r < side; ++r)
        for (int c = 0; c < side; ++c) {
          if (c + 1 < side) g.edges.emplace_back(id(r, c), id(r, c + 1));
          if (r + 1 < side) g.edges.emplace_back(id(r, c), id(r + 1, c));
        }
      break;
    }
  }
  std::sort(g.edges.begin(), g.edges.end());
  return g;
}

struct SpectralQuantities {
  double sigma2;  // second-largest singular value (|eigenvalue| for symmetric)
  double rho;     // 1 - sigma2
  double beta;    // spectral norm of I - P
};

/// Dense symmetric eigendecomposition; exact spectral quantities feed the
/// step-size formulas, so no iterative approximation here.
inline SpectralQuantities spectral_quantities(const Eigen::MatrixXd& p) {
  const auto n = p.rows();
  if (p.cols() != n) fail("invalid-matrix", "matrix must be square");
  if (p != p.transpose()) fail("invalid-matrix", "matrix must be symmetric");
  if (n == 1) return {0.0, 1.0, std::abs(1.0 - p(0, 0))};

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(p, Eigen::EigenvaluesOnly);
  std::vector<double> mags(n);
  double beta = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    mags[i] = std::abs(es.eigenvalues()[i]);
    beta = std::max(beta, std::abs(1.0 - es.eigenvalues()[i]));
  }
  std::sort(mags.begin(), mags.end(), std::greater<>());
  double sigma2 = mags[1];
  return {sigma2, 1.0 - sigma2, beta};
}

/// Symmetric doubly stochastic mixing matrix with cached spectral quantities.
struct GossipMatrix {
  Eigen::MatrixXd w;
  double sigma2 = 0.0;
  double rho = 1.0;
  double beta = 0.0;
  bool psd_enforced = false;

  int n() const { return static_cast<int>(w.rows()); }

  double min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(w, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
  }
};

inline GossipMatrix gossip_from_matrix(Eigen::MatrixXd w, bool psd_flag = false) {
  GossipMatrix p;
  auto sq = spectral_quantities(w);
  p.w = std::move(w);
  p.sigma2 = sq.sigma2;
  p.rho = sq.rho;
  p.beta = sq.beta;
  p.psd_enforced = psd_flag;
  return p;
}

/// Max-degree weights: P = I - (D - A) / (delta_max + 1). Symmetric and
/// doubly stochastic by construction; not necessarily PSD (see lazify).
inline GossipMatrix max_degree_weights(const Graph& g) {
  if (!g.connected()) fail("invalid-size", "graph must be connected");
  const int n = g.n;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd deg = Eigen::VectorXd::Zero(n);
  for (auto [i, j] : g.edges) {
    a(i, j) = 1.0;
    a(j, i) = 1.0;
    deg[i] += 1.0;
    deg[j] += 1.0;
  }
  double dmax = deg.maxCoeff();
  Eigen::MatrixXd w = a / (dmax + 1.0);
  for (int i = 0; i < n; ++i) w(i, i) = 1.0 - deg[i] / (dmax + 1.0);
  return gossip_from_matrix(std::move(w));
}

/// (I + P) / 2. Maps every eigenvalue l to (1 + l) / 2, so the result is PSD
/// whenever P is doubly stochastic; used to enforce the PSD requirement that
/// max-degree weights can violate (e.g. the 4-cycle has eigenvalue -1/3).
inline GossipMatrix lazify(const GossipMatrix& p) {
  const int n = p.n();
  Eigen::MatrixXd w = (Eigen::MatrixXd::Identity(n, n) + p.w) / 2.0;
  return gossip_from_matrix(std::move(w), /*psd_flag=*/true);
}

}  // namespace doco
