#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <unordered_map>
#include <utility>
#include <vector>

#include "doco/compress.hpp"
#include "doco/error.hpp"
#include "doco/rng.hpp"
#include "doco/topology.hpp"

namespace doco {

/// Reference Choco-gossip engine. Each learner i keeps its decision x_i and a
/// literal copy of the replica x_hat_j for every j it can hear (neighbors plus
/// itself), so replica consistency is observable rather than assumed.
struct NaiveGossipState {
  int n = 0, d = 0;
  std::vector<Eigen::VectorXd> x;
  // replicas[i][j] = learner i's copy of x_hat_j, j in N_i union {i}
  std::vector<std::unordered_map<int, Eigen::VectorXd>> replicas;
};

/// Memory-lean engine: per learner only x_i, its own replica x_hat_i, and the
/// running weighted replica sum s_i = sum_j P_ij x_hat_j.
struct EfficientGossipState {
  int n = 0, d = 0;
  std::vector<Eigen::VectorXd> x, xhat, s;
};

namespace detail {
inline std::vector<std::vector<int>> support_sets(const GossipMatrix& P) {
  const int n = P.n();
  std::vector<std::vector<int>> nbr(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i == j || P.w(i, j) != 0.0) nbr[i].push_back(j);
  return nbr;
}
}  // namespace detail

inline NaiveGossipState make_naive_state(const GossipMatrix& P,
                                         const std::vector<Eigen::VectorXd>& x0) {
  if (static_cast<int>(x0.size()) != P.n()) fail("invalid-size", "x0 size mismatch");
  NaiveGossipState st;
  st.n = P.n();
  st.d = static_cast<int>(x0[0].size());
  st.x = x0;
  st.replicas.resize(st.n);
  auto nbr = detail::support_sets(P);
  for (int i = 0; i < st.n; ++i)
    for (int j : nbr[i]) st.replicas[i][j] = Eigen::VectorXd::Zero(st.d);
  return st;
}

inline EfficientGossipState make_efficient_state(const GossipMatrix& P,
                                                 const std::vector<Eigen::VectorXd>& x0) {
  if (static_cast<int>(x0.size()) != P.n()) fail("invalid-size", "x0 size mismatch");
  EfficientGossipState st;
  st.n = P.n();
  st.d = static_cast<int>(x0[0].size());
  st.x = x0;
  st.xhat.assign(st.n, Eigen::VectorXd::Zero(st.d));
  st.s.assign(st.n, Eigen::VectorXd::Zero(st.d));
  return st;
}

/// One synchronous Choco-gossip round on the naive state:
///   x_i <- x_i + gamma sum_j P_ij (x_hat_j - x_hat_i)
///   q_i = C(x_i_new - x_hat_i); every holder of x_hat_i applies q_i.
/// Returns the per-learner broadcast payloads (one charged message each).
/// The per-learner randomness is the stream (seed, "gossip", learner, step),
/// shared with the efficient engine so trajectories match bit-for-bit in law.
inline std::vector<CompressedPayload> choco_step(NaiveGossipState& st, const GossipMatrix& P,
                                                 double gamma, const CompressorKind& kind,
                                                 std::uint64_t seed, std::uint64_t step) {
  if (!(gamma > 0.0 && gamma <= 1.0)) fail("invalid-step-size", "gamma must lie in (0,1]");
  if (P.n() != st.n) fail("invalid-size", "matrix/state mismatch");
  std::vector<Eigen::VectorXd> x_new(st.n);
  for (int i = 0; i < st.n; ++i) {
    Eigen::VectorXd mix = Eigen::VectorXd::Zero(st.d);
    const Eigen::VectorXd& own = st.replicas[i].at(i);
    for (const auto& [j, rep] : st.replicas[i]) mix += P.w(i, j) * (rep - own);
    x_new[i] = st.x[i] + gamma * mix;
  }
  std::vector<CompressedPayload> msgs(st.n);
  for (int i = 0; i < st.n; ++i) {
    rng::Stream s = rng::Stream::derive(seed, "gossip", static_cast<std::uint64_t>(i), step);
    msgs[i] = compress(kind, x_new[i] - st.replicas[i].at(i), s);
  }
  for (int i = 0; i < st.n; ++i) {
    for (int h = 0; h < st.n; ++h) {
      auto it = st.replicas[h].find(i);
      if (it != st.replicas[h].end()) it->second += msgs[i].dense_equiv;
    }
  }
  st.x = std::move(x_new);
  return msgs;
}

/// Same round on the efficient state:
///   x_i <- x_i + gamma (s_i - x_hat_i); q_i = C(x_i_new - x_hat_i);
///   x_hat_i += q_i; s_i += sum_j P_ij q_j.
inline std::vector<CompressedPayload> choco_step_efficient(EfficientGossipState& st,
                                                           const GossipMatrix& P, double gamma,
                                                           const CompressorKind& kind,
                                                           std::uint64_t seed, std::uint64_t step) {
  if (!(gamma > 0.0 && gamma <= 1.0)) fail("invalid-step-size", "gamma must lie in (0,1]");
  if (P.n() != st.n) fail("invalid-size", "matrix/state mismatch");
  for (int i = 0; i < st.n; ++i) st.x[i] += gamma * (st.s[i] - st.xhat[i]);
  std::vector<CompressedPayload> msgs(st.n);
  for (int i = 0; i < st.n; ++i) {
    rng::Stream s = rng::Stream::derive(seed, "gossip", static_cast<std::uint64_t>(i), step);
    msgs[i] = compress(kind, st.x[i] - st.xhat[i], s);
  }
  for (int i = 0; i < st.n; ++i) st.xhat[i] += msgs[i].dense_equiv;
  for (int i = 0; i < st.n; ++i) {
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(st.d);
    for (int j = 0; j < st.n; ++j) {
      double w = P.w(i, j);
      if (w != 0.0) acc += w * msgs[j].dense_equiv;
    }
    st.s[i] += acc;
  }
  return msgs;
}

struct ConsensusError {
  double e_consensus = 0.0;    // sum_i ||x_i - mean||^2
  double e_compression = 0.0;  // sum_i ||x_i - x_hat_i||^2
  double total() const { return e_consensus + e_compression; }
};

inline ConsensusError consensus_error(const std::vector<Eigen::VectorXd>& x,
                                      const std::vector<Eigen::VectorXd>& xhat) {
  if (x.empty() || x.size() != xhat.size()) fail("invalid-size", "consensus_error input mismatch");
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(x[0].size());
  for (const auto& xi : x) mean += xi;
  mean /= static_cast<double>(x.size());
  ConsensusError e;
  for (std::size_t i = 0; i < x.size(); ++i) {
    e.e_consensus += (x[i] - mean).squaredNorm();
    e.e_compression += (x[i] - xhat[i]).squaredNorm();
  }
  return e;
}

inline ConsensusError consensus_error(const NaiveGossipState& st) {
  std::vector<Eigen::VectorXd> xhat(st.n);
  for (int i = 0; i < st.n; ++i) xhat[i] = st.replicas[i].at(i);
  return consensus_error(st.x, xhat);
}

inline ConsensusError consensus_error(const EfficientGossipState& st) {
  return consensus_error(st.x, st.xhat);
}

}  // namespace doco
