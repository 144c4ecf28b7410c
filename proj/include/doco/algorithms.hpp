#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "doco/adversary.hpp"
#include "doco/compress.hpp"
#include "doco/error.hpp"
#include "doco/geometry.hpp"
#include "doco/gossip.hpp"
#include "doco/rng.hpp"
#include "doco/topology.hpp"

namespace doco {

enum class GossipEngine { naive, efficient };

struct EtaSchedule {
  enum class Kind { constant, strongly_convex } kind = Kind::constant;
  double eta = 0.0;  // constant
  double mu = 0.0;   // strongly convex

  static EtaSchedule constant(double eta) { return {Kind::constant, eta, 0.0}; }
  static EtaSchedule strongly_convex(double mu) {
    if (!(mu > 0.0)) fail("invalid-parameter", "strongly convex schedule needs mu > 0");
    return {Kind::strongly_convex, 0.0, mu};
  }
  // eta_b = 1/(mu (bL + 8)) in the strongly convex case.
  double at_block(long b, long L) const {
    if (kind == Kind::constant) return eta;
    return 1.0 / (mu * (static_cast<double>(b) * L + 8.0));
  }
};

struct HyperParams {
  long L1 = 1, L2 = 1;
  double gamma = 0.0;
  EtaSchedule eta;
  double eps = 0.0, zeta = 0.0;  // bandit only
  long L() const { return L1 + L2; }
};

enum class AlgoMode {
  convex,
  strongly_convex,
  bandit1_convex,
  bandit1_sc,
  bandit2_convex,
  bandit2_sc
};

inline bool is_bandit(AlgoMode m) {
  return m != AlgoMode::convex && m != AlgoMode::strongly_convex;
}

/// gamma = omega rho / (2 rho beta^2 + 4 beta^2 + (2 - omega)(beta^2 + 2 beta) rho + rho^2)
inline double consensus_step_size(double omega, double rho, double beta) {
  if (!(omega > 0.0 && omega <= 1.0)) fail("invalid-parameter", "omega must lie in (0,1]");
  if (!(rho > 0.0 && rho <= 1.0)) fail("invalid-parameter", "rho must lie in (0,1]");
  if (!(beta >= 0.0 && beta <= 2.0)) fail("invalid-parameter", "beta must lie in [0,2]");
  double den = 2.0 * rho * beta * beta + 4.0 * beta * beta +
               (2.0 - omega) * (beta * beta + 2.0 * beta) * rho + rho * rho;
  return omega * rho / den;
}

/// Theory-prescribed hyperparameters. r and R are the inner and outer radii
/// of the feasible set, D its diameter, mu the strong convexity modulus
/// (ignored in convex modes).
inline HyperParams derive_hyperparams(int n, double omega, double rho, double beta, AlgoMode mode,
                                      double G, double D, double mu, long T, double r, double R) {
  HyperParams hp;
  hp.gamma = consensus_step_size(omega, rho, beta);
  hp.L1 = static_cast<long>(std::ceil(2.0 * std::log(14.0 * n) / (hp.gamma * rho)));
  hp.L2 = static_cast<long>(std::ceil(std::log(8.0 * n) / omega));
  const long L = hp.L();
  if (T < L) fail("horizon-too-short", "T must be at least L1 + L2");
  const double dl = static_cast<double>(L);
  const double dt = static_cast<double>(T);

  if (is_bandit(mode)) {
    if (!(r > 0.0)) fail("invalid-domain", "bandit modes need a domain with positive inner radius");
    // d is unknown here; callers wanting bandit eps pass it via finalize_bandit.
  }
  switch (mode) {
    case AlgoMode::convex:
      hp.eta = EtaSchedule::constant(D / (G * std::sqrt(dl * dt)));
      break;
    case AlgoMode::strongly_convex:
    case AlgoMode::bandit1_sc:
    case AlgoMode::bandit2_sc:
      hp.eta = EtaSchedule::strongly_convex(mu);
      break;
    default:
      break;  // bandit convex eta depends on eps; set in finalize_bandit
  }
  (void)R;
  return hp;
}

/// Fill in eps, zeta, and the convex-mode eta for the bandit variants. eps is
/// the prescribed value with its free constant scaled so eps <= r strictly;
/// zeta = eps / r keeps every perturbed play feasible.
inline void finalize_bandit(HyperParams& hp, AlgoMode mode, int d, double G, long T, double r,
                            double R) {
  if (!is_bandit(mode)) return;
  if (!(r > 0.0)) fail("invalid-domain", "bandit modes need a domain with positive inner radius");
  const double dl = static_cast<double>(hp.L());
  const double dt = static_cast<double>(T);
  const double dd = static_cast<double>(d);
  double eps_c1 = 0.0;
  switch (mode) {
    case AlgoMode::bandit1_convex:
      eps_c1 = std::sqrt(dd) * std::pow(dl, 0.25) * std::pow(dt, -0.25);
      break;
    case AlgoMode::bandit1_sc:
      eps_c1 = std::pow(dd, 2.0 / 3.0) * std::cbrt(dl) * std::cbrt(std::log(dt + 8.0) / dt);
      break;
    case AlgoMode::bandit2_convex:
      eps_c1 = 1.0 / std::sqrt(dt);
      break;
    case AlgoMode::bandit2_sc:
      eps_c1 = std::log(dt) / dt;
      break;
    default:
      return;
  }
  if (!(eps_c1 > 0.0)) fail("invalid-exploration", "prescribed eps is not positive");
  const double r_cap = r * (1.0 - 1e-9);  // zeta = eps/r must stay below 1
  hp.eps = std::min(eps_c1, r_cap);
  hp.zeta = hp.eps / r;
  if (mode == AlgoMode::bandit1_convex)
    hp.eta = EtaSchedule::constant(R * hp.eps / (dd * std::sqrt(dl * dt)));
  else if (mode == AlgoMode::bandit2_convex)
    hp.eta = EtaSchedule::constant(R / (dd * G * std::sqrt(dl * dt)));
}

enum class BanditFeedback { none, one_point, two_point };

/// Everything the harness needs to account for one synchronous round.
struct RoundInfo {
  long t = 0;  // 1-based round index
  long b = 0;  // block index (equals t for the per-round algorithms)
  // plays[i]: points learner i actually queried this round (1, or 2 for the
  // two-point bandit). For full-information runs this is the committed
  // decision.
  std::vector<std::vector<Eigen::VectorXd>> plays;
  std::vector<std::uint64_t> bytes;  // charged message cost per learner
  double e_consensus = 0.0, e_compression = 0.0;
  std::vector<double> r_norms;  // current projection residual, 0 outside compensation
};
using RoundSink = std::function<void(const RoundInfo&)>;

struct RunResult {
  std::vector<Eigen::VectorXd> x, xhat;    // committed decision and its replica
  std::vector<Eigen::VectorXd> z;          // last completed block's gradient sum
  std::vector<Eigen::VectorXd> y_last;     // surrogate after the last gossip sub-block
  std::vector<Eigen::VectorXd> r_last;     // last projection residual
  std::uint64_t total_bytes = 0;
};

namespace detail {

inline std::vector<Eigen::VectorXd> zeros(int n, int d) {
  return std::vector<Eigen::VectorXd>(n, Eigen::VectorXd::Zero(d));
}

struct TopRunner {
  const LossStream& stream;
  const GossipMatrix& P;
  const Domain& dom_full;   // where plays must land
  Domain dom_proj;          // projection target (shrunken for bandits)
  const HyperParams& hp;
  CompressorKind kind;
  GossipEngine engine;
  long T;
  std::uint64_t seed;
  BanditFeedback feedback;
  const RoundSink& sink;

  int n, d;
  long t = 0;
  std::uint64_t total_bytes = 0;
  std::vector<Eigen::VectorXd> x, xhat, z_prev, z_cur, r, rc;

  bool done() const { return t >= T; }

  // One played round: queries the losses at the block decision (perturbed for
  // bandits), accumulates the (estimated) block gradient, and reports to the
  // sink together with this round's charged messages.
  void play_round(long b, const std::vector<CompressedPayload>* msgs, bool in_compensation) {
    ++t;
    RoundInfo info;
    info.t = t;
    info.b = b;
    info.plays.resize(n);
    info.bytes.assign(n, 0);
    info.r_norms.assign(n, 0.0);
    for (int i = 0; i < n; ++i) {
      if (feedback == BanditFeedback::none) {
        z_cur[i] += stream.grad(t, i, x[i]);
        info.plays[i].push_back(x[i]);
      } else {
        rng::Stream s = rng::Stream::derive(seed, "bandit-u", static_cast<std::uint64_t>(i),
                                            static_cast<std::uint64_t>(t));
        GradientEstimate est =
            feedback == BanditFeedback::one_point
                ? one_point_estimate(stream, t, i, x[i], hp.eps, dom_full, s)
                : two_point_estimate(stream, t, i, x[i], hp.eps, dom_full, s);
        z_cur[i] += est.ghat;
        info.plays[i] = std::move(est.queries);
      }
      if (msgs) {
        info.bytes[i] = (*msgs)[i].wire_bytes;
        total_bytes += (*msgs)[i].wire_bytes;
      }
      if (in_compensation) info.r_norms[i] = r[i].norm();
    }
    ConsensusError e = consensus_error(x, xhat);
    info.e_consensus = e.e_consensus;
    info.e_compression = e.e_compression;
    if (sink) sink(info);
  }

  RunResult run() {
    n = P.n();
    d = stream.d();
    x = zeros(n, d);
    xhat = zeros(n, d);
    z_prev = zeros(n, d);
    z_cur = zeros(n, d);
    r = zeros(n, d);
    rc = zeros(n, d);
    const long L = hp.L();

    // Block 1: play the origin, collect gradients, no communication.
    for (long k = 0; k < L && !done(); ++k) play_round(1, nullptr, false);
    std::swap(z_prev, z_cur);

    std::vector<Eigen::VectorXd> y_last = zeros(n, d);
    for (long b = 2; !done(); ++b) {
      double eta_b = hp.eta.at_block(b, L);
      std::vector<Eigen::VectorXd> y(n);
      for (int i = 0; i < n; ++i) y[i] = x[i] - eta_b * z_prev[i];
      for (int i = 0; i < n; ++i) z_cur[i].setZero();

      // Gossip sub-block: L1 Choco rounds on the surrogate y with replica
      // state yhat initialized from xhat.
      if (engine == GossipEngine::naive) {
        NaiveGossipState gs = make_naive_state(P, y);
        for (int i = 0; i < n; ++i)
          for (auto& [j, rep] : gs.replicas[i]) rep = xhat[j];
        for (long b1 = 0; b1 < hp.L1 && !done(); ++b1) {
          auto msgs = choco_step(gs, P, hp.gamma, kind, seed, static_cast<std::uint64_t>(t + 1));
          play_round(b, &msgs, false);
        }
        y = gs.x;
        for (int i = 0; i < n; ++i) xhat[i] = gs.replicas[i].at(i);
      } else {
        EfficientGossipState gs = make_efficient_state(P, y);
        gs.xhat = xhat;
        for (int i = 0; i < n; ++i) {
          gs.s[i].setZero();
          for (int j = 0; j < n; ++j)
            if (P.w(i, j) != 0.0) gs.s[i] += P.w(i, j) * xhat[j];
        }
        for (long b1 = 0; b1 < hp.L1 && !done(); ++b1) {
          auto msgs =
              choco_step_efficient(gs, P, hp.gamma, kind, seed, static_cast<std::uint64_t>(t + 1));
          play_round(b, &msgs, false);
        }
        y = gs.x;
        xhat = gs.xhat;
      }
      if (done()) {
        y_last = y;
        break;
      }
      // xhat above absorbed the gossip replica updates; the commit below adds
      // the compensated projection residual on top.
      y_last = y;

      // Compensation sub-block: repeated compression of the projection
      // residual, one message per round.
      for (int i = 0; i < n; ++i) {
        r[i] = project(dom_proj, y[i]) - y[i];
        rc[i].setZero();
      }
      bool truncated = false;
      for (long b2 = 0; b2 < hp.L2; ++b2) {
        std::vector<CompressedPayload> msgs(n);
        for (int i = 0; i < n; ++i) {
          rng::Stream s = rng::Stream::derive(seed, "compensate", static_cast<std::uint64_t>(i),
                                              static_cast<std::uint64_t>(t + 1));
          msgs[i] = compress(kind, r[i] - rc[i], s);
          rc[i] += msgs[i].dense_equiv;
        }
        play_round(b, &msgs, true);
        if (done()) {
          truncated = b2 + 1 < hp.L2;
          break;
        }
      }
      if (truncated) break;

      // Commit: replicas absorb the compensated residual, decisions project.
      for (int i = 0; i < n; ++i) {
        xhat[i] += rc[i];
        x[i] = project(dom_proj, y[i]);
      }
      std::swap(z_prev, z_cur);
      if (done()) break;
    }

    RunResult res;
    res.x = x;
    res.xhat = xhat;
    res.z = z_prev;
    res.y_last = y_last;
    res.r_last = r;
    res.total_bytes = total_bytes;
    return res;
  }
};

}  // namespace detail

/// Two-level blocked learner with compressed gossip and projection error
/// compensation. Full-information variant.
inline RunResult top_dogd_run(const LossStream& stream, const GossipMatrix& P, const Domain& dom,
                              const HyperParams& hp, const CompressorKind& kind,
                              GossipEngine engine, long T, std::uint64_t seed,
                              const RoundSink& sink = {}) {
  if (hp.L1 < 1) fail("invalid-parameter", "L1 must be >= 1");
  if (hp.L2 < 0) fail("invalid-parameter", "L2 must be >= 0");
  detail::TopRunner runner{stream, P,    dom,  dom, hp, kind, engine, T, seed,
                           BanditFeedback::none, sink};
  return runner.run();
}

/// Bandit variants: identical control flow, but plays are perturbed queries,
/// z accumulates the sphere-sampling gradient estimates, and projections
/// target the (1 - zeta)-shrunken domain.
inline RunResult top_dobd_run(const LossStream& stream, const GossipMatrix& P, const Domain& dom,
                              const HyperParams& hp, const CompressorKind& kind,
                              GossipEngine engine, long T, std::uint64_t seed,
                              BanditFeedback feedback, const RoundSink& sink = {}) {
  if (feedback == BanditFeedback::none) fail("invalid-parameter", "bandit run needs feedback mode");
  if (!(dom.inner_radius() > 0.0)) fail("invalid-domain", "bandit run needs inner radius > 0");
  if (!(hp.eps > 0.0) || hp.eps > dom.inner_radius())
    fail("invalid-exploration", "eps must lie in (0, r]");
  detail::TopRunner runner{stream, P, dom, shrink(dom, hp.zeta), hp, kind, engine, T, seed,
                           feedback, sink};
  return runner.run();
}

/// Per-round compressed baseline:
///   x_i(t+1) = proj(x_i - eta_t grad + gamma sum_j P_ij (xhat_j - xhat_i)),
///   xhat_i += C(x_i(t+1) - xhat_i).
inline RunResult dc_dogd_run(const LossStream& stream, const GossipMatrix& P, const Domain& dom,
                             double gamma, const EtaSchedule& eta, const CompressorKind& kind,
                             long T, std::uint64_t seed, const RoundSink& sink = {}) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) fail("invalid-step-size", "gamma must lie in [0,1]");
  const int n = P.n(), d = stream.d();
  auto x = detail::zeros(n, d);
  auto xhat = detail::zeros(n, d);
  std::uint64_t total_bytes = 0;
  for (long t = 1; t <= T; ++t) {
    RoundInfo info;
    info.t = t;
    info.b = t;
    info.plays.resize(n);
    info.bytes.assign(n, 0);
    info.r_norms.assign(n, 0.0);
    ConsensusError e = consensus_error(x, xhat);
    info.e_consensus = e.e_consensus;
    info.e_compression = e.e_compression;

    double eta_t = eta.at_block(t, 1);
    std::vector<Eigen::VectorXd> x_new(n);
    for (int i = 0; i < n; ++i) {
      info.plays[i].push_back(x[i]);
      Eigen::VectorXd mix = Eigen::VectorXd::Zero(d);
      for (int j = 0; j < n; ++j)
        if (P.w(i, j) != 0.0) mix += P.w(i, j) * (xhat[j] - xhat[i]);
      x_new[i] = project(dom, x[i] - eta_t * stream.grad(t, i, x[i]) + gamma * mix);
    }
    for (int i = 0; i < n; ++i) {
      rng::Stream s = rng::Stream::derive(seed, "gossip", static_cast<std::uint64_t>(i),
                                          static_cast<std::uint64_t>(t));
      CompressedPayload q = compress(kind, x_new[i] - xhat[i], s);
      xhat[i] += q.dense_equiv;
      info.bytes[i] = q.wire_bytes;
      total_bytes += q.wire_bytes;
    }
    x = std::move(x_new);
    if (sink) sink(info);
  }
  RunResult res;
  res.x = x;
  res.xhat = xhat;
  res.total_bytes = total_bytes;
  return res;
}

/// Uncompressed baseline: x_i(t+1) = proj(sum_j P_ij x_j(t) - eta_t grad).
/// Charges a full dense vector (8d bytes) per learner per round.
inline RunResult d_ogd_run(const LossStream& stream, const GossipMatrix& P, const Domain& dom,
                           const EtaSchedule& eta, long T, std::uint64_t seed,
                           const RoundSink& sink = {}) {
  (void)seed;
  const int n = P.n(), d = stream.d();
  auto x = detail::zeros(n, d);
  std::uint64_t total_bytes = 0;
  const std::uint64_t per_msg = 8ull * static_cast<std::uint64_t>(d);
  for (long t = 1; t <= T; ++t) {
    RoundInfo info;
    info.t = t;
    info.b = t;
    info.plays.resize(n);
    info.bytes.assign(n, per_msg);
    info.r_norms.assign(n, 0.0);
    ConsensusError e = consensus_error(x, x);
    info.e_consensus = e.e_consensus;
    info.e_compression = 0.0;

    double eta_t = eta.at_block(t, 1);
    std::vector<Eigen::VectorXd> x_new(n);
    for (int i = 0; i < n; ++i) {
      info.plays[i].push_back(x[i]);
      Eigen::VectorXd mix = Eigen::VectorXd::Zero(d);
      for (int j = 0; j < n; ++j)
        if (P.w(i, j) != 0.0) mix += P.w(i, j) * x[j];
      x_new[i] = project(dom, mix - eta_t * stream.grad(t, i, x[i]));
      total_bytes += per_msg;
    }
    x = std::move(x_new);
    if (sink) sink(info);
  }
  RunResult res;
  res.x = x;
  res.xhat = x;
  res.total_bytes = total_bytes;
  return res;
}

}  // namespace doco
