#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "doco/algorithms.hpp"
#include "doco/config.hpp"

namespace doco {

struct ExperimentConfig {
  // network
  TopologyKind topology = TopologyKind::cycle;
  int n = 4;
  bool lazify = true;
  // compression
  CompressorKind compressor = CompressorKind::identity();
  // domain
  std::string domain_variant = "ball";
  double domain_R = 1.0;        // ball radius or box half width
  // loss
  std::string loss_kind = "linear_adversarial";
  int d = 2;
  double G = 1.0;
  double mu = 1.0;
  double D_target = 1.0;  // target scale of the quadratic streams
  double p = 0.5;
  // run
  std::string algorithm = "top_dogd";
  long T = 64;
  std::vector<std::uint64_t> seeds = {1};
  GossipEngine engine = GossipEngine::efficient;
  std::string bytes_mode = "realized";  // realized | expected
  std::string out;
  long stride = 1;
  bool keep_rows = false;
  // hyperparameter overrides, logged into the output header
  std::optional<long> L1_override, L2_override;
  std::optional<double> gamma_override, eta_override, eps_override;
  bool ablate_L2 = false;

  Domain make_domain() const {
    if (domain_variant == "ball") return Domain::ball(d, domain_R);
    if (domain_variant == "box") return Domain::box(d, domain_R);
    fail("invalid-domain", "unknown domain variant: " + domain_variant);
  }
};

inline ExperimentConfig load_experiment(const Config& cfg) {
  ExperimentConfig e;
  e.topology = topology_from_string(cfg.get_or<std::string>("network", "topology", "cycle"));
  e.n = static_cast<int>(cfg.get_or<long>("network", "n", 4));
  e.lazify = cfg.get_or<bool>("network", "lazify", true);

  std::string cv = cfg.get_or<std::string>("compressor", "variant", "identity");
  if (cv == "identity")
    e.compressor = CompressorKind::identity();
  else if (cv == "rand_k")
    e.compressor = CompressorKind::rand_k(static_cast<int>(cfg.get<long>("compressor", "k")));
  else if (cv == "top_k")
    e.compressor = CompressorKind::top_k(static_cast<int>(cfg.get<long>("compressor", "k")));
  else if (cv == "randomized_gossip")
    e.compressor = CompressorKind::randomized_gossip(cfg.get<double>("compressor", "p"));
  else if (cv == "rescaled_unbiased")
    e.compressor = CompressorKind::rescaled_unbiased(cfg.get<double>("compressor", "tau"));
  else
    fail("invalid-compressor", "unknown compressor variant: " + cv);

  e.domain_variant = cfg.get_or<std::string>("domain", "variant", "ball");
  e.domain_R = cfg.get_or<double>("domain", "R", 1.0);

  e.loss_kind = cfg.get_or<std::string>("loss", "kind", "linear_adversarial");
  e.d = static_cast<int>(cfg.get_or<long>("loss", "d", 2));
  e.G = cfg.get_or<double>("loss", "G", 1.0);
  e.mu = cfg.get_or<double>("loss", "mu", 1.0);
  e.D_target = cfg.get_or<double>("loss", "D", 1.0);
  e.p = cfg.get_or<double>("loss", "p", 0.5);

  e.algorithm = cfg.get_or<std::string>("run", "algorithm", "top_dogd");
  e.T = cfg.get_or<long>("run", "T", 64);
  if (cfg.has("run", "seeds")) {
    e.seeds.clear();
    for (long s : cfg.get<std::vector<long>>("run", "seeds"))
      e.seeds.push_back(static_cast<std::uint64_t>(s));
  }
  std::string eng = cfg.get_or<std::string>("run", "gossip_engine", "efficient");
  if (eng == "naive")
    e.engine = GossipEngine::naive;
  else if (eng == "efficient")
    e.engine = GossipEngine::efficient;
  else
    fail("invalid-parameter", "unknown gossip engine: " + eng);
  e.bytes_mode = cfg.get_or<std::string>("run", "bytes_mode", "realized");
  if (e.bytes_mode != "realized" && e.bytes_mode != "expected")
    fail("invalid-parameter", "bytes_mode must be realized or expected");
  e.out = cfg.get_or<std::string>("run", "out", "");
  e.stride = cfg.get_or<long>("run", "stride", 1);

  if (cfg.has("overrides", "L1")) e.L1_override = cfg.get<long>("overrides", "L1");
  if (cfg.has("overrides", "L2")) e.L2_override = cfg.get<long>("overrides", "L2");
  if (cfg.has("overrides", "gamma")) e.gamma_override = cfg.get<double>("overrides", "gamma");
  if (cfg.has("overrides", "eta")) e.eta_override = cfg.get<double>("overrides", "eta");
  if (cfg.has("overrides", "eps")) e.eps_override = cfg.get<double>("overrides", "eps");
  e.ablate_L2 = cfg.get_or<bool>("overrides", "ablate_L2", false);
  return e;
}

inline std::shared_ptr<LossStream> make_stream(const ExperimentConfig& cfg, std::uint64_t seed) {
  double omega = omega_of(cfg.compressor, cfg.d);
  if (cfg.loss_kind == "linear_adversarial")
    return std::make_shared<LinearAdversarialStream>(cfg.n, cfg.d, cfg.T, cfg.G, seed);
  if (cfg.loss_kind == "quadratic")
    return std::make_shared<QuadraticStream>(cfg.n, cfg.d, cfg.T, cfg.mu, cfg.D_target, seed);
  if (cfg.loss_kind == "lower_bound_convex")
    return std::make_shared<LowerBoundConvexStream>(cfg.n, cfg.d, cfg.T, cfg.G, omega, seed);
  if (cfg.loss_kind == "lower_bound_sc")
    return std::make_shared<LowerBoundScStream>(cfg.n, cfg.d, cfg.T, cfg.mu, cfg.D_target, omega,
                                                cfg.p, seed);
  fail("invalid-parameter", "unknown loss kind: " + cfg.loss_kind);
}

inline AlgoMode algo_mode(const ExperimentConfig& cfg, const LossStream& stream) {
  bool sc = stream.loss_class() == LossClass::strongly_convex;
  if (cfg.algorithm == "top_dobd1") return sc ? AlgoMode::bandit1_sc : AlgoMode::bandit1_convex;
  if (cfg.algorithm == "top_dobd2") return sc ? AlgoMode::bandit2_sc : AlgoMode::bandit2_convex;
  return sc ? AlgoMode::strongly_convex : AlgoMode::convex;
}

/// Analysis-formula hyperparameters with overrides applied before the T >= L
/// feasibility check, so an override can rescue a horizon the defaults reject.
inline HyperParams experiment_hyperparams(const ExperimentConfig& cfg, const GossipMatrix& P,
                                          const LossStream& stream, const Domain& dom,
                                          AlgoMode mode) {
  double omega = omega_of(cfg.compressor, cfg.d);
  HyperParams hp;
  hp.gamma = cfg.gamma_override ? *cfg.gamma_override
                                : consensus_step_size(omega, P.rho, P.beta);
  hp.L1 = cfg.L1_override
              ? *cfg.L1_override
              : static_cast<long>(std::ceil(2.0 * std::log(14.0 * cfg.n) / (hp.gamma * P.rho)));
  if (cfg.ablate_L2)
    hp.L2 = 0;
  else
    hp.L2 = cfg.L2_override ? *cfg.L2_override
                            : static_cast<long>(std::ceil(std::log(8.0 * cfg.n) / omega));
  if (hp.L1 < 1) fail("invalid-parameter", "L1 must be >= 1");
  if (hp.L2 < 0) fail("invalid-parameter", "L2 must be >= 0");
  if (cfg.algorithm == "top_dogd" || cfg.algorithm == "top_dobd1" || cfg.algorithm == "top_dobd2")
    if (cfg.T < hp.L()) fail("horizon-too-short", "T must be at least L1 + L2");

  long L_sched = (cfg.algorithm == "dc_dogd" || cfg.algorithm == "d_ogd") ? 1 : hp.L();
  switch (mode) {
    case AlgoMode::convex:
      hp.eta = EtaSchedule::constant(dom.diameter() /
                                     (stream.G() * std::sqrt(static_cast<double>(L_sched) * cfg.T)));
      break;
    case AlgoMode::strongly_convex:
    case AlgoMode::bandit1_sc:
    case AlgoMode::bandit2_sc:
      hp.eta = EtaSchedule::strongly_convex(stream.mu());
      break;
    default:
      break;
  }
  if (is_bandit(mode)) {
    finalize_bandit(hp, mode, cfg.d, stream.G(), cfg.T, dom.inner_radius(), dom.outer_radius());
    if (cfg.eps_override) {
      hp.eps = *cfg.eps_override;
      if (!(hp.eps > 0.0) || hp.eps >= dom.inner_radius())
        fail("invalid-exploration", "eps override must lie in (0, r)");
      hp.zeta = hp.eps / dom.inner_radius();
    }
  }
  if (cfg.eta_override) hp.eta = EtaSchedule::constant(*cfg.eta_override);
  return hp;
}

struct CsvRow {
  long t = 0, b = 0;
  int learner = 0;
  double loss = 0, cum_regret = 0, cum_bytes = 0;
  double e_consensus = 0, e_compression = 0, r_norm = 0;
};

struct SeedResult {
  std::uint64_t seed = 0;
  std::vector<double> final_regret;  // per learner
  std::vector<double> final_bytes;   // per learner
  Eigen::VectorXd comparator;
  std::vector<CsvRow> rows;  // strided; kept only when requested
};

struct ExperimentResult {
  std::vector<SeedResult> seeds;
  std::string csv;  // built when an output path is set or rows are kept

  double mean_final_regret() const {
    double s = 0.0;
    long cnt = 0;
    for (const auto& sr : seeds)
      for (double r : sr.final_regret) {
        s += r;
        ++cnt;
      }
    return s / cnt;
  }
};

namespace detail {
inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}
}  // namespace detail

inline GossipMatrix experiment_matrix(const ExperimentConfig& cfg) {
  Graph g = build_topology(cfg.topology, cfg.n);
  GossipMatrix P = max_degree_weights(g);
  if (cfg.lazify) P = lazify(P);
  return P;
}

inline void validate_experiment(const ExperimentConfig& cfg) {
  if (cfg.T < 1) fail("invalid-parameter", "T must be >= 1");
  if (cfg.stride < 1) fail("invalid-parameter", "stride must be >= 1");
  if (cfg.seeds.empty()) fail("invalid-parameter", "need at least one seed");
  bool bandit = cfg.algorithm == "top_dobd1" || cfg.algorithm == "top_dobd2";
  if (bandit && !(cfg.make_domain().inner_radius() > 0.0))
    fail("invalid-domain", "bandit algorithms need a domain with positive inner radius");
  if (cfg.loss_kind == "lower_bound_convex" || cfg.loss_kind == "lower_bound_sc") {
    if (cfg.topology != TopologyKind::cycle)
      fail("invalid-construction", "hard-instance losses require the cycle topology");
    if (cfg.compressor.variant != CompressorVariant::randomized_gossip)
      fail("invalid-construction", "hard-instance losses require the randomized_gossip compressor");
  }
  if (cfg.algorithm != "top_dogd" && cfg.algorithm != "dc_dogd" && cfg.algorithm != "d_ogd" &&
      cfg.algorithm != "top_dobd1" && cfg.algorithm != "top_dobd2")
    fail("invalid-parameter", "unknown algorithm: " + cfg.algorithm);
}

/// Runs the configured algorithm once per seed, accumulating per-learner
/// regret against the best fixed comparator and the communication ledger,
/// optionally emitting strided CSV records.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  validate_experiment(cfg);
  const Domain dom = cfg.make_domain();
  const GossipMatrix P = experiment_matrix(cfg);
  const bool want_csv = cfg.keep_rows || !cfg.out.empty();

  ExperimentResult result;
  if (want_csv)
    result.csv =
        "run_id,seed,algo,t,b,learner,loss,cum_regret,cum_bytes,e_consensus,e_compression,"
        "proj_residual_norm\n";

  for (std::uint64_t seed : cfg.seeds) {
    auto stream = make_stream(cfg, seed);
    AlgoMode mode = algo_mode(cfg, *stream);
    HyperParams hp = experiment_hyperparams(cfg, P, *stream, dom, mode);

    Eigen::VectorXd comparator = best_fixed_comparator(*stream, dom);
    SeedResult sr;
    sr.seed = seed;
    sr.comparator = comparator;
    sr.final_regret.assign(cfg.n, 0.0);
    sr.final_bytes.assign(cfg.n, 0.0);
    const std::string run_id = cfg.algorithm + "-s" + std::to_string(seed);
    const double expected_msg = expected_payload_bytes(cfg.compressor, cfg.d);
    const bool expected_mode = cfg.bytes_mode == "expected";

    RoundSink sink = [&](const RoundInfo& info) {
      auto gl = stream->global_loss(info.t);
      double comp_loss = gl(comparator);
      for (int i = 0; i < cfg.n; ++i) {
        double play_loss = 0.0;
        for (const auto& q : info.plays[i]) play_loss += gl(q);
        play_loss /= static_cast<double>(info.plays[i].size());
        sr.final_regret[i] += play_loss - comp_loss;
        double charge = static_cast<double>(info.bytes[i]);
        if (expected_mode && info.bytes[i] > 0) charge = expected_msg;
        if (cfg.algorithm == "d_ogd") charge = static_cast<double>(info.bytes[i]);
        sr.final_bytes[i] += charge;
        if (want_csv && (info.t % cfg.stride == 0 || info.t == cfg.T)) {
          CsvRow row{info.t,
                     info.b,
                     i,
                     play_loss,
                     sr.final_regret[i],
                     sr.final_bytes[i],
                     info.e_consensus,
                     info.e_compression,
                     info.r_norms[i]};
          if (cfg.keep_rows) sr.rows.push_back(row);
          result.csv += run_id;
          result.csv += ',';
          result.csv += std::to_string(seed);
          result.csv += ',';
          result.csv += cfg.algorithm;
          result.csv += ',';
          result.csv += std::to_string(row.t);
          result.csv += ',';
          result.csv += std::to_string(row.b);
          result.csv += ',';
          result.csv += std::to_string(row.learner);
          result.csv += ',';
          result.csv += detail::fmt17(row.loss);
          result.csv += ',';
          result.csv += detail::fmt17(row.cum_regret);
          result.csv += ',';
          result.csv += detail::fmt17(row.cum_bytes);
          result.csv += ',';
          result.csv += detail::fmt17(row.e_consensus);
          result.csv += ',';
          result.csv += detail::fmt17(row.e_compression);
          result.csv += ',';
          result.csv += detail::fmt17(row.r_norm);
          result.csv += '\n';
        }
      }
    };

    if (cfg.algorithm == "top_dogd") {
      top_dogd_run(*stream, P, dom, hp, cfg.compressor, cfg.engine, cfg.T, seed, sink);
    } else if (cfg.algorithm == "top_dobd1" || cfg.algorithm == "top_dobd2") {
      BanditFeedback fb = cfg.algorithm == "top_dobd1" ? BanditFeedback::one_point
                                                       : BanditFeedback::two_point;
      top_dobd_run(*stream, P, dom, hp, cfg.compressor, cfg.engine, cfg.T, seed, fb, sink);
    } else if (cfg.algorithm == "dc_dogd") {
      dc_dogd_run(*stream, P, dom, hp.gamma, hp.eta, cfg.compressor, cfg.T, seed, sink);
    } else {
      d_ogd_run(*stream, P, dom, hp.eta, cfg.T, seed, sink);
    }
    result.seeds.push_back(std::move(sr));
  }

  if (!cfg.out.empty()) {
    std::ofstream out(cfg.out, std::ios::binary);
    if (!out) fail("io-error", "cannot open output file: " + cfg.out);
    out << result.csv;
  }
  return result;
}

/// Least-squares slope of log(y) against log(x).
inline double fit_loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 2) fail("invalid-sweep", "need at least two points");
  double mx = 0, my = 0;
  const int k = static_cast<int>(xs.size());
  std::vector<double> lx(k), ly(k);
  for (int i = 0; i < k; ++i) {
    if (!(xs[i] > 0.0) || !(ys[i] > 0.0)) fail("invalid-sweep", "log-log fit needs positive data");
    lx[i] = std::log(xs[i]);
    ly[i] = std::log(ys[i]);
    mx += lx[i];
    my += ly[i];
  }
  mx /= k;
  my /= k;
  double num = 0, den = 0;
  for (int i = 0; i < k; ++i) {
    num += (lx[i] - mx) * (ly[i] - my);
    den += (lx[i] - mx) * (lx[i] - mx);
  }
  return num / den;
}

struct SweepResult {
  std::vector<long> horizons;
  std::vector<double> mean_final_regret;  // averaged over seeds and learners
  double slope = 0.0;                     // log-log fit
};

inline SweepResult scaling_sweep(const ExperimentConfig& base, const std::vector<long>& horizons) {
  if (horizons.size() < 2) fail("invalid-sweep", "need at least two horizons");
  SweepResult sw;
  sw.horizons = horizons;
  for (long T : horizons) {
    ExperimentConfig cfg = base;
    cfg.T = T;
    cfg.out.clear();
    cfg.keep_rows = false;
    cfg.stride = T;  // regret accumulates every round regardless of stride
    sw.mean_final_regret.push_back(run_experiment(cfg).mean_final_regret());
  }
  std::vector<double> xs(horizons.begin(), horizons.end());
  sw.slope = fit_loglog_slope(xs, sw.mean_final_regret);
  return sw;
}

/// Empirical mean number of gossip rounds for one message to travel
/// ceil(m/2) hops on the cycle when each hop succeeds with probability omega
/// per round (geometric hop delays).
inline double delay_probe(int n, double omega, long trials, std::uint64_t seed) {
  if (n < 4 || n % 2 != 0) fail("invalid-construction", "delay probe needs even n >= 4");
  if (!(omega > 0.0 && omega <= 1.0)) fail("invalid-parameter", "omega must lie in (0,1]");
  if (trials < 1) fail("invalid-parameter", "trials must be >= 1");
  const int m = (n - 2) / 2;
  const int hops = (m + 1) / 2;
  double total = 0.0;
  for (long tr = 0; tr < trials; ++tr) {
    rng::Stream s = rng::Stream::derive(seed, "delay-probe", static_cast<std::uint64_t>(tr));
    for (int h = 0; h < hops; ++h) {
      long rounds = 1;
      while (s.uniform() >= omega) ++rounds;
      total += static_cast<double>(rounds);
    }
  }
  return total / static_cast<double>(trials);
}

}  // namespace doco
