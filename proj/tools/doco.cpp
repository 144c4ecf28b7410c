// Command line front end for the simulation library: seeded experiment runs,
// horizon sweeps, mixing-matrix validation, paired comparisons, and the
// gossip delay probe. CSV goes to --out or stdout summaries here.

#include <CLI11.hpp>
#include <cstdio>
#include <string>
#include <vector>

#include "doco/harness.hpp"

namespace {

struct GlobalFlags {
  long seed = -1;
  std::string out;
  long stride = 0;
};

doco::ExperimentConfig load_with_flags(const std::string& path, const GlobalFlags& g) {
  doco::ExperimentConfig cfg = doco::load_experiment(doco::Config::parse_file(path));
  if (g.seed >= 0) cfg.seeds = {static_cast<std::uint64_t>(g.seed)};
  if (!g.out.empty()) cfg.out = g.out;
  if (g.stride > 0) cfg.stride = g.stride;
  return cfg;
}

void print_summary(const doco::ExperimentConfig& cfg, const doco::ExperimentResult& res) {
  std::printf("algo=%s n=%d d=%d T=%ld compressor=%s\n", cfg.algorithm.c_str(), cfg.n, cfg.d,
              cfg.T, cfg.compressor.name().c_str());
  for (const auto& sr : res.seeds) {
    double reg = 0.0, bytes = 0.0;
    for (double r : sr.final_regret) reg += r;
    for (double b : sr.final_bytes) bytes += b;
    reg /= static_cast<double>(sr.final_regret.size());
    std::printf("seed=%llu mean_final_regret=%.17g total_bytes=%.17g\n",
                static_cast<unsigned long long>(sr.seed), reg, bytes);
  }
  std::printf("mean_final_regret=%.17g\n", res.mean_final_regret());
  if (!cfg.out.empty()) std::printf("csv written to %s\n", cfg.out.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"distributed online convex optimization simulator"};
  app.require_subcommand(1);
  app.fallthrough();  // lets --seed/--out/--stride appear after the subcommand

  GlobalFlags g;
  app.add_option("--seed", g.seed, "override the config's seed list with one seed");
  app.add_option("--out", g.out, "override the CSV output path");
  app.add_option("--stride", g.stride, "record every k-th round");

  std::string config_path, config_path_b, topology;
  std::vector<long> horizons;
  int n = 10;
  double omega = 0.5;
  long trials = 1000;

  auto* run_cmd = app.add_subcommand("run", "run one experiment config");
  run_cmd->add_option("config", config_path, "config file")->required();

  auto* sweep_cmd = app.add_subcommand("sweep", "run a horizon sweep and fit the regret exponent");
  sweep_cmd->add_option("config", config_path, "config file")->required();
  sweep_cmd->add_option("--horizons", horizons, "comma-separated horizons")
      ->required()
      ->delimiter(',');

  auto* vm_cmd = app.add_subcommand("validate-matrix", "print spectral quantities for a topology");
  vm_cmd->add_option("topology", topology, "cycle|complete|path|grid2d")->required();
  vm_cmd->add_option("n", n, "number of learners")->required();

  auto* cmp_cmd = app.add_subcommand("compare", "paired-seed regret table for two configs");
  cmp_cmd->add_option("configA", config_path, "first config")->required();
  cmp_cmd->add_option("configB", config_path_b, "second config")->required();

  auto* dp_cmd = app.add_subcommand("delay-probe", "mean cycle traversal time under lossy gossip");
  dp_cmd->add_option("--n", n, "cycle size (even)")->required();
  dp_cmd->add_option("--omega", omega, "per-round hop success probability")->required();
  dp_cmd->add_option("--trials", trials, "number of trials");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) {
      doco::ExperimentConfig cfg = load_with_flags(config_path, g);
      print_summary(cfg, doco::run_experiment(cfg));
    } else if (sweep_cmd->parsed()) {
      doco::ExperimentConfig cfg = load_with_flags(config_path, g);
      doco::SweepResult sw = doco::scaling_sweep(cfg, horizons);
      for (std::size_t i = 0; i < sw.horizons.size(); ++i)
        std::printf("T=%ld mean_final_regret=%.17g\n", sw.horizons[i], sw.mean_final_regret[i]);
      std::printf("loglog_slope=%.17g\n", sw.slope);
    } else if (vm_cmd->parsed()) {
      doco::Graph graph = doco::build_topology(doco::topology_from_string(topology), n);
      doco::GossipMatrix P = doco::max_degree_weights(graph);
      doco::GossipMatrix PL = doco::lazify(P);
      std::printf("max_degree:  sigma2=%.17g rho=%.17g beta=%.17g min_eig=%.17g\n", P.sigma2,
                  P.rho, P.beta, P.min_eigenvalue());
      std::printf("lazified:    sigma2=%.17g rho=%.17g beta=%.17g min_eig=%.17g psd=%s\n",
                  PL.sigma2, PL.rho, PL.beta, PL.min_eigenvalue(),
                  PL.min_eigenvalue() >= -1e-10 ? "yes" : "no");
    } else if (cmp_cmd->parsed()) {
      doco::ExperimentConfig a = load_with_flags(config_path, g);
      doco::ExperimentConfig b = load_with_flags(config_path_b, g);
      a.out.clear();
      b.out.clear();
      b.seeds = a.seeds;  // paired seeds
      doco::ExperimentResult ra = doco::run_experiment(a);
      doco::ExperimentResult rb = doco::run_experiment(b);
      std::printf("%-12s %-24s %-24s\n", "seed", a.algorithm.c_str(), b.algorithm.c_str());
      for (std::size_t i = 0; i < ra.seeds.size(); ++i) {
        double rega = 0.0, regb = 0.0;
        for (double r : ra.seeds[i].final_regret) rega += r;
        for (double r : rb.seeds[i].final_regret) regb += r;
        rega /= static_cast<double>(ra.seeds[i].final_regret.size());
        regb /= static_cast<double>(rb.seeds[i].final_regret.size());
        std::printf("%-12llu %-24.17g %-24.17g\n",
                    static_cast<unsigned long long>(ra.seeds[i].seed), rega, regb);
      }
      std::printf("%-12s %-24.17g %-24.17g\n", "mean", ra.mean_final_regret(),
                  rb.mean_final_regret());
    } else if (dp_cmd->parsed()) {
      std::uint64_t seed = g.seed >= 0 ? static_cast<std::uint64_t>(g.seed) : 1;
      double mean = doco::delay_probe(n, omega, trials, seed);
      int m = (n - 2) / 2;
      std::printf("n=%d omega=%g trials=%ld hops=%d mean_rounds=%.17g\n", n, omega, trials,
                  (m + 1) / 2, mean);
    }
  } catch (const doco::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
