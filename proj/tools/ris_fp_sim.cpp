// SPDX-License-Identifier: Apache-2.0
// Command-line front end: run sweeps, draw plots, compare against the
// brute-force oracle and run a quick self-check.
#include "risfp/algorithms.hpp"
#include "risfp/baselines.hpp"
#include "risfp/channel.hpp"
#include "risfp/fp_subproblems.hpp"
#include "risfp/harness.hpp"
#include "risfp/metrics.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <iostream>
#include <map>

namespace {

using namespace risfp;

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::optional<int> jobs;
  std::optional<std::string> out_dir;
};

void add_overrides(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--seed", o.seed, "master seed");
  cmd->add_option("--trials", o.trials, "trials per sweep point");
  cmd->add_option("--jobs", o.jobs, "worker threads (default: $RIS_FP_SIM_JOBS or the config)");
  cmd->add_option("--out-dir", o.out_dir, "output directory");
}

void apply(ExperimentConfig& cfg, const Overrides& o) {
  if (o.seed) cfg.seed = *o.seed;
  if (o.trials) cfg.trials = *o.trials;
  if (o.out_dir) cfg.out_dir = *o.out_dir;
  if (o.jobs) {
    cfg.jobs = *o.jobs;
  } else if (const char* env = std::getenv("RIS_FP_SIM_JOBS")) {
    cfg.jobs = std::atoi(env);
  }
  cfg.validate();
}

int cmd_run(const std::string& path, const Overrides& o) {
  ExperimentConfig cfg = load_experiment_config(path);
  apply(cfg, o);
  const auto records = run_experiment(cfg);
  const std::filesystem::path out = std::filesystem::path(cfg.out_dir) / cfg.csv_name;
  emit_csv(records, out);
  std::cout << "wrote " << records.size() << " rows to " << out.string() << '\n';
  return 0;
}

int cmd_oracle(const std::string& path, const Overrides& o) {
  ExperimentConfig cfg = load_experiment_config(path);
  cfg.algorithms = {"oracle", "sr"};
  apply(cfg, o);
  const auto records = run_experiment(cfg);
  const std::filesystem::path out = std::filesystem::path(cfg.out_dir) / cfg.csv_name;
  emit_csv(records, out);
  double worst = INFINITY;
  for (std::size_t i = 0; i + 1 < records.size(); i += 2)
    worst = std::min(worst, records[i + 1].sum_rate / records[i].sum_rate);
  std::cout << "wrote " << records.size() << " rows to " << out.string() << "; worst sr/oracle ratio " << worst
            << '\n';
  return 0;
}

int cmd_plot(const std::string& csv, PlotSpec spec, const std::vector<std::string>& where, const std::string& out) {
  for (const auto& w : where) {
    const auto eq = w.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("--where expects column=value, got '" + w + "'");
    spec.where.emplace_back(w.substr(0, eq), w.substr(eq + 1));
  }
  emit_plot(csv, spec, out);
  std::cout << "wrote " << out << '\n';
  return 0;
}

int cmd_selftest() {
  int failures = 0;
  auto report = [&](const std::string& name, bool ok, const std::string& detail) {
    std::cout << (ok ? "PASS " : "FAIL ") << name << "  " << detail << '\n';
    failures += ok ? 0 : 1;
  };

  SystemConfig sys;
  sys.bs_antennas = 4;
  sys.ris_horizontal = 2;
  sys.ris_vertical = 4;
  sys.users = 3;
  sys.min_rate = {0.3, 0.3, 0.3};
  sys.error_variance = 0.05;
  std::mt19937_64 rng(7);
  double qt_err = 0.0;
  double wmse_err = 0.0;
  for (int t = 0; t < 20; ++t) {
    const ChannelSet chs = sample_channels(sys, rng);
    Design d = initialize_design(chs, sys, rng);
    const Eigen::VectorXd gamma = sinr(d, chs, sys);
    const BeamformerCoeffs bc = build_beamformer_coeffs(chs, d.phases, d.power, d.order, sys);
    qt_err = std::max(qt_err, (beamformer_qt_sinr(bc, aux_update_f(bc, d.beam), d.beam) - gamma).cwiseAbs().maxCoeff());
    const WmseState w = wmse_oracle(d, chs, sys);
    wmse_err = std::max(wmse_err, (w.e_mmse.array() * (1.0 + gamma.array()) - 1.0).abs().maxCoeff());
  }
  report("qt-identity", qt_err < 1e-9, "max |QT - SINR| = " + std::to_string(qt_err));
  report("wmse-identity", wmse_err < 1e-10, "max |e(1+SINR) - 1| = " + std::to_string(wmse_err));

  ExperimentConfig cfg;
  cfg.snr_db = {10};
  cfg.n_ris = {4};
  cfg.k_users = {2};
  cfg.trials = 2;
  cfg.system.bs_antennas = 4;
  cfg.algorithms = {"sr", "oma"};
  cfg.ao.max_outer = 8;
  cfg.ao.warmup_iters = 2;
  const std::string a = csv_text(run_experiment(cfg));
  cfg.jobs = 2;
  const std::string b = csv_text(run_experiment(cfg));
  report("determinism", a == b, "jobs 1 vs 2");
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RIS-assisted NOMA simulator (fractional-programming designs)"};
  app.require_subcommand(1);

  Overrides run_o;
  std::string run_cfg;
  auto* run = app.add_subcommand("run", "run a Monte Carlo sweep and write CSV");
  run->add_option("config", run_cfg, "experiment config")->required()->check(CLI::ExistingFile);
  add_overrides(run, run_o);

  Overrides oracle_o;
  std::string oracle_cfg;
  auto* oracle = app.add_subcommand("oracle", "compare Algorithm 1 with exhaustive search on tiny instances");
  oracle->add_option("config", oracle_cfg, "experiment config (M, N, K <= 2)")->required()->check(CLI::ExistingFile);
  add_overrides(oracle, oracle_o);

  std::string csv;
  std::string out;
  PlotSpec spec;
  std::vector<std::string> where;
  auto* plot = app.add_subcommand("plot", "draw mean +- std curves from a CSV as SVG");
  plot->add_option("csv", csv, "results CSV")->required()->check(CLI::ExistingFile);
  plot->add_option("--x", spec.x, "x column")->capture_default_str();
  plot->add_option("--y", spec.y, "y column")->capture_default_str();
  plot->add_option("--series", spec.series, "series column")->capture_default_str();
  plot->add_option("--where", where, "column=value filter (repeatable)");
  plot->add_option("--title", spec.title, "chart title");
  plot->add_option("--out", out, "output SVG")->required();

  auto* selftest = app.add_subcommand("selftest", "quick identity and determinism checks");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run) return cmd_run(run_cfg, run_o);
    if (*oracle) return cmd_oracle(oracle_cfg, oracle_o);
    if (*plot) return cmd_plot(csv, spec, where, out);
    if (*selftest) return cmd_selftest();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
