// SPDX-License-Identifier: Apache-2.0
#pragma once

// Monte Carlo sweeps, CSV records, SVG plots and the brute-force oracle.

#include "risfp/algorithms.hpp"
#include "risfp/types.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace risfp {

/// Algorithm labels as written to CSV: "sr", "ee", "svd_wf", "oma", "oracle".
struct ExperimentConfig {
  std::vector<double> snr_db = {-10, -5, 0, 5, 10, 15, 20, 25, 30};
  std::vector<int> n_ris = {64};
  std::vector<int> k_users = {4};
  std::vector<double> sigma_eps2 = {0.0};
  int trials = 100;
  std::vector<std::string> algorithms = {"sr", "ee", "svd_wf", "oma"};
  SystemConfig system;        // per-point fields (N, K, P_s, sigma_eps^2) are overwritten
  double min_rate = 0.3;      // R_th for every user
  AoSettings ao;
  std::uint64_t seed = 1;
  std::string out_dir = "out";
  std::string csv_name = "results.csv";
  bool record_runtime = false;  // runtime_ms is 0 unless set, keeping CSV bytes reproducible
  int jobs = 1;

  void validate() const;
};

/// Parses `key = value` lines; '#' starts a comment, lists are comma-separated.
/// Unknown keys throw std::invalid_argument naming the line.
ExperimentConfig parse_experiment_config(const std::string& text);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

struct TrialRecord {
  int trial = 0;
  std::uint64_t seed = 0;
  double snr_db = 0.0;
  int n_ris = 0;
  int k_users = 0;
  double sigma_eps2 = 0.0;
  std::string algorithm;
  double objective = 0.0;
  double sum_rate = 0.0;
  double ee = 0.0;
  double total_tx_power = 0.0;
  int iters = 0;
  double runtime_ms = 0.0;
  bool feasible = false;
  std::vector<double> rates;

  bool operator==(const TrialRecord&) const = default;
};

/// Channel seed of one (N, K, trial) cell. SNR and error variance are not
/// mixed in, so every SNR / error point reuses the same realisations.
std::uint64_t derive_seed(std::uint64_t master, int n_ris, int k_users, int trial);

/// RIS grid for N elements: the most square N_H x N_V factorisation.
std::pair<int, int> ris_grid(int elements);

/// System configuration of one sweep point.
SystemConfig point_config(const ExperimentConfig& cfg, double snr_db, int n_ris, int k_users,
                          double sigma_eps2);

/// Runs one algorithm on one channel set; failures come back as infeasible rows.
TrialRecord run_algorithm(const std::string& algorithm, const ChannelSet& chs, const SystemConfig& sys,
                          const AoSettings& ao, std::uint64_t seed, bool record_runtime);

/// Every axis point x trial x algorithm, ordered by (N, K, sigma_eps^2, SNR,
/// trial, algorithm) regardless of the worker count.
std::vector<TrialRecord> run_experiment(const ExperimentConfig& cfg);

struct OracleGrid {
  int phase_levels = 64;     // psi_i in {exp(j 2 pi m / Q)}
  int beam_codebook = 256;   // M = 2: sqrt(Q) amplitude x sqrt(Q) phase levels
  int power_levels = 64;     // K = 2: p_1 = P_s m / (Q - 1), p_2 = P_s - p_1
};

struct OracleResult {
  double best_sum_rate = 0.0;
  Design best_design;
};

/// Exhaustive search over the grids with M, N, K <= 2. psi_1 is pinned to 1
/// (common phase rotations leave every |g_k f| unchanged) and the budget is
/// spent in full (every SINR grows when all powers are scaled up). Candidates
/// breaking a minimum rate are skipped.
OracleResult brute_force_oracle(const ChannelSet& chs, const SystemConfig& cfg, const OracleGrid& grid = {});

void emit_csv(const std::vector<TrialRecord>& records, const std::filesystem::path& path);
std::string csv_text(const std::vector<TrialRecord>& records);
std::vector<TrialRecord> read_csv(const std::filesystem::path& path);
std::vector<TrialRecord> parse_csv(const std::string& text);

struct PlotSpec {
  std::string x = "snr_db";
  std::string y = "sum_rate";
  std::string series = "algorithm";
  std::vector<std::pair<std::string, std::string>> where;  // column == value filters
  std::string title;
};

struct SeriesPoint {
  double x = 0.0;
  double mean = 0.0;
  double stddev = 0.0;
  int count = 0;
};

/// Groups records by series label, then x; mean and sample std of y.
std::map<std::string, std::vector<SeriesPoint>> aggregate(const std::vector<TrialRecord>& records,
                                                          const PlotSpec& spec);

/// Named numeric / text column of a record (CSV header names, rate_<k>).
std::string column_text(const TrialRecord& r, const std::string& column);
double column_value(const TrialRecord& r, const std::string& column);

std::string plot_svg(const std::vector<TrialRecord>& records, const PlotSpec& spec);
void emit_plot(const std::filesystem::path& csv, const PlotSpec& spec, const std::filesystem::path& out);

}  // namespace risfp
