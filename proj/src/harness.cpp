// SPDX-License-Identifier: Apache-2.0
#include "risfp/harness.hpp"

#include "risfp/baselines.hpp"
#include "risfp/channel.hpp"
#include "risfp/metrics.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

namespace risfp {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

double to_double(const std::string& s, const std::string& what) {
  if (s.empty()) return std::numeric_limits<double>::quiet_NaN();
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') throw std::invalid_argument(what + ": not a number: '" + s + "'");
  return v;
}

long long to_int(const std::string& s, const std::string& what) {
  char* end = nullptr;
  const long long v = std::strtoll(s.c_str(), &end, 10);
  if (s.empty() || *end != '\0') throw std::invalid_argument(what + ": not an integer: '" + s + "'");
  return v;
}

bool to_bool(const std::string& s, const std::string& what) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw std::invalid_argument(what + ": not a boolean: '" + s + "'");
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

const std::vector<std::string> kAlgorithms = {"sr", "ee", "svd_wf", "oma"};

}  // namespace

// ---------------------------------------------------------------------------
// Configuration

void ExperimentConfig::validate() const {
  if (snr_db.empty() || n_ris.empty() || k_users.empty() || sigma_eps2.empty())
    throw std::invalid_argument("experiment: every sweep axis needs at least one value");
  if (trials < 1) throw std::invalid_argument("experiment: trials must be >= 1");
  if (jobs < 1) throw std::invalid_argument("experiment: jobs must be >= 1");
  if (algorithms.empty()) throw std::invalid_argument("experiment: no algorithm selected");
  for (const auto& a : algorithms)
    if (std::find(kAlgorithms.begin(), kAlgorithms.end(), a) == kAlgorithms.end() && a != "oracle")
      throw std::invalid_argument("experiment: unknown algorithm '" + a + "'");
  for (int n : n_ris)
    if (n < 1) throw std::invalid_argument("experiment: n_ris must be >= 1");
  for (int k : k_users)
    if (k < 1) throw std::invalid_argument("experiment: k_users must be >= 1");
  for (double s : sigma_eps2)
    if (s < 0.0) throw std::invalid_argument("experiment: sigma_eps2 must be >= 0");
  ao.validate();
}

ExperimentConfig parse_experiment_config(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = "config line " + std::to_string(lineno);
    if (eq == std::string::npos) throw std::invalid_argument(where + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const std::string what = where + " (" + key + ")";
    auto doubles = [&] {
      std::vector<double> v;
      for (const auto& s : split(value, ',')) v.push_back(to_double(s, what));
      return v;
    };
    auto ints = [&] {
      std::vector<int> v;
      for (const auto& s : split(value, ',')) v.push_back(static_cast<int>(to_int(s, what)));
      return v;
    };
    auto& sys = cfg.system;
    if (key == "snr_db") cfg.snr_db = doubles();
    else if (key == "n_ris") cfg.n_ris = ints();
    else if (key == "k_users") cfg.k_users = ints();
    else if (key == "sigma_eps2") cfg.sigma_eps2 = doubles();
    else if (key == "trials") cfg.trials = static_cast<int>(to_int(value, what));
    else if (key == "algorithms") {
      cfg.algorithms.clear();
      for (const auto& a : split(value, ',')) {
        if (a == "all") cfg.algorithms.insert(cfg.algorithms.end(), kAlgorithms.begin(), kAlgorithms.end());
        else cfg.algorithms.push_back(a);
      }
    }
    else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(to_int(value, what));
    else if (key == "out_dir") cfg.out_dir = value;
    else if (key == "csv_name") cfg.csv_name = value;
    else if (key == "record_runtime") cfg.record_runtime = to_bool(value, what);
    else if (key == "jobs") cfg.jobs = static_cast<int>(to_int(value, what));
    else if (key == "bs_antennas") sys.bs_antennas = static_cast<int>(to_int(value, what));
    else if (key == "bs_ris_paths") sys.bs_ris_paths = static_cast<int>(to_int(value, what));
    else if (key == "ris_user_paths") sys.ris_user_paths = static_cast<int>(to_int(value, what));
    else if (key == "noise_power") sys.noise_power = to_double(value, what);
    else if (key == "min_rate") cfg.min_rate = to_double(value, what);
    else if (key == "bs_residual_power") sys.bs_residual_power = to_double(value, what);
    else if (key == "rf_chain_power") sys.rf_chain_power = to_double(value, what);
    else if (key == "ris_element_power") sys.ris_element_power = to_double(value, what);
    else if (key == "max_outer") cfg.ao.max_outer = static_cast<int>(to_int(value, what));
    else if (key == "outer_tol") cfg.ao.outer_tol = to_double(value, what);
    else if (key == "max_inner") cfg.ao.max_inner = static_cast<int>(to_int(value, what));
    else if (key == "inner_tol") cfg.ao.inner_tol = to_double(value, what);
    else if (key == "warmup_iters") cfg.ao.warmup_iters = static_cast<int>(to_int(value, what));
    else if (key == "randomizations") cfg.ao.randomizations = static_cast<int>(to_int(value, what));
    else if (key == "aux_form") {
      if (value == "consistent") cfg.ao.aux_form = PowerAuxForm::consistent;
      else if (value == "printed") cfg.ao.aux_form = PowerAuxForm::printed;
      else throw std::invalid_argument(what + ": expected 'consistent' or 'printed'");
    }
    else throw std::invalid_argument(where + ": unknown key '" + key + "'");
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_experiment_config(ss.str());
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(path.string() + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Sweep

std::uint64_t derive_seed(std::uint64_t master, int n_ris, int k_users, int trial) {
  std::uint64_t h = splitmix(master);
  h = splitmix(h ^ static_cast<std::uint64_t>(n_ris));
  h = splitmix(h ^ (static_cast<std::uint64_t>(k_users) << 20));
  return splitmix(h ^ (static_cast<std::uint64_t>(trial) << 40));
}

std::pair<int, int> ris_grid(int elements) {
  int h = static_cast<int>(std::sqrt(static_cast<double>(elements)));
  while (h > 1 && elements % h != 0) --h;
  return {h, elements / h};
}

SystemConfig point_config(const ExperimentConfig& cfg, double snr_db, int n_ris, int k_users,
                          double sigma_eps2) {
  SystemConfig sys = cfg.system;
  const auto [h, v] = ris_grid(n_ris);
  sys.ris_horizontal = h;
  sys.ris_vertical = v;
  sys.users = k_users;
  sys.error_variance = sigma_eps2;
  sys.power_budget = sys.noise_power * std::pow(10.0, snr_db / 10.0);
  sys.min_rate.assign(static_cast<std::size_t>(k_users), cfg.min_rate);
  sys.validate();
  return sys;
}

TrialRecord run_algorithm(const std::string& algorithm, const ChannelSet& chs, const SystemConfig& sys,
                          const AoSettings& ao, std::uint64_t seed, bool record_runtime) {
  TrialRecord r;
  r.algorithm = algorithm;
  r.seed = seed;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    if (algorithm == "sr" || algorithm == "ee") {
      std::uint64_t tag = 0;
      for (char c : algorithm) tag = tag * 131 + static_cast<unsigned char>(c);
      std::mt19937_64 rng(splitmix(seed ^ tag));
      const auto [design, trace] =
          algorithm == "sr" ? algorithm1_sum_rate(chs, sys, ao, rng) : algorithm2_ee(chs, sys, ao, rng);
      const RateReport rep = rate_report(design, chs, sys);
      r.sum_rate = rep.sum_rate;
      r.ee = rep.ee;
      r.objective = algorithm == "sr" ? rep.sum_rate : rep.ee;
      r.total_tx_power = design.power.sum();
      r.iters = trace.iterations;
      r.feasible = rep.feasible;
      r.rates.assign(rep.rate.data(), rep.rate.data() + rep.rate.size());
    } else if (algorithm == "svd_wf" || algorithm == "oma") {
      const BaselineResult b = algorithm == "svd_wf" ? svd_wf_baseline(chs, sys) : oma_tdma_baseline(chs, sys);
      r.sum_rate = b.sum_rate;
      r.ee = b.ee;
      r.objective = b.sum_rate;
      r.total_tx_power = b.total_tx_power;
      r.feasible = true;
      r.rates.assign(b.rates.data(), b.rates.data() + b.rates.size());
    } else if (algorithm == "oracle") {
      const OracleResult o = brute_force_oracle(chs, sys);
      const RateReport rep = rate_report(o.best_design, chs, sys);
      r.sum_rate = rep.sum_rate;
      r.ee = rep.ee;
      r.objective = o.best_sum_rate;
      r.total_tx_power = o.best_design.power.sum();
      r.feasible = rep.feasible;
      r.rates.assign(rep.rate.data(), rep.rate.data() + rep.rate.size());
    } else {
      throw std::invalid_argument("unknown algorithm '" + algorithm + "'");
    }
  } catch (const std::invalid_argument&) {
    throw;
  } catch (const std::exception&) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    r.objective = r.sum_rate = r.ee = r.total_tx_power = nan;
    r.feasible = false;
    r.rates.clear();
  }
  if (record_runtime)
    r.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

std::vector<TrialRecord> run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  struct Job {
    double snr;
    int n;
    int k;
    double s2;
    int trial;
  };
  std::vector<Job> jobs;
  for (int n : cfg.n_ris)
    for (int k : cfg.k_users)
      for (double s2 : cfg.sigma_eps2)
        for (double snr : cfg.snr_db)
          for (int t = 0; t < cfg.trials; ++t) jobs.push_back({snr, n, k, s2, t});

  std::vector<std::vector<TrialRecord>> results(jobs.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_lock;
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        const Job& j = jobs[i];
        const SystemConfig sys = point_config(cfg, j.snr, j.n, j.k, j.s2);
        const std::uint64_t seed = derive_seed(cfg.seed, j.n, j.k, j.trial);
        std::mt19937_64 rng(seed);
        const ChannelSet chs = sample_channels(sys, rng);
        for (const auto& a : cfg.algorithms) {
          TrialRecord r = run_algorithm(a, chs, sys, cfg.ao, seed, cfg.record_runtime);
          r.trial = j.trial;
          r.snr_db = j.snr;
          r.n_ris = j.n;
          r.k_users = j.k;
          r.sigma_eps2 = j.s2;
          results[i].push_back(std::move(r));
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_lock);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const int workers = std::max(1, std::min<int>(cfg.jobs, static_cast<int>(jobs.size())));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  std::vector<TrialRecord> out;
  for (auto& r : results) out.insert(out.end(), std::make_move_iterator(r.begin()), std::make_move_iterator(r.end()));
  return out;
}

// ---------------------------------------------------------------------------
// Brute force

OracleResult brute_force_oracle(const ChannelSet& chs, const SystemConfig& cfg, const OracleGrid& grid) {
  const int m = chs.antennas();
  const int n = chs.elements();
  const int users = chs.users();
  if (m > 2 || n > 2 || users > 2)
    throw std::invalid_argument("brute_force_oracle: limited to M, N, K <= 2");
  if (grid.phase_levels < 1 || grid.beam_codebook < 1 || grid.power_levels < 2)
    throw std::invalid_argument("brute_force_oracle: grid sizes too small");

  const double two_pi = 2.0 * std::numbers::pi;
  std::vector<Eigen::VectorXcd> phase_set;
  if (n == 1) {
    phase_set.push_back(Eigen::VectorXcd::Ones(1));
  } else {
    for (int q = 0; q < grid.phase_levels; ++q) {
      Eigen::VectorXcd psi(2);
      psi << 1.0, std::polar(1.0, two_pi * q / grid.phase_levels);
      phase_set.push_back(psi);
    }
  }
  std::vector<Eigen::VectorXcd> beams;
  if (m == 1) {
    beams.push_back(Eigen::VectorXcd::Ones(1));
  } else {
    const int side = std::max(1, static_cast<int>(std::lround(std::sqrt(static_cast<double>(grid.beam_codebook)))));
    for (int a = 0; a < side; ++a) {
      const double beta = side == 1 ? 0.0 : (std::numbers::pi / 2.0) * a / (side - 1);
      for (int b = 0; b < side; ++b) {
        Eigen::VectorXcd f(2);
        f << std::cos(beta), std::polar(std::sin(beta), two_pi * b / side);
        beams.push_back(f);
      }
    }
  }
  std::vector<Eigen::VectorXd> powers;
  if (users == 1) {
    powers.push_back(Eigen::VectorXd::Constant(1, cfg.power_budget));
  } else {
    for (int q = 0; q < grid.power_levels; ++q) {
      Eigen::VectorXd p(2);
      p(0) = cfg.power_budget * q / (grid.power_levels - 1);
      p(1) = cfg.power_budget - p(0);
      powers.push_back(p);
    }
  }

  const Eigen::VectorXd eta = cfg.min_sinr();
  OracleResult best;
  best.best_sum_rate = -std::numeric_limits<double>::infinity();
  Eigen::VectorXd gain2(users);
  for (const auto& f : beams) {
    const Eigen::VectorXd residual = residual_coeff(chs, f, cfg);
    for (const auto& psi : phase_set) {
      for (int k = 0; k < users; ++k) gain2(k) = std::norm(effective_gain(chs, psi, f, k));
      const std::vector<int> order = decode_order(chs, psi, f);
      for (const auto& p : powers) {
        const Eigen::VectorXd gamma = sinr_from_gains(gain2, residual, p, order, cfg.noise_power);
        if (((gamma - eta).array() < 0.0).any()) continue;
        const double rate = sum_rate(gamma);
        if (rate > best.best_sum_rate) {
          best.best_sum_rate = rate;
          best.best_design = {f, psi, p, order};
        }
      }
    }
  }
  if (!std::isfinite(best.best_sum_rate)) throw InfeasibleProblem("brute_force_oracle: no grid point meets the minimum rates");
  return best;
}

// ---------------------------------------------------------------------------
// CSV

namespace {

const char* kHeader =
    "trial,seed,snr_db,n_ris,k_users,sigma_eps2,algorithm,objective,sum_rate,ee,total_tx_power,iters,runtime_ms,"
    "feasible";

}  // namespace

std::string csv_text(const std::vector<TrialRecord>& records) {
  std::size_t kmax = 0;
  for (const auto& r : records) kmax = std::max(kmax, r.rates.size());
  std::string out = kHeader;
  for (std::size_t k = 1; k <= kmax; ++k) out += ",rate_" + std::to_string(k);
  out += '\n';
  for (const auto& r : records) {
    out += std::to_string(r.trial) + ',' + std::to_string(r.seed) + ',' + fmt(r.snr_db) + ',' +
           std::to_string(r.n_ris) + ',' + std::to_string(r.k_users) + ',' + fmt(r.sigma_eps2) + ',' + r.algorithm +
           ',' + fmt(r.objective) + ',' + fmt(r.sum_rate) + ',' + fmt(r.ee) + ',' + fmt(r.total_tx_power) + ',' +
           std::to_string(r.iters) + ',' + fmt(r.runtime_ms) + ',' + (r.feasible ? "1" : "0");
    for (std::size_t k = 0; k < kmax; ++k) {
      out += ',';
      if (k < r.rates.size()) out += fmt(r.rates[k]);
    }
    out += '\n';
  }
  return out;
}

void emit_csv(const std::vector<TrialRecord>& records, const std::filesystem::path& path) {
  if (records.empty()) throw std::invalid_argument("emit_csv: no records");
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << csv_text(records);
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::vector<TrialRecord> parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("csv: empty input");
  const std::vector<std::string> header = split(line, ',');
  const std::vector<std::string> fixed = split(kHeader, ',');
  if (header.size() < fixed.size() || !std::equal(fixed.begin(), fixed.end(), header.begin()))
    throw std::invalid_argument("csv: unexpected header");
  const std::size_t kmax = header.size() - fixed.size();
  std::vector<TrialRecord> out;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const std::vector<std::string> f = split(line, ',');
    const std::string what = "csv line " + std::to_string(lineno);
    if (f.size() != header.size()) throw std::invalid_argument(what + ": wrong field count");
    TrialRecord r;
    r.trial = static_cast<int>(to_int(f[0], what));
    r.seed = std::stoull(f[1]);
    r.snr_db = to_double(f[2], what);
    r.n_ris = static_cast<int>(to_int(f[3], what));
    r.k_users = static_cast<int>(to_int(f[4], what));
    r.sigma_eps2 = to_double(f[5], what);
    r.algorithm = f[6];
    r.objective = to_double(f[7], what);
    r.sum_rate = to_double(f[8], what);
    r.ee = to_double(f[9], what);
    r.total_tx_power = to_double(f[10], what);
    r.iters = static_cast<int>(to_int(f[11], what));
    r.runtime_ms = to_double(f[12], what);
    r.feasible = f[13] == "1";
    for (std::size_t k = 0; k < kmax; ++k)
      if (!f[fixed.size() + k].empty()) r.rates.push_back(to_double(f[fixed.size() + k], what));
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<TrialRecord> read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_csv(ss.str());
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(path.string() + ": " + e.what());
  }
}

}  // namespace risfp
