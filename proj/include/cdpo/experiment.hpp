#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cdpo/envs.hpp"
#include "cdpo/ppo.hpp"

namespace cdpo::lab {

// Everything a single training run needs. Defaults are the CartPole /
// Carterpillar settings (8 envs, 32 steps, 20 epochs, batch 256,
// lambda 0.8, gamma 0.98, lr 1e-3, clip 0.2, c_vf 0.5).
struct ExperimentConfig {
  env::EnvConfig env;
  reg::RegularizerKind regularizer = reg::RegularizerKind::None;
  double reg_coef = 0.0;
  long total_timesteps = 100000;
  int n_envs = 8;
  int n_steps = 32;
  int n_epochs = 20;
  int batch_size = 256;
  double gae_lambda = 0.8;
  double gamma = 0.98;
  double learning_rate = 1e-3;
  double max_grad_norm = 0.5;
  double clip_range = 0.2;
  double c_vf = 0.5;
  int record_interval = 1;  // record a row every k updates
  int return_window = 100;  // trailing completed episodes in the mean return

  void validate() const;
  rl::UpdateConfig update_config() const;
};

struct RunRow {
  long step = 0;
  double return_mean = 0.0;  // nan until an episode has completed
  double entropy = 0.0;
  double disequilibrium = 0.0;
  double complexity = 0.0;
  double policy_objective = 0.0;
  double value_loss = 0.0;
  double clip_fraction = 0.0;
  double approx_kl = 0.0;
};

struct RunMeta {
  std::string algo;  // "cdpo", "ppo-ent", "ppo"
  double reg_coef = 0.0;
  uint64_t seed = 0;
  std::string env_name;
  uint64_t config_hash = 0;
};

struct RunRecord {
  RunMeta meta;
  std::vector<RunRow> rows;

  double final_return() const;  // nan when empty
};

// Canonical flat serialization of a config; the hash is FNV-1a over it.
std::string serialize_config(const ExperimentConfig& cfg, uint64_t seed);
uint64_t config_hash(const ExperimentConfig& cfg, uint64_t seed);

std::string algo_name(const ExperimentConfig& cfg);

// Deterministic training run: collect -> GAE -> update until
// total_timesteps is reached, recording a row per record_interval updates.
// When final_params is given it receives the trained network.
RunRecord run(const ExperimentConfig& cfg, uint64_t seed,
              nn::ParamSet* final_params = nullptr);

// Runs and writes the CSV under out_dir. On error the partial CSV is still
// flushed and the exception rethrown.
RunRecord run_and_save(const ExperimentConfig& cfg, uint64_t seed,
                       const std::string& out_dir,
                       nn::ParamSet* final_params = nullptr);

std::string run_filename(const ExperimentConfig& cfg, uint64_t seed);

void write_csv(const RunRecord& record, std::ostream& out);
std::string csv_string(const RunRecord& record);
RunRecord parse_csv(std::istream& in);
RunRecord load_csv(const std::string& path);

struct SeedResult {
  uint64_t seed = 0;
  bool ok = false;
  std::string error;  // set when ok is false
  double final_return = 0.0;
  std::vector<long> steps;
  std::vector<double> returns;
};

struct SweepCell {
  std::string algo;
  double reg_coef = 0.0;
  std::vector<SeedResult> seeds;
  double mean_final = 0.0;
  double stderr_final = 0.0;  // sample std / sqrt(n); 0 when n == 1
  bool single_seed = false;
  std::vector<long> steps;          // common recording grid
  std::vector<double> mean_curve;   // pointwise mean over seeds
  std::vector<double> stderr_curve;
};

struct SweepSummary {
  std::vector<SweepCell> cells;
  // per algorithm: pointwise mean over that algorithm's per-coefficient
  // mean curves, plus the standard error across coefficients
  std::map<std::string, std::vector<long>> aggregate_steps;
  std::map<std::string, std::vector<double>> aggregate_mean;
  std::map<std::string, std::vector<double>> aggregate_stderr;

  const SweepCell* find(const std::string& algo, double reg_coef) const;
};

struct SweepSpec {
  ExperimentConfig base;
  std::vector<std::string> algos;  // subset of {"cdpo", "ppo-ent", "ppo"}
  std::vector<double> reg_coefs;   // applied to cdpo and ppo-ent
  std::vector<uint64_t> seeds;
  int workers = 1;
  std::string out_dir;
};

// |reg_coefs| x |seeds| runs per regularized algorithm (one bundle of seeds
// for the unregularized baseline), executed by a worker pool. Failed runs are
// recorded as failed, never dropped silently.
SweepSummary sweep(const SweepSpec& spec);

// Rebuilds a summary from run records (used by sweep and by `plot`).
SweepSummary summarize(const std::vector<RunRecord>& records);
std::vector<RunRecord> load_run_dir(const std::string& dir);

// Flat key = value config file with [env], [train] and [sweep] sections.
SweepSpec load_sweep_file(const std::string& path);
void save_sweep_file(const SweepSpec& spec, std::ostream& out);

// Final-parameter dump (layer dims and values, one value per line).
void write_params(const nn::ParamSet& params, std::ostream& out);

std::string format_double(double v);
double parse_double(const std::string& s);

}  // namespace cdpo::lab
