#include "cdpo/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <deque>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "cdpo/rollout.hpp"

namespace fs = std::filesystem;

namespace cdpo::lab {

namespace {

constexpr uint64_t kEnvStream = 0x656e76ull;
constexpr uint64_t kInitStream = 0x696e6974ull;
constexpr uint64_t kActionStream = 0x616374ull;
constexpr uint64_t kShuffleStream = 0x73687566ull;

double mean_of(const std::deque<double>& window) {
  if (window.empty()) return std::numeric_limits<double>::quiet_NaN();
  double acc = 0.0;
  for (double v : window) acc += v;
  return acc / static_cast<double>(window.size());
}

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  size_t b = s.find_last_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

uint64_t fnv1a(const std::string& s) {
  uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

// nan-aware pointwise statistics over aligned curves
void pointwise_stats(const std::vector<const std::vector<double>*>& curves,
                     std::vector<double>& mean, std::vector<double>& stderr_) {
  size_t len = 0;
  for (const auto* c : curves) len = std::max(len, c->size());
  mean.assign(len, std::numeric_limits<double>::quiet_NaN());
  stderr_.assign(len, std::numeric_limits<double>::quiet_NaN());
  for (size_t j = 0; j < len; ++j) {
    double acc = 0.0;
    int n = 0;
    for (const auto* c : curves) {
      if (j < c->size() && !std::isnan((*c)[j])) {
        acc += (*c)[j];
        n += 1;
      }
    }
    if (n == 0) continue;
    const double m = acc / n;
    mean[j] = m;
    if (n >= 2) {
      double var = 0.0;
      for (const auto* c : curves) {
        if (j < c->size() && !std::isnan((*c)[j])) {
          var += ((*c)[j] - m) * ((*c)[j] - m);
        }
      }
      stderr_[j] = std::sqrt(var / (n - 1)) / std::sqrt(static_cast<double>(n));
    } else {
      stderr_[j] = 0.0;
    }
  }
}

struct SeedOutcome {
  RunRecord record;
  bool ok = true;
  std::string error;
};

SweepSummary build_summary(const std::vector<SeedOutcome>& outcomes) {
  SweepSummary summary;
  // group by (algo, reg_coef); keep first-seen order
  std::vector<std::pair<std::string, double>> keys;
  for (const auto& o : outcomes) {
    std::pair<std::string, double> key{o.record.meta.algo,
                                       o.record.meta.reg_coef};
    if (std::find(keys.begin(), keys.end(), key) == keys.end())
      keys.push_back(key);
  }
  for (const auto& [algo, coef] : keys) {
    SweepCell cell;
    cell.algo = algo;
    cell.reg_coef = coef;
    std::vector<const std::vector<double>*> curves;
    std::vector<double> finals;
    for (const auto& o : outcomes) {
      if (o.record.meta.algo != algo || o.record.meta.reg_coef != coef)
        continue;
      SeedResult sr;
      sr.seed = o.record.meta.seed;
      sr.ok = o.ok;
      sr.error = o.error;
      sr.final_return = o.record.final_return();
      for (const auto& row : o.record.rows) {
        sr.steps.push_back(row.step);
        sr.returns.push_back(row.return_mean);
      }
      if (o.ok) {
        if (cell.steps.empty()) cell.steps = sr.steps;
        if (!std::isnan(sr.final_return)) finals.push_back(sr.final_return);
      }
      cell.seeds.push_back(std::move(sr));
    }
    for (const auto& sr : cell.seeds)
      if (sr.ok) curves.push_back(&sr.returns);
    if (!curves.empty())
      pointwise_stats(curves, cell.mean_curve, cell.stderr_curve);
    const int n = static_cast<int>(finals.size());
    cell.single_seed = n == 1;
    if (n > 0) {
      double m = 0.0;
      for (double f : finals) m += f;
      m /= n;
      cell.mean_final = m;
      if (n >= 2) {
        double var = 0.0;
        for (double f : finals) var += (f - m) * (f - m);
        cell.stderr_final = std::sqrt(var / (n - 1)) / std::sqrt(double(n));
      } else {
        cell.stderr_final = 0.0;
      }
    } else {
      cell.mean_final = std::numeric_limits<double>::quiet_NaN();
      cell.stderr_final = std::numeric_limits<double>::quiet_NaN();
    }
    summary.cells.push_back(std::move(cell));
  }

  // aggregated-over-coefficient curve per algorithm
  std::vector<std::string> algos;
  for (const auto& cell : summary.cells)
    if (std::find(algos.begin(), algos.end(), cell.algo) == algos.end())
      algos.push_back(cell.algo);
  for (const auto& algo : algos) {
    std::vector<const std::vector<double>*> curves;
    std::vector<long> steps;
    for (const auto& cell : summary.cells) {
      if (cell.algo != algo || cell.mean_curve.empty()) continue;
      curves.push_back(&cell.mean_curve);
      if (steps.empty()) steps = cell.steps;
    }
    if (curves.empty()) continue;
    std::vector<double> mean, se;
    pointwise_stats(curves, mean, se);
    summary.aggregate_steps[algo] = std::move(steps);
    summary.aggregate_mean[algo] = std::move(mean);
    summary.aggregate_stderr[algo] = std::move(se);
  }
  return summary;
}

}  // namespace

void ExperimentConfig::validate() const {
  env.validate();
  if (env.kind == env::EnvKind::Carterpillar && env.carts < 2)
    throw std::invalid_argument("carterpillar training requires carts >= 2");
  if (total_timesteps < 0)
    throw std::invalid_argument("total_timesteps must be >= 0");
  if (n_envs < 1 || n_steps < 1)
    throw std::invalid_argument("n_envs and n_steps must be >= 1");
  if (n_epochs < 0) throw std::invalid_argument("n_epochs must be >= 0");
  if (batch_size < 1 || (n_envs * n_steps) % batch_size != 0)
    throw std::invalid_argument("batch_size must divide n_envs * n_steps");
  if (!(gamma > 0.0 && gamma <= 1.0))
    throw std::invalid_argument("gamma must be in (0, 1]");
  if (!(gae_lambda >= 0.0 && gae_lambda <= 1.0))
    throw std::invalid_argument("gae_lambda must be in [0, 1]");
  if (learning_rate <= 0.0)
    throw std::invalid_argument("learning_rate must be positive");
  if (max_grad_norm <= 0.0)
    throw std::invalid_argument("max_grad_norm must be positive");
  if (record_interval < 1)
    throw std::invalid_argument("record_interval must be >= 1");
  if (return_window < 1)
    throw std::invalid_argument("return_window must be >= 1");
  if (regularizer == reg::RegularizerKind::None && reg_coef != 0.0)
    throw std::invalid_argument("reg_coef must be 0 without a regularizer");
  rl::LossConfig loss{clip_range, c_vf, reg_coef, regularizer};
  loss.validate();
}

rl::UpdateConfig ExperimentConfig::update_config() const {
  rl::UpdateConfig u;
  u.loss = rl::LossConfig{clip_range, c_vf, reg_coef, regularizer};
  u.n_epochs = n_epochs;
  u.batch_size = batch_size;
  u.learning_rate = learning_rate;
  u.max_grad_norm = max_grad_norm;
  return u;
}

double RunRecord::final_return() const {
  if (rows.empty()) return std::numeric_limits<double>::quiet_NaN();
  return rows.back().return_mean;
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{})
    throw std::invalid_argument("cannot parse number: " + s);
  return v;
}

std::string algo_name(const ExperimentConfig& cfg) {
  switch (cfg.regularizer) {
    case reg::RegularizerKind::Complexity: return "cdpo";
    case reg::RegularizerKind::Entropy: return "ppo-ent";
    case reg::RegularizerKind::None: return "ppo";
  }
  return "ppo";
}

std::string serialize_config(const ExperimentConfig& cfg, uint64_t seed) {
  std::ostringstream out;
  out << "env=" << env::to_string(cfg.env.kind)
      << ";carts=" << cfg.env.carts
      << ";gravity=" << format_double(cfg.env.gravity)
      << ";spring_k=" << format_double(cfg.env.spring_k)
      << ";damper_b=" << format_double(cfg.env.damper_b)
      << ";max_episode_steps=" << cfg.env.max_episode_steps
      << ";dt=" << format_double(cfg.env.dt)
      << ";force_mag=" << format_double(cfg.env.force_mag)
      << ";regularizer=" << reg::to_string(cfg.regularizer)
      << ";reg_coef=" << format_double(cfg.reg_coef)
      << ";total_timesteps=" << cfg.total_timesteps
      << ";n_envs=" << cfg.n_envs << ";n_steps=" << cfg.n_steps
      << ";n_epochs=" << cfg.n_epochs << ";batch_size=" << cfg.batch_size
      << ";gae_lambda=" << format_double(cfg.gae_lambda)
      << ";gamma=" << format_double(cfg.gamma)
      << ";learning_rate=" << format_double(cfg.learning_rate)
      << ";max_grad_norm=" << format_double(cfg.max_grad_norm)
      << ";clip_range=" << format_double(cfg.clip_range)
      << ";c_vf=" << format_double(cfg.c_vf)
      << ";record_interval=" << cfg.record_interval
      << ";return_window=" << cfg.return_window << ";seed=" << seed;
  return out.str();
}

uint64_t config_hash(const ExperimentConfig& cfg, uint64_t seed) {
  return fnv1a(serialize_config(cfg, seed));
}

namespace {

RunRecord run_partial(const ExperimentConfig& cfg, uint64_t seed,
                      nn::ParamSet* final_params, std::exception_ptr& error) {
  RunRecord record;
  record.meta.algo = algo_name(cfg);
  record.meta.reg_coef = cfg.reg_coef;
  record.meta.seed = seed;
  record.meta.env_name = env::to_string(cfg.env.kind);
  record.meta.config_hash = config_hash(cfg, seed);

  try {
    cfg.validate();
    env::VecEnv venv(cfg.env, cfg.n_envs, splitmix64(seed ^ kEnvStream));
    nn::ParamSet params = nn::init_params(venv.obs_dim(), venv.action_count(),
                                          splitmix64(seed ^ kInitStream));
    nn::OptimizerState opt = nn::make_optimizer_state(params);
    Rng act_rng(seed ^ kActionStream);
    Rng shuffle_rng(seed ^ kShuffleStream);
    std::deque<double> window;

    const long steps_per_update =
        static_cast<long>(cfg.n_envs) * cfg.n_steps;
    const long n_updates = cfg.total_timesteps / steps_per_update;
    long global_step = 0;

    for (long u = 1; u <= n_updates; ++u) {
      rl::RolloutBuffer buffer =
          rl::collect(params, venv, cfg.n_steps, act_rng);
      for (double ret : venv.drain_completed_returns()) {
        window.push_back(ret);
        while (static_cast<int>(window.size()) > cfg.return_window)
          window.pop_front();
      }
      const std::vector<double> last = rl::last_values(params, venv);
      rl::compute_gae(buffer, last, cfg.gamma, cfg.gae_lambda);
      const rl::UpdateMetrics metrics =
          rl::update(params, opt, buffer, cfg.update_config(), shuffle_rng);
      global_step += steps_per_update;

      if (u % cfg.record_interval == 0) {
        RunRow row;
        row.step = global_step;
        row.return_mean = mean_of(window);
        row.entropy = metrics.entropy;
        row.disequilibrium = metrics.disequilibrium;
        row.complexity = metrics.complexity;
        row.policy_objective = metrics.clip_objective;
        row.value_loss = metrics.value_loss;
        row.clip_fraction = metrics.clip_fraction;
        row.approx_kl = metrics.approx_kl;
        record.rows.push_back(row);
      }
    }
    if (final_params != nullptr) *final_params = std::move(params);
  } catch (...) {
    error = std::current_exception();
  }
  return record;
}

}  // namespace

RunRecord run(const ExperimentConfig& cfg, uint64_t seed,
              nn::ParamSet* final_params) {
  std::exception_ptr error;
  RunRecord record = run_partial(cfg, seed, final_params, error);
  if (error) std::rethrow_exception(error);
  return record;
}

std::string run_filename(const ExperimentConfig& cfg, uint64_t seed) {
  std::string name = algo_name(cfg);
  if (cfg.regularizer != reg::RegularizerKind::None)
    name += "_c" + format_double(cfg.reg_coef);
  name += "_s" + std::to_string(seed) + ".csv";
  return name;
}

RunRecord run_and_save(const ExperimentConfig& cfg, uint64_t seed,
                       const std::string& out_dir,
                       nn::ParamSet* final_params) {
  fs::create_directories(out_dir);
  std::exception_ptr error;
  RunRecord record = run_partial(cfg, seed, final_params, error);
  const fs::path path = fs::path(out_dir) / run_filename(cfg, seed);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  write_csv(record, out);
  out.close();
  if (error) std::rethrow_exception(error);
  return record;
}

void write_csv(const RunRecord& record, std::ostream& out) {
  char hex[32];
  std::snprintf(hex, sizeof(hex), "%016llx",
                static_cast<unsigned long long>(record.meta.config_hash));
  out << "# config_hash=" << hex << "\n";
  out << "# algo=" << record.meta.algo
      << " reg_coef=" << format_double(record.meta.reg_coef)
      << " seed=" << record.meta.seed << " env=" << record.meta.env_name
      << "\n";
  out << "step,return_mean,entropy,disequilibrium,complexity,"
         "policy_objective,value_loss,clip_fraction,approx_kl\n";
  for (const auto& r : record.rows) {
    out << r.step << ',' << format_double(r.return_mean) << ','
        << format_double(r.entropy) << ',' << format_double(r.disequilibrium)
        << ',' << format_double(r.complexity) << ','
        << format_double(r.policy_objective) << ','
        << format_double(r.value_loss) << ','
        << format_double(r.clip_fraction) << ','
        << format_double(r.approx_kl) << "\n";
  }
}

std::string csv_string(const RunRecord& record) {
  std::ostringstream out;
  write_csv(record, out);
  return out.str();
}

RunRecord parse_csv(std::istream& in) {
  RunRecord record;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty()) continue;
    if (line[0] == '#') {
      for (const auto& token : split(line.substr(1), ' ')) {
        const auto kv = split(trim(token), '=');
        if (kv.size() != 2) continue;
        if (kv[0] == "config_hash")
          record.meta.config_hash = std::stoull(kv[1], nullptr, 16);
        else if (kv[0] == "algo")
          record.meta.algo = kv[1];
        else if (kv[0] == "reg_coef")
          record.meta.reg_coef = parse_double(kv[1]);
        else if (kv[0] == "seed")
          record.meta.seed = std::stoull(kv[1]);
        else if (kv[0] == "env")
          record.meta.env_name = kv[1];
      }
      continue;
    }
    if (!header_seen) {  // column header row
      header_seen = true;
      continue;
    }
    const auto cols = split(line, ',');
    if (cols.size() != 9)
      throw std::runtime_error("csv row must have 9 columns");
    RunRow r;
    r.step = std::stol(cols[0]);
    r.return_mean = parse_double(cols[1]);
    r.entropy = parse_double(cols[2]);
    r.disequilibrium = parse_double(cols[3]);
    r.complexity = parse_double(cols[4]);
    r.policy_objective = parse_double(cols[5]);
    r.value_loss = parse_double(cols[6]);
    r.clip_fraction = parse_double(cols[7]);
    r.approx_kl = parse_double(cols[8]);
    record.rows.push_back(r);
  }
  return record;
}

RunRecord load_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return parse_csv(in);
}

SweepSummary summarize(const std::vector<RunRecord>& records) {
  std::vector<SeedOutcome> outcomes;
  outcomes.reserve(records.size());
  for (const auto& r : records) outcomes.push_back(SeedOutcome{r, true, ""});
  return build_summary(outcomes);
}

const SweepCell* SweepSummary::find(const std::string& algo,
                                    double reg_coef) const {
  for (const auto& cell : cells)
    if (cell.algo == algo && cell.reg_coef == reg_coef) return &cell;
  return nullptr;
}

SweepSummary sweep(const SweepSpec& spec) {
  if (spec.algos.empty() || spec.seeds.empty())
    throw std::invalid_argument("sweep: algos and seeds must be non-empty");

  struct Job {
    ExperimentConfig cfg;
    uint64_t seed;
  };
  std::vector<Job> jobs;
  for (const auto& algo : spec.algos) {
    ExperimentConfig cfg = spec.base;
    if (algo == "ppo") {
      cfg.regularizer = reg::RegularizerKind::None;
      cfg.reg_coef = 0.0;
      for (uint64_t seed : spec.seeds) jobs.push_back({cfg, seed});
    } else if (algo == "ppo-ent" || algo == "cdpo") {
      if (spec.reg_coefs.empty())
        throw std::invalid_argument("sweep: reg_coefs must be non-empty");
      cfg.regularizer = algo == "cdpo" ? reg::RegularizerKind::Complexity
                                       : reg::RegularizerKind::Entropy;
      for (double coef : spec.reg_coefs) {
        cfg.reg_coef = coef;
        for (uint64_t seed : spec.seeds) jobs.push_back({cfg, seed});
      }
    } else {
      throw std::invalid_argument("sweep: unknown algorithm " + algo);
    }
  }

  std::vector<SeedOutcome> outcomes(jobs.size());
  std::atomic<size_t> next{0};
  const int workers = std::max(1, spec.workers);
  auto worker = [&]() {
    for (;;) {
      const size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      SeedOutcome& out = outcomes[i];
      try {
        out.record = spec.out_dir.empty()
                         ? run(jobs[i].cfg, jobs[i].seed)
                         : run_and_save(jobs[i].cfg, jobs[i].seed, spec.out_dir);
        out.ok = true;
      } catch (const std::exception& e) {
        out.ok = false;
        out.error = e.what();
        out.record.meta.algo = algo_name(jobs[i].cfg);
        out.record.meta.reg_coef = jobs[i].cfg.reg_coef;
        out.record.meta.seed = jobs[i].seed;
      }
    }
  };
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return build_summary(outcomes);
}

std::vector<RunRecord> load_run_dir(const std::string& dir) {
  std::vector<fs::path> paths;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".csv")
      paths.push_back(entry.path());
  std::sort(paths.begin(), paths.end());
  std::vector<RunRecord> records;
  for (const auto& p : paths) records.push_back(load_csv(p.string()));
  return records;
}

namespace {

using Section = std::map<std::string, std::string>;

std::map<std::string, Section> parse_ini(std::istream& in) {
  std::map<std::string, Section> sections;
  std::string line, current = "";
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    if (line.front() == '[' && line.back() == ']') {
      current = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config line is not key = value: " + line);
    sections[current][trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return sections;
}

template <typename F>
void with_key(const Section& s, const std::string& key, F&& f) {
  auto it = s.find(key);
  if (it != s.end()) f(it->second);
}

}  // namespace

SweepSpec load_sweep_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  auto sections = parse_ini(in);

  SweepSpec spec;
  ExperimentConfig& cfg = spec.base;
  const Section& env_s = sections["env"];
  with_key(env_s, "kind",
           [&](const std::string& v) { cfg.env.kind = env::env_kind_from_string(v); });
  with_key(env_s, "carts",
           [&](const std::string& v) { cfg.env.carts = std::stoi(v); });
  with_key(env_s, "gravity",
           [&](const std::string& v) { cfg.env.gravity = parse_double(v); });
  with_key(env_s, "spring_k",
           [&](const std::string& v) { cfg.env.spring_k = parse_double(v); });
  with_key(env_s, "damper_b",
           [&](const std::string& v) { cfg.env.damper_b = parse_double(v); });
  with_key(env_s, "max_episode_steps", [&](const std::string& v) {
    cfg.env.max_episode_steps = std::stoi(v);
  });
  with_key(env_s, "dt",
           [&](const std::string& v) { cfg.env.dt = parse_double(v); });
  with_key(env_s, "force_mag",
           [&](const std::string& v) { cfg.env.force_mag = parse_double(v); });

  const Section& train_s = sections["train"];
  with_key(train_s, "total_timesteps",
           [&](const std::string& v) { cfg.total_timesteps = std::stol(v); });
  with_key(train_s, "n_envs",
           [&](const std::string& v) { cfg.n_envs = std::stoi(v); });
  with_key(train_s, "n_steps",
           [&](const std::string& v) { cfg.n_steps = std::stoi(v); });
  with_key(train_s, "n_epochs",
           [&](const std::string& v) { cfg.n_epochs = std::stoi(v); });
  with_key(train_s, "batch_size",
           [&](const std::string& v) { cfg.batch_size = std::stoi(v); });
  with_key(train_s, "gae_lambda",
           [&](const std::string& v) { cfg.gae_lambda = parse_double(v); });
  with_key(train_s, "gamma",
           [&](const std::string& v) { cfg.gamma = parse_double(v); });
  with_key(train_s, "learning_rate",
           [&](const std::string& v) { cfg.learning_rate = parse_double(v); });
  with_key(train_s, "max_grad_norm",
           [&](const std::string& v) { cfg.max_grad_norm = parse_double(v); });
  with_key(train_s, "clip_range",
           [&](const std::string& v) { cfg.clip_range = parse_double(v); });
  with_key(train_s, "c_vf",
           [&](const std::string& v) { cfg.c_vf = parse_double(v); });
  with_key(train_s, "record_interval",
           [&](const std::string& v) { cfg.record_interval = std::stoi(v); });
  with_key(train_s, "return_window",
           [&](const std::string& v) { cfg.return_window = std::stoi(v); });

  const Section& sweep_s = sections["sweep"];
  with_key(sweep_s, "algos", [&](const std::string& v) {
    for (const auto& a : split(v, ',')) spec.algos.push_back(trim(a));
  });
  with_key(sweep_s, "reg_coefs", [&](const std::string& v) {
    for (const auto& c : split(v, ','))
      spec.reg_coefs.push_back(parse_double(trim(c)));
  });
  with_key(sweep_s, "seeds", [&](const std::string& v) {
    for (const auto& s : split(v, ','))
      spec.seeds.push_back(std::stoull(trim(s)));
  });
  with_key(sweep_s, "workers",
           [&](const std::string& v) { spec.workers = std::stoi(v); });
  with_key(sweep_s, "out", [&](const std::string& v) { spec.out_dir = v; });
  return spec;
}

void save_sweep_file(const SweepSpec& spec, std::ostream& out) {
  const ExperimentConfig& cfg = spec.base;
  out << "[env]\n";
  out << "kind = " << env::to_string(cfg.env.kind) << "\n";
  out << "carts = " << cfg.env.carts << "\n";
  out << "gravity = " << format_double(cfg.env.gravity) << "\n";
  out << "spring_k = " << format_double(cfg.env.spring_k) << "\n";
  out << "damper_b = " << format_double(cfg.env.damper_b) << "\n";
  out << "max_episode_steps = " << cfg.env.max_episode_steps << "\n";
  out << "dt = " << format_double(cfg.env.dt) << "\n";
  out << "force_mag = " << format_double(cfg.env.force_mag) << "\n";
  out << "\n[train]\n";
  out << "total_timesteps = " << cfg.total_timesteps << "\n";
  out << "n_envs = " << cfg.n_envs << "\n";
  out << "n_steps = " << cfg.n_steps << "\n";
  out << "n_epochs = " << cfg.n_epochs << "\n";
  out << "batch_size = " << cfg.batch_size << "\n";
  out << "gae_lambda = " << format_double(cfg.gae_lambda) << "\n";
  out << "gamma = " << format_double(cfg.gamma) << "\n";
  out << "learning_rate = " << format_double(cfg.learning_rate) << "\n";
  out << "max_grad_norm = " << format_double(cfg.max_grad_norm) << "\n";
  out << "clip_range = " << format_double(cfg.clip_range) << "\n";
  out << "c_vf = " << format_double(cfg.c_vf) << "\n";
  out << "record_interval = " << cfg.record_interval << "\n";
  out << "return_window = " << cfg.return_window << "\n";
  out << "\n[sweep]\n";
  out << "algos = ";
  for (size_t i = 0; i < spec.algos.size(); ++i)
    out << (i ? "," : "") << spec.algos[i];
  out << "\nreg_coefs = ";
  for (size_t i = 0; i < spec.reg_coefs.size(); ++i)
    out << (i ? "," : "") << format_double(spec.reg_coefs[i]);
  out << "\nseeds = ";
  for (size_t i = 0; i < spec.seeds.size(); ++i)
    out << (i ? "," : "") << spec.seeds[i];
  out << "\nworkers = " << spec.workers << "\n";
  out << "out = " << spec.out_dir << "\n";
}

void write_params(const nn::ParamSet& params, std::ostream& out) {
  out << "obs_dim " << params.obs_dim << "\n";
  out << "action_count " << params.action_count << "\n";
  out << "hidden " << params.hidden << "\n";
  auto dump = [&](const char* name, const std::vector<nn::DenseLayer>& trunk) {
    for (size_t i = 0; i < trunk.size(); ++i) {
      out << name << i << " " << trunk[i].out << " " << trunk[i].in << "\n";
      for (double v : trunk[i].w) out << format_double(v) << "\n";
      for (double v : trunk[i].b) out << format_double(v) << "\n";
    }
  };
  dump("policy", params.policy);
  dump("value", params.value);
}

}  // namespace cdpo::lab
