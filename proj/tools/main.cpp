#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "cdpo/envs.hpp"
#include "cdpo/experiment.hpp"
#include "cdpo/plot.hpp"
#include "cdpo/verification.hpp"

namespace fs = std::filesystem;
using namespace cdpo;

namespace {

struct TrainArgs {
  std::string env = "cartpole";
  int carts = 2;
  std::string algo = "ppo";
  std::string reg = "";
  double reg_coef = 0.0;
  uint64_t seed = 0;
  long timesteps = -1;
  std::string out = "runs";
  std::string config_file = "";
};

lab::ExperimentConfig build_config(const TrainArgs& args, CLI::App* cmd) {
  lab::ExperimentConfig cfg;
  if (!args.config_file.empty())
    cfg = lab::load_sweep_file(args.config_file).base;

  if (cmd->count("--env") || args.config_file.empty())
    cfg.env.kind = env::env_kind_from_string(args.env);
  if (cmd->count("--carts")) cfg.env.carts = args.carts;
  if (cmd->count("--timesteps"))
    cfg.total_timesteps = args.timesteps;
  else if (args.config_file.empty())
    cfg.total_timesteps =
        cfg.env.kind == env::EnvKind::CartPole ? 100000 : 300000;

  // --algo picks the family, --reg can override the regularizer within ppo
  std::string reg = args.reg;
  if (reg.empty()) reg = args.algo == "cdpo" ? "complexity" : "none";
  if (args.algo == "cdpo" && reg != "complexity")
    throw CLI::ValidationError("--algo cdpo uses --reg complexity");
  cfg.regularizer = reg::regularizer_from_string(reg);
  cfg.reg_coef =
      cfg.regularizer == reg::RegularizerKind::None ? 0.0 : args.reg_coef;
  return cfg;
}

int cmd_train(const TrainArgs& args, CLI::App* cmd) {
  lab::ExperimentConfig cfg = build_config(args, cmd);
  cfg.validate();
  std::cout << "training " << lab::algo_name(cfg) << " on "
            << env::to_string(cfg.env.kind) << " (seed " << args.seed << ", "
            << cfg.total_timesteps << " steps)\n";

  fs::create_directories(args.out);
  nn::ParamSet params;
  const lab::RunRecord record =
      lab::run_and_save(cfg, args.seed, args.out, &params);

  const fs::path csv = fs::path(args.out) / lab::run_filename(cfg, args.seed);
  fs::path params_path = csv;
  params_path.replace_extension(".params.txt");
  std::ofstream params_out(params_path, std::ios::binary);
  lab::write_params(params, params_out);

  std::cout << "wrote " << csv.string() << " and " << params_path.string()
            << "\n";
  if (!record.rows.empty())
    std::cout << "final mean return: "
              << lab::format_double(record.final_return()) << "\n";
  return 0;
}

int cmd_sweep(const std::string& config_file, const std::string& out_override,
              int workers_override) {
  lab::SweepSpec spec = lab::load_sweep_file(config_file);
  if (!out_override.empty()) spec.out_dir = out_override;
  if (workers_override > 0) spec.workers = workers_override;
  if (spec.out_dir.empty()) spec.out_dir = "runs";
  std::cout << "sweep: " << spec.algos.size() << " algorithms, "
            << spec.reg_coefs.size() << " coefficients, " << spec.seeds.size()
            << " seeds -> " << spec.out_dir << "\n";
  const lab::SweepSummary summary = lab::sweep(spec);
  for (const auto& cell : summary.cells) {
    std::cout << cell.algo;
    if (cell.reg_coef != 0.0)
      std::cout << " c=" << lab::format_double(cell.reg_coef);
    std::cout << ": final " << lab::format_double(cell.mean_final) << " +- "
              << lab::format_double(cell.stderr_final);
    if (cell.single_seed) std::cout << " (single seed, stderr 0 by convention)";
    int failed = 0;
    for (const auto& s : cell.seeds)
      if (!s.ok) failed += 1;
    if (failed > 0) std::cout << " [" << failed << " run(s) FAILED]";
    std::cout << "\n";
  }
  const std::string svg = lab::emit_plots(summary, spec.out_dir);
  std::cout << "wrote " << svg << "\n";
  return 0;
}

int cmd_plot(const std::string& in_dir, const std::string& out_dir) {
  const auto records = lab::load_run_dir(in_dir);
  if (records.empty()) {
    std::cerr << "no run CSVs found in " << in_dir << "\n";
    return 1;
  }
  const lab::SweepSummary summary = lab::summarize(records);
  const std::string svg = lab::emit_plots(summary, out_dir);
  std::cout << "wrote " << svg << "\n";
  return 0;
}

int cmd_verify() {
  const auto results = lab::run_verification_suite();
  bool all_pass = true;
  for (const auto& r : results) {
    std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << r.name << ": " << r.detail
              << "\n";
    all_pass = all_pass && r.pass;
  }
  return all_pass ? 0 : 1;
}

int cmd_env_dump(const std::string& env_name, int carts, uint64_t seed,
                 int steps, const std::string& out_path) {
  env::EnvConfig cfg;
  cfg.kind = env::env_kind_from_string(env_name);
  cfg.carts = carts;
  auto env_ptr = env::make_env(cfg, seed);
  Rng rng(seed ^ 0xd0d0ull);

  std::ofstream out(out_path, std::ios::binary);
  if (!out) {
    std::cerr << "cannot open " << out_path << "\n";
    return 1;
  }
  out << "step";
  for (int d = 0; d < env_ptr->obs_dim(); ++d) out << ",state" << d;
  out << ",action,reward\n";
  for (int t = 0; t < steps; ++t) {
    const int action = rng.uniform_int(env_ptr->action_count());
    const auto state = env_ptr->observation();
    const auto result = env_ptr->step(action);
    out << t;
    for (double v : state) out << ',' << lab::format_double(v);
    out << ',' << action << ',' << lab::format_double(result.reward) << "\n";
    if (result.terminated || result.truncated) env_ptr->reset();
  }
  std::cout << "wrote " << out_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"policy-gradient training lab (PPO / CDPO)"};
  app.require_subcommand(1);

  TrainArgs train_args;
  CLI::App* train = app.add_subcommand("train", "run one training experiment");
  train->add_option("--env", train_args.env, "cartpole | carterpillar");
  train->add_option("--carts", train_args.carts, "cart count (carterpillar)");
  train->add_option("--algo", train_args.algo, "ppo | cdpo");
  train->add_option("--reg", train_args.reg, "none | entropy | complexity");
  train->add_option("--c-reg", train_args.reg_coef,
                    "regularization coefficient");
  train->add_option("--seed", train_args.seed, "run seed");
  train->add_option("--timesteps", train_args.timesteps,
                    "total environment steps");
  train->add_option("--out", train_args.out, "output directory");
  train->add_option("--config", train_args.config_file,
                    "config file providing defaults (flags override)");

  std::string sweep_config, sweep_out;
  int sweep_workers = 0;
  CLI::App* sweep_cmd =
      app.add_subcommand("sweep", "coefficient x seed sweep from a config file");
  sweep_cmd->add_option("--config", sweep_config, "sweep config file")
      ->required();
  sweep_cmd->add_option("--out", sweep_out, "output directory override");
  sweep_cmd->add_option("--workers", sweep_workers, "worker thread override");

  std::string plot_in, plot_out;
  CLI::App* plot_cmd =
      app.add_subcommand("plot", "render learning curves from run CSVs");
  plot_cmd->add_option("--in", plot_in, "directory of run CSVs")->required();
  plot_cmd->add_option("--out", plot_out, "output directory")->required();

  app.add_subcommand("verify",
                     "run the regularizer/gradient/stationarity suites");

  std::string dump_env = "cartpole", dump_out = "trajectory.csv";
  int dump_carts = 2, dump_steps = 500;
  uint64_t dump_seed = 0;
  CLI::App* dump_cmd = app.add_subcommand(
      "env-dump", "dump a random-action trajectory as CSV (debug)");
  dump_cmd->add_option("--env", dump_env, "cartpole | carterpillar");
  dump_cmd->add_option("--carts", dump_carts, "cart count (carterpillar)");
  dump_cmd->add_option("--seed", dump_seed, "environment seed");
  dump_cmd->add_option("--steps", dump_steps, "steps to record");
  dump_cmd->add_option("--out", dump_out, "output CSV path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("train")) return cmd_train(train_args, train);
    if (app.got_subcommand("sweep"))
      return cmd_sweep(sweep_config, sweep_out, sweep_workers);
    if (app.got_subcommand("plot")) return cmd_plot(plot_in, plot_out);
    if (app.got_subcommand("verify")) return cmd_verify();
    if (app.got_subcommand("env-dump"))
      return cmd_env_dump(dump_env, dump_carts, dump_seed, dump_steps,
                          dump_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
