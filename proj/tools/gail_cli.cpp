// Command-line front end: run, eval and probe-linearization.

#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "gail/experiment.hpp"

namespace {

using gail::kExitConfig;
using gail::kExitNumerical;
using gail::kExitOk;

int cmd_run(const std::string& config, const gail::SpecOverrides& overrides,
            const std::string& sweep, int threads) {
  gail::ExperimentSpec spec;
  std::vector<std::uint64_t> seeds;
  try {
    spec = gail::load_spec(config, overrides);
    if (!sweep.empty()) seeds = gail::parse_sweep(sweep);
  } catch (const gail::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  if (seeds.empty()) return gail::run_experiment(spec, std::cerr);
  if (threads < 1) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  return gail::run_sweep(spec, seeds, threads, std::cerr);
}

int cmd_eval(const std::string& checkpoint, const std::string& config,
             const gail::SpecOverrides& overrides) {
  try {
    const gail::ExperimentSpec spec = gail::load_spec(config, overrides);
    std::ifstream in(checkpoint);
    if (!in) throw gail::ConfigError("cannot open checkpoint '" + checkpoint + "'");
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw gail::ConfigError("checkpoint '" + checkpoint + "': " + e.what());
    }
    std::cout << gail::evaluate_checkpoint(spec, doc).dump(2) << "\n";
    return kExitOk;
  } catch (const gail::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "evaluation failed: " << e.what() << "\n";
    return kExitNumerical;
  }
}

int cmd_probe(const std::vector<int>& widths, double radius, int seeds, int inputs,
              const std::string& env, const std::string& init) {
  try {
    const gail::BundledEnvironment bundled = gail::bundled_environment(env);
    const auto rows = gail::probe_linearization(bundled.mdp, widths, radius, seeds,
                                                inputs, gail::parse_init_scheme(init));
    std::cout << "m,mean_gap\n";
    for (const gail::ProbeRow& row : rows) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.17g", row.mean_gap);
      std::cout << row.width << "," << buf << "\n";
    }
    return kExitOk;
  } catch (const gail::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "probe failed: " << e.what() << "\n";
    return kExitNumerical;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Neural GAIL experiments on finite embedded MDPs"};
  app.require_subcommand(1);

  std::string config;
  std::string sweep;
  int threads = 0;
  gail::SpecOverrides overrides;
  std::uint64_t seed = 0;
  std::string out;
  int iterations = 0;
  int width = 0;
  int batch = 0;

  auto* run = app.add_subcommand("run", "train and write metrics, reports and checkpoint");
  run->add_option("--config", config, "TOML or JSON experiment config")->required();
  auto* seed_opt = run->add_option("--seed", seed, "run seed");
  auto* out_opt = run->add_option("--out", out, "output directory");
  auto* t_opt = run->add_option("--T", iterations, "GAIL iterations");
  auto* m_opt = run->add_option("--m", width, "network width");
  auto* n_opt = run->add_option("--N", batch, "batch size");
  run->add_option("--sweep", sweep, "seed range, e.g. seeds=0..4");
  run->add_option("--threads", threads, "sweep workers (default: all cores)");

  std::string checkpoint;
  std::string eval_config;
  auto* eval = app.add_subcommand("eval", "R-distance of a checkpoint's mixed policy");
  eval->add_option("--checkpoint", checkpoint, "checkpoint.json from a run")->required();
  eval->add_option("--config", eval_config, "config the run used")->required();
  std::uint64_t eval_seed = 0;
  auto* eval_seed_opt = eval->add_option("--seed", eval_seed, "seed the run used");

  std::vector<int> widths{64, 256, 1024, 4096};
  double radius = 1.0;
  int probe_seeds = 20;
  int probe_inputs = 256;
  std::string env = "grid3x3";
  std::string init = "symmetric";
  auto* probe = app.add_subcommand("probe-linearization",
                                   "linearization gap against network width");
  probe->add_option("--m-list", widths, "comma-separated widths")->delimiter(',');
  probe->add_option("--radius", radius, "ball radius B");
  probe->add_option("--seeds", probe_seeds, "init seeds per width");
  probe->add_option("--inputs", probe_inputs, "inputs per seed");
  probe->add_option("--env", env, "bundled environment supplying inputs");
  probe->add_option("--init", init, "standard or symmetric");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  if (run->parsed()) {
    if (*seed_opt) overrides.seed = seed;
    if (*out_opt) overrides.output_dir = out;
    if (*t_opt) overrides.iterations = iterations;
    if (*m_opt) overrides.width = width;
    if (*n_opt) overrides.batch_size = batch;
    return cmd_run(config, overrides, sweep, threads);
  }
  if (eval->parsed()) {
    if (*eval_seed_opt) overrides.seed = eval_seed;
    return cmd_eval(checkpoint, eval_config, overrides);
  }
  return cmd_probe(widths, radius, probe_seeds, probe_inputs, env, init);
}
