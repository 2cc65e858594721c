#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gail/experiment.hpp"
#include "support.hpp"

using namespace gail;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path kConfigs = GAIL_CONFIG_DIR;

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("gail_experiment_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream(path) << text;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentSpec small_spec() {
  ExperimentSpec spec;
  spec.mdp.name = "chain4";
  spec.expert.n_samples = 256;
  spec.gail.iterations = 8;
  spec.gail.width = 16;
  spec.gail.batch_size = 16;
  spec.gail.td.iterations = 50;
  spec.eval.n_restarts = 2;
  spec.eval.pga.steps = 50;
  return spec;
}

}  // namespace

TEST_CASE("TOML and JSON configs parse to the same settings") {
  const fs::path dir = scratch("parse");
  write_text(dir / "a.toml",
             "seed = 3\n[mdp]\nsource = \"generated\"\nn_states = 4\nseed = 9\n"
             "[gail]\niterations = 10\neta = 0.05\n[gail.td]\nalpha = 0.01\n"
             "[eval]\nradius_grid = [0.5, 1.0]\n");
  write_text(dir / "a.json",
             R"({"seed": 3, "mdp": {"source": "generated", "n_states": 4, "seed": 9},
                 "gail": {"iterations": 10, "eta": 0.05, "td": {"alpha": 0.01}},
                 "eval": {"radius_grid": [0.5, 1.0]}})");
  const ExperimentSpec t = load_spec(dir / "a.toml");
  const ExperimentSpec j = load_spec(dir / "a.json");
  CHECK(spec_to_json(t) == spec_to_json(j));
  CHECK(t.gail.seed == 3);
  CHECK(t.mdp.kind == MdpSourceKind::kGenerated);
  CHECK(t.mdp.generator.n_states == 4);
  CHECK(t.mdp.generator.seed == 9);
  CHECK(t.gail.eta == 0.05);
  CHECK(t.gail.td.alpha == 0.01);
  CHECK(t.eval.radius_grid == std::vector<double>{0.5, 1.0});
}

TEST_CASE("config errors") {
  const fs::path dir = scratch("errors");
  write_text(dir / "unknown.toml", "[gail]\nitertions = 5\n");
  CHECK_THROWS_AS(load_spec(dir / "unknown.toml"), ConfigError);
  write_text(dir / "syntax.toml", "[gail\n");
  CHECK_THROWS_AS(load_spec(dir / "syntax.toml"), ConfigError);
  write_text(dir / "type.toml", "[gail]\niterations = \"many\"\n");
  CHECK_THROWS_AS(load_spec(dir / "type.toml"), ConfigError);
  write_text(dir / "source.toml", "[mdp]\nsource = \"web\"\n");
  CHECK_THROWS_AS(load_spec(dir / "source.toml"), ConfigError);
  CHECK_THROWS_AS(load_spec(dir / "missing.toml"), ConfigError);

  ExperimentSpec spec = small_spec();
  spec.mdp.name = "maze";
  CHECK_THROWS_AS(spec.validate(), ConfigError);
  spec = small_spec();
  spec.mdp.kind = MdpSourceKind::kFile;
  spec.mdp.path = dir / "nope.json";
  CHECK_THROWS_AS(spec.validate(), ConfigError);
  spec = small_spec();
  spec.expert.temperature = 0.0;
  CHECK_THROWS_AS(spec.validate(), ConfigError);
  spec = small_spec();
  spec.eval.radius_grid = {1.0, -1.0};
  CHECK_THROWS_AS(spec.validate(), ConfigError);
}

TEST_CASE("flags override the file, the file overrides defaults") {
  const fs::path dir = scratch("precedence");
  write_text(dir / "c.toml", "seed = 4\n[gail]\niterations = 12\nwidth = 8\n");
  const ExperimentSpec file_only = load_spec(dir / "c.toml");
  CHECK(file_only.gail.iterations == 12);
  CHECK(file_only.gail.width == 8);
  CHECK(file_only.gail.batch_size == GailConfig{}.batch_size);

  SpecOverrides o;
  o.iterations = 20;
  o.seed = 9;
  o.batch_size = 4;
  const ExperimentSpec flagged = load_spec(dir / "c.toml", o);
  CHECK(flagged.gail.iterations == 20);
  CHECK(flagged.gail.seed == 9);
  CHECK(flagged.gail.batch_size == 4);
  CHECK(flagged.gail.width == 8);
}

TEST_CASE("echoed config reproduces the settings") {
  const ExperimentSpec spec = load_spec(kConfigs / "bundled_5state.toml");
  const json echo = spec_to_json(spec);
  CHECK(echo["gail"]["eta"] == 0.125);
  CHECK(echo["gail"]["radius_theta"] == 1.0);
  CHECK(spec_to_json(spec_from_json(echo)) == echo);
  // the default grid is the training radius
  ExperimentSpec plain = small_spec();
  CHECK(spec_to_json(plain)["eval"]["radius_grid"] == json::array({1.0}));
}

TEST_CASE("relative MDP paths resolve against the config file") {
  const fs::path dir = scratch("mdp_file");
  save_mdp(testing_support::random_mdp(3, 2, 3, 0.9, 1), dir / "env.json");
  write_text(dir / "f.toml", "[mdp]\nsource = \"file\"\npath = \"env.json\"\n");
  const ExperimentSpec spec = load_spec(dir / "f.toml");
  CHECK(spec.mdp.path == dir / "env.json");
  CHECK_NOTHROW(spec.validate());
  const Problem p = build_problem(spec);
  CHECK(p.mdp.n_states() == 3);
  CHECK(p.hidden_reward.rows() == 3);
}

TEST_CASE("bundled environments keep their own reward unless a seed is given") {
  ExperimentSpec spec = small_spec();
  CHECK(build_problem(spec).hidden_reward == bundled_environment("chain4").hidden_reward);
  spec.expert.reward_seed = 77;
  CHECK(build_problem(spec).hidden_reward == hidden_reward(4, 2, 77));
}

TEST_CASE("output directory resolution") {
  ExperimentSpec spec = small_spec();
  spec.gail.seed = 5;
  ::unsetenv("GAIL_OUTPUT_ROOT");
  CHECK(resolve_output_dir(spec) == fs::path("runs") / "seed-5");
  ::setenv("GAIL_OUTPUT_ROOT", "/tmp/root", 1);
  CHECK(resolve_output_dir(spec) == fs::path("/tmp/root/runs/seed-5"));
  spec.output_dir = "/abs/out";
  CHECK(resolve_output_dir(spec) == fs::path("/abs/out"));
  ::unsetenv("GAIL_OUTPUT_ROOT");
}

TEST_CASE("runs write five files and are reproducible") {
  const fs::path dir = scratch("run");
  ExperimentSpec spec = small_spec();
  spec.output_dir = dir / "a";
  std::ostringstream log;
  REQUIRE(run_experiment(spec, log) == kExitOk);
  for (const char* f : {"config.json", "metrics.csv", "rdistance.json", "summary.json",
                        "checkpoint.json"}) {
    CHECK(fs::is_regular_file(dir / "a" / f));
  }
  spec.output_dir = dir / "b";
  REQUIRE(run_experiment(spec, log) == kExitOk);
  CHECK(read_text(dir / "a" / "metrics.csv") == read_text(dir / "b" / "metrics.csv"));
  CHECK(read_text(dir / "a" / "rdistance.json") == read_text(dir / "b" / "rdistance.json"));

  const std::string csv = read_text(dir / "a" / "metrics.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 9);

  const json summary = json::parse(read_text(dir / "a" / "summary.json"));
  CHECK(summary["convergence"]["iterations"] == 8);
  CHECK(summary["hidden_reward_value"].contains("uniform"));

  const json ckpt = json::parse(read_text(dir / "a" / "checkpoint.json"));
  CHECK(ckpt["policy_history"].size() == 8);
  CHECK(evaluate_checkpoint(spec, ckpt) == json::parse(read_text(dir / "a" / "rdistance.json")));

  const GailState back = state_from_json(ckpt);
  CHECK(state_to_json(back) == ckpt);
  json broken = ckpt;
  broken["version"] = 2;
  CHECK_THROWS(state_from_json(broken));
}

TEST_CASE("invalid configs exit 2 and write nothing") {
  const fs::path dir = scratch("bad");
  ExperimentSpec spec = load_spec(kConfigs / "bad.toml");
  spec.output_dir = dir / "out";
  std::ostringstream log;
  CHECK(run_experiment(spec, log) == kExitConfig);
  CHECK(!fs::exists(dir / "out"));
  CHECK(log.str().find("config error") != std::string::npos);
}

TEST_CASE("sweeps") {
  CHECK(parse_sweep("seeds=3..5") == std::vector<std::uint64_t>{3, 4, 5});
  CHECK(parse_sweep("seeds=2..2") == std::vector<std::uint64_t>{2});
  CHECK_THROWS_AS(parse_sweep("seeds=5..3"), ConfigError);
  CHECK_THROWS_AS(parse_sweep("seed=1..2"), ConfigError);
  CHECK_THROWS_AS(parse_sweep("seeds=a..2"), ConfigError);
  CHECK_THROWS_AS(parse_sweep("seeds=1..2x"), ConfigError);

  const fs::path dir = scratch("sweep");
  ExperimentSpec spec = small_spec();
  spec.gail.iterations = 4;
  spec.output_dir = dir;
  std::ostringstream log;
  CHECK(run_sweep(spec, {0, 1, 2}, 2, log) == kExitOk);
  for (int s = 0; s < 3; ++s) {
    CHECK(fs::is_regular_file(dir / ("seed-" + std::to_string(s)) / "metrics.csv"));
  }
  // a threaded run matches a standalone run of the same seed
  ExperimentSpec single = spec;
  single.gail.seed = 1;
  single.output_dir = dir / "alone";
  CHECK(run_experiment(single, log) == kExitOk);
  CHECK(read_text(dir / "alone" / "metrics.csv") == read_text(dir / "seed-1" / "metrics.csv"));
}

TEST_CASE("derived streams are independent of each other") {
  Rng a = expert_stream(0);
  Rng b = training_stream(0);
  Rng c = eval_stream(0);
  CHECK(a() != b());
  CHECK(b() != c());
  Rng a2 = expert_stream(0);
  Rng a3 = expert_stream(0);
  CHECK(a2() == a3());
}

TEST_CASE("linearization probe over widths") {
  const FiniteEmbeddedMDP mdp = bundled_environment("chain4").mdp;
  const auto rows = probe_linearization(mdp, {16, 1024}, 1.0, 6, 64, InitScheme::kSymmetric);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].width == 16);
  CHECK(rows[1].mean_gap < rows[0].mean_gap);
  const auto zero = probe_linearization(mdp, {16}, 0.0, 2, 8, InitScheme::kSymmetric);
  CHECK(zero[0].mean_gap == 0.0);
  CHECK_THROWS_AS(probe_linearization(mdp, {16}, 1.0, 0, 8, InitScheme::kSymmetric), ConfigError);
}
