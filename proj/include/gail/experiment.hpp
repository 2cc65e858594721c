#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gail/environments.hpp"
#include "gail/eval.hpp"

namespace gail {

enum class MdpSourceKind { kBundled, kFile, kGenerated };

struct MdpSource {
  MdpSourceKind kind = MdpSourceKind::kBundled;
  std::string name = "grid3x3";  ///< bundled environment name
  std::filesystem::path path;    ///< MDP JSON file
  GeneratorParams generator;
};

struct ExpertSpec {
  /// Seed of the hidden reward. Bundled environments carry their own frozen
  /// reward, which is used unless this is set.
  std::optional<std::uint64_t> reward_seed;
  double temperature = 0.05;
  double vi_tolerance = 1e-10;
  int n_samples = 4096;  ///< T_E
};

struct EvalSpec {
  int n_restarts = 4;
  std::vector<double> radius_grid;  ///< empty means {B_β}
  PgaConfig pga;
};

struct ExperimentSpec {
  MdpSource mdp;
  ExpertSpec expert;
  GailConfig gail;
  EvalSpec eval;
  std::filesystem::path output_dir;

  /// Throws ConfigError on the first invalid field.
  void validate() const;
};

/// Command-line values that take precedence over the config file.
struct SpecOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> output_dir;
  std::optional<int> iterations;
  std::optional<int> width;
  std::optional<int> batch_size;
};

/// Reads a TOML or JSON (by extension) config. Relative MDP paths resolve
/// against the config's directory. Unknown keys are rejected.
nlohmann::json read_config_document(const std::filesystem::path& path);
ExperimentSpec spec_from_json(const nlohmann::json& doc,
                              const std::filesystem::path& base_dir = {});
ExperimentSpec load_spec(const std::filesystem::path& path,
                         const SpecOverrides& overrides = {});
void apply_overrides(ExperimentSpec& spec, const SpecOverrides& overrides);

/// Every effective parameter, defaults included. Feeding it back through
/// spec_from_json reproduces the spec.
nlohmann::json spec_to_json(const ExperimentSpec& spec);

/// Output directory after applying GAIL_OUTPUT_ROOT to relative paths. An
/// empty output_dir becomes runs/seed-<seed>.
std::filesystem::path resolve_output_dir(const ExperimentSpec& spec);

/// The MDP, hidden reward and expert an ExperimentSpec describes.
struct Problem {
  FiniteEmbeddedMDP mdp;
  MatrixXd hidden_reward;
  TabularPolicy expert;
};

Problem build_problem(const ExperimentSpec& spec);

/// Independent random streams derived from the run seed.
Rng expert_stream(std::uint64_t seed);
Rng training_stream(std::uint64_t seed);
Rng eval_stream(std::uint64_t seed);

/// In-memory outputs of one run.
struct ExperimentOutputs {
  nlohmann::json config;
  std::string metrics_csv;
  nlohmann::json rdistance;
  nlohmann::json summary;
  nlohmann::json checkpoint;
};

ExperimentOutputs compute_experiment(const ExperimentSpec& spec);

/// Writes config.json, metrics.csv, rdistance.json, summary.json and
/// checkpoint.json into `dir`, creating it if needed.
void write_outputs(const ExperimentOutputs& outputs,
                   const std::filesystem::path& dir);

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

/// Validates, runs and writes. Nothing is written unless the run finishes.
/// Messages go to `log`.
int run_experiment(const ExperimentSpec& spec, std::ostream& log);

/// Parses "seeds=a..b".
std::vector<std::uint64_t> parse_sweep(const std::string& text);

/// One isolated run per seed in <out>/seed-<s>, spread over `threads`
/// workers. Returns the largest exit code.
int run_sweep(const ExperimentSpec& base, const std::vector<std::uint64_t>& seeds,
              int threads, std::ostream& log);

/// Checkpoint document: the shared init, final θ/τ/β/ω and the policy
/// history that defines the mixed policy.
nlohmann::json state_to_json(const GailState& state);
GailState state_from_json(const nlohmann::json& doc);

/// R-distance of the checkpoint's mixed policy against the configured expert.
nlohmann::json evaluate_checkpoint(const ExperimentSpec& spec,
                                   const nlohmann::json& checkpoint);

struct ProbeRow {
  int width = 0;
  double mean_gap = 0.0;
};

/// linearization_probe averaged over `n_seeds` fresh initializations per
/// width, with inputs drawn from the MDP's embedded points. Init seeds are
/// 0..n_seeds-1, so every width sees the same seed set.
std::vector<ProbeRow> probe_linearization(const FiniteEmbeddedMDP& mdp,
                                          const std::vector<int>& widths,
                                          double radius, int n_seeds,
                                          int n_inputs, InitScheme scheme);

}  // namespace gail
