#include "gail/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <toml.hpp>

namespace gail {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const char* kind_name(MdpSourceKind kind) {
  switch (kind) {
    case MdpSourceKind::kBundled: return "bundled";
    case MdpSourceKind::kFile: return "file";
    case MdpSourceKind::kGenerated: return "generated";
  }
  return "bundled";
}

MdpSourceKind parse_kind(const std::string& name) {
  if (name == "bundled") return MdpSourceKind::kBundled;
  if (name == "file") return MdpSourceKind::kFile;
  if (name == "generated") return MdpSourceKind::kGenerated;
  throw ConfigError("unknown mdp source '" + name + "'");
}

void require_object(const json& doc, const std::string& where) {
  if (!doc.is_object()) throw ConfigError("'" + where + "' must be a table");
}

void reject_unknown(const json& doc, std::initializer_list<const char*> allowed,
                    const std::string& where) {
  for (const auto& item : doc.items()) {
    const bool known = std::any_of(allowed.begin(), allowed.end(),
                                   [&](const char* k) { return item.key() == k; });
    if (!known) {
      throw ConfigError("unknown key '" + item.key() + "' in [" + where + "]");
    }
  }
}

template <typename T>
void read(const json& doc, const char* key, T& out) {
  if (!doc.contains(key)) return;
  const json& v = doc.at(key);
  if constexpr (std::is_same_v<T, bool>) {
    if (!v.is_boolean()) throw ConfigError(std::string(key) + " must be a boolean");
  } else if constexpr (std::is_integral_v<T>) {
    if (!v.is_number_integer()) throw ConfigError(std::string(key) + " must be an integer");
    if (std::is_unsigned_v<T> && !v.is_number_unsigned() && v.get<long long>() < 0) {
      throw ConfigError(std::string(key) + " must be nonnegative");
    }
  } else if constexpr (std::is_floating_point_v<T>) {
    if (!v.is_number()) throw ConfigError(std::string(key) + " must be a number");
  } else {
    if (!v.is_string()) throw ConfigError(std::string(key) + " must be a string");
  }
  out = v.get<T>();
}

const json& section(const json& doc, const char* key) {
  static const json empty = json::object();
  if (!doc.contains(key)) return empty;
  require_object(doc.at(key), key);
  return doc.at(key);
}

}  // namespace

void ExperimentSpec::validate() const {
  switch (mdp.kind) {
    case MdpSourceKind::kBundled: {
      const auto names = bundled_names();
      if (std::find(names.begin(), names.end(), mdp.name) == names.end()) {
        throw ConfigError("unknown bundled environment '" + mdp.name + "'");
      }
      break;
    }
    case MdpSourceKind::kFile:
      if (mdp.path.empty() || !fs::is_regular_file(mdp.path)) {
        throw ConfigError("mdp file '" + mdp.path.string() + "' does not exist");
      }
      break;
    case MdpSourceKind::kGenerated: {
      const GeneratorParams& g = mdp.generator;
      if (g.n_states < 1 || g.n_actions < 1 || g.dim < 1) {
        throw ConfigError("generator sizes must be positive");
      }
      if (!(g.gamma > 0.0 && g.gamma < 1.0)) {
        throw ConfigError("generator gamma must lie in (0, 1)");
      }
      if (!(g.mixing >= 0.0 && g.mixing <= 1.0)) {
        throw ConfigError("generator mixing must lie in [0, 1]");
      }
      break;
    }
  }
  if (!(expert.temperature > 0.0)) throw ConfigError("expert temperature must be > 0");
  if (!(expert.vi_tolerance > 0.0)) throw ConfigError("value-iteration tolerance must be > 0");
  if (expert.n_samples < 1) throw ConfigError("expert sample count T_E must be >= 1");
  gail.validate();
  if (!(gail.resolved_radius_theta() >= 0.0)) throw ConfigError("B_theta must be >= 0");
  if (eval.n_restarts < 1) throw ConfigError("eval n_restarts must be >= 1");
  for (double b : eval.radius_grid) {
    if (!(b >= 0.0) || !std::isfinite(b)) throw ConfigError("eval radii must be >= 0");
  }
  if (eval.pga.steps < 0) throw ConfigError("pga steps must be >= 0");
  if (!(eval.pga.step_scale > 0.0)) throw ConfigError("pga step_scale must be > 0");
}

json read_config_document(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  if (path.extension() == ".json") {
    try {
      return json::parse(in);
    } catch (const json::exception& e) {
      throw ConfigError("config '" + path.string() + "': " + e.what());
    }
  }
  try {
    const toml::table table = toml::parse(in, path.string());
    std::ostringstream text;
    text << toml::json_formatter{table};
    return json::parse(text.str());
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << "config '" << path.string() << "': " << e.description() << " at line "
        << e.source().begin.line;
    throw ConfigError(msg.str());
  }
}

ExperimentSpec spec_from_json(const json& doc, const fs::path& base_dir) {
  require_object(doc, "root");
  reject_unknown(doc, {"seed", "output_dir", "mdp", "expert", "gail", "eval"}, "root");
  ExperimentSpec spec;
  try {
    read(doc, "seed", spec.gail.seed);
    std::string out;
    read(doc, "output_dir", out);
    spec.output_dir = out;

    const json& m = section(doc, "mdp");
    reject_unknown(m, {"source", "name", "path", "n_states", "n_actions", "d",
                       "gamma", "mixing", "seed"},
                   "mdp");
    std::string source = kind_name(spec.mdp.kind);
    read(m, "source", source);
    spec.mdp.kind = parse_kind(source);
    read(m, "name", spec.mdp.name);
    std::string path;
    read(m, "path", path);
    if (!path.empty()) {
      spec.mdp.path = fs::path(path).is_relative() && !base_dir.empty()
                          ? base_dir / path
                          : fs::path(path);
    }
    GeneratorParams& g = spec.mdp.generator;
    read(m, "n_states", g.n_states);
    read(m, "n_actions", g.n_actions);
    read(m, "d", g.dim);
    read(m, "gamma", g.gamma);
    read(m, "mixing", g.mixing);
    read(m, "seed", g.seed);

    const json& e = section(doc, "expert");
    reject_unknown(e, {"reward_seed", "temperature", "vi_tolerance", "n_samples"},
                   "expert");
    if (e.contains("reward_seed")) {
      std::uint64_t seed = 0;
      read(e, "reward_seed", seed);
      spec.expert.reward_seed = seed;
    }
    read(e, "temperature", spec.expert.temperature);
    read(e, "vi_tolerance", spec.expert.vi_tolerance);
    read(e, "n_samples", spec.expert.n_samples);

    const json& gl = section(doc, "gail");
    reject_unknown(gl, {"iterations", "eta", "batch_size", "lambda", "radius_theta",
                        "radius_beta", "width", "init", "regularizer",
                        "delta_ball_center", "theta_update_frame", "td", "npg"},
                   "gail");
    GailConfig& c = spec.gail;
    read(gl, "iterations", c.iterations);
    read(gl, "eta", c.eta);
    read(gl, "batch_size", c.batch_size);
    read(gl, "lambda", c.lambda);
    read(gl, "radius_theta", c.radius_theta);
    read(gl, "radius_beta", c.radius_beta);
    read(gl, "width", c.width);
    std::string name = to_string(c.init);
    read(gl, "init", name);
    c.init = parse_init_scheme(name);
    name = to_string(c.regularizer);
    read(gl, "regularizer", name);
    c.regularizer = parse_regularizer(name);
    name = to_string(c.delta_center);
    read(gl, "delta_ball_center", name);
    c.delta_center = parse_delta_center(name);
    name = to_string(c.theta_frame);
    read(gl, "theta_update_frame", name);
    c.theta_frame = parse_theta_frame(name);

    const json& td = section(gl, "td");
    reject_unknown(td, {"iterations", "alpha", "radius", "burn_in", "sampling"},
                   "gail.td");
    read(td, "iterations", c.td.iterations);
    read(td, "alpha", c.td.alpha);
    read(td, "radius", c.td.radius);
    read(td, "burn_in", c.td.burn_in);
    name = to_string(c.td.sampling);
    read(td, "sampling", name);
    c.td.sampling = parse_td_sampling(name);

    const json& npg = section(gl, "npg");
    reject_unknown(npg, {"inner_iterations", "power_iterations", "ridge",
                         "cr_max_iterations", "cr_tolerance"},
                   "gail.npg");
    read(npg, "inner_iterations", c.npg.inner_iterations);
    read(npg, "power_iterations", c.npg.power_iterations);
    read(npg, "ridge", c.npg.ridge);
    read(npg, "cr_max_iterations", c.npg.cr_max_iterations);
    read(npg, "cr_tolerance", c.npg.cr_tolerance);

    const json& ev = section(doc, "eval");
    reject_unknown(ev, {"n_restarts", "radius_grid", "pga_steps", "pga_step_scale"},
                   "eval");
    read(ev, "n_restarts", spec.eval.n_restarts);
    if (ev.contains("radius_grid")) {
      const json& grid = ev.at("radius_grid");
      if (!grid.is_array()) throw ConfigError("radius_grid must be an array");
      for (const json& b : grid) {
        if (!b.is_number()) throw ConfigError("radius_grid entries must be numbers");
        spec.eval.radius_grid.push_back(b.get<double>());
      }
    }
    read(ev, "pga_steps", spec.eval.pga.steps);
    read(ev, "pga_step_scale", spec.eval.pga.step_scale);
  } catch (const json::exception& ex) {
    throw ConfigError(std::string("config: ") + ex.what());
  }
  return spec;
}

void apply_overrides(ExperimentSpec& spec, const SpecOverrides& o) {
  if (o.seed) spec.gail.seed = *o.seed;
  if (o.output_dir) spec.output_dir = *o.output_dir;
  if (o.iterations) spec.gail.iterations = *o.iterations;
  if (o.width) spec.gail.width = *o.width;
  if (o.batch_size) spec.gail.batch_size = *o.batch_size;
}

ExperimentSpec load_spec(const fs::path& path, const SpecOverrides& overrides) {
  ExperimentSpec spec = spec_from_json(read_config_document(path), path.parent_path());
  apply_overrides(spec, overrides);
  return spec;
}

json spec_to_json(const ExperimentSpec& spec) {
  const GailConfig& c = spec.gail;
  const GeneratorParams& g = spec.mdp.generator;
  json doc;
  doc["seed"] = c.seed;
  doc["output_dir"] = spec.output_dir.string();
  doc["mdp"] = {{"source", kind_name(spec.mdp.kind)},
                {"name", spec.mdp.name},
                {"path", spec.mdp.path.string()},
                {"n_states", g.n_states},
                {"n_actions", g.n_actions},
                {"d", g.dim},
                {"gamma", g.gamma},
                {"mixing", g.mixing},
                {"seed", g.seed}};
  doc["expert"] = {{"temperature", spec.expert.temperature},
                   {"vi_tolerance", spec.expert.vi_tolerance},
                   {"n_samples", spec.expert.n_samples}};
  if (spec.expert.reward_seed) doc["expert"]["reward_seed"] = *spec.expert.reward_seed;
  doc["gail"] = {{"iterations", c.iterations},
                 {"eta", c.resolved_eta()},
                 {"batch_size", c.batch_size},
                 {"lambda", c.lambda},
                 {"radius_theta", c.resolved_radius_theta()},
                 {"radius_beta", c.radius_beta},
                 {"width", c.width},
                 {"init", to_string(c.init)},
                 {"regularizer", to_string(c.regularizer)},
                 {"delta_ball_center", to_string(c.delta_center)},
                 {"theta_update_frame", to_string(c.theta_frame)}};
  doc["gail"]["td"] = {{"iterations", c.td.iterations},
                       {"alpha", c.td.alpha},
                       {"radius", c.td.radius},
                       {"burn_in", c.td.burn_in},
                       {"sampling", to_string(c.td.sampling)}};
  doc["gail"]["npg"] = {{"inner_iterations", c.npg.inner_iterations},
                        {"power_iterations", c.npg.power_iterations},
                        {"ridge", c.npg.ridge},
                        {"cr_max_iterations", c.npg.cr_max_iterations},
                        {"cr_tolerance", c.npg.cr_tolerance}};
  std::vector<double> grid = spec.eval.radius_grid;
  if (grid.empty()) grid.push_back(c.radius_beta);
  doc["eval"] = {{"n_restarts", spec.eval.n_restarts},
                 {"radius_grid", grid},
                 {"pga_steps", spec.eval.pga.steps},
                 {"pga_step_scale", spec.eval.pga.step_scale}};
  return doc;
}

fs::path resolve_output_dir(const ExperimentSpec& spec) {
  fs::path dir = spec.output_dir;
  if (dir.empty()) dir = fs::path("runs") / ("seed-" + std::to_string(spec.gail.seed));
  if (dir.is_relative()) {
    if (const char* root = std::getenv("GAIL_OUTPUT_ROOT"); root != nullptr && *root) {
      dir = fs::path(root) / dir;
    }
  }
  return dir;
}

Problem build_problem(const ExperimentSpec& spec) {
  std::optional<FiniteEmbeddedMDP> mdp;
  MatrixXd reward;
  switch (spec.mdp.kind) {
    case MdpSourceKind::kBundled: {
      BundledEnvironment env = bundled_environment(spec.mdp.name);
      mdp.emplace(std::move(env.mdp));
      reward = std::move(env.hidden_reward);
      break;
    }
    case MdpSourceKind::kFile:
      try {
        mdp.emplace(load_mdp(spec.mdp.path));
      } catch (const std::invalid_argument& e) {
        throw ConfigError("mdp file '" + spec.mdp.path.string() + "': " + e.what());
      } catch (const nlohmann::json::exception& e) {
        throw ConfigError("mdp file '" + spec.mdp.path.string() + "': " + e.what());
      }
      break;
    case MdpSourceKind::kGenerated:
      try {
        mdp.emplace(generate_mdp(spec.mdp.generator));
      } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("generated mdp: ") + e.what());
      }
      break;
  }
  if (spec.expert.reward_seed || reward.size() == 0) {
    reward = hidden_reward(mdp->n_states(), mdp->n_actions(),
                           spec.expert.reward_seed.value_or(spec.mdp.generator.seed));
  }
  TabularPolicy expert =
      make_expert(*mdp, reward, spec.expert.temperature, spec.expert.vi_tolerance);
  return Problem{std::move(*mdp), std::move(reward), std::move(expert)};
}

namespace {

Rng derived_stream(std::uint64_t seed, std::uint32_t tag) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32), tag};
  return Rng(seq);
}

// Mixed policy and iteration-0 policy against the expert for every radius.
json rdistance_document(const ExperimentSpec& spec, const Problem& problem,
                        const TwoLayerNet& init, const MixedPolicy& mixed) {
  const FiniteEmbeddedMDP& mdp = problem.mdp;
  const MatrixXd expert_nu = exact_visitation(mdp, problem.expert).pair;
  const MatrixXd mixed_nu = mixed_visitation(mixed, mdp);
  const MatrixXd initial_nu =
      exact_visitation(mdp, policy_as_table(mixed.components.front(), mdp)).pair;
  std::vector<double> grid = spec.eval.radius_grid;
  if (grid.empty()) grid.push_back(spec.gail.radius_beta);

  Rng rng = eval_stream(spec.gail.seed);
  json entries = json::array();
  for (double radius : grid) {
    const RDistanceReport m = r_distance_from_visitation(
        mdp, expert_nu, mixed_nu, radius, init, spec.eval.n_restarts, rng, spec.eval.pga);
    const RDistanceReport i = r_distance_from_visitation(
        mdp, expert_nu, initial_nu, radius, init, spec.eval.n_restarts, rng,
        spec.eval.pga);
    entries.push_back({{"radius_beta", radius},
                       {"mixed_policy", report_to_json(m)},
                       {"initial_policy", report_to_json(i)}});
  }
  return {{"n_components", mixed.components.size()}, {"entries", entries}};
}

MixedPolicy mixed_from_history(const GailState& state) {
  MixedPolicy mp;
  for (const PolicySnapshot& snap : state.policy_history) {
    mp.components.emplace_back(state.init.with_weights(snap.theta), snap.tau);
  }
  return mp;
}

void check_finite(const RunMetrics& metrics) {
  for (const MetricsRow& row : metrics) {
    const bool ok = std::isfinite(row.tau) && std::isfinite(row.j_pi_r) &&
                    std::isfinite(row.j_expert_r) &&
                    std::isfinite(row.grad_theta_norm) &&
                    std::isfinite(row.grad_beta_norm);
    if (!ok) {
      throw NumericalError("non-finite metrics at iteration " + std::to_string(row.k));
    }
  }
}

void write_file(const fs::path& path, const std::string& text) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
    out << text;
    if (!out) throw std::runtime_error("failed writing '" + tmp.string() + "'");
  }
  fs::rename(tmp, path);
}

}  // namespace

Rng expert_stream(std::uint64_t seed) { return derived_stream(seed, 1); }
Rng training_stream(std::uint64_t seed) { return derived_stream(seed, 2); }
Rng eval_stream(std::uint64_t seed) { return derived_stream(seed, 3); }

json state_to_json(const GailState& state) {
  json history = json::array();
  for (const PolicySnapshot& snap : state.policy_history) {
    history.push_back({{"tau", snap.tau}, {"theta", to_std(snap.theta)}});
  }
  return {{"format", "gail-state"},
          {"version", 1},
          {"init", net_to_json(state.init.with_weights(state.init.anchor()))},
          {"k", state.k},
          {"tau", state.tau},
          {"theta", to_std(state.theta)},
          {"beta", to_std(state.beta)},
          {"omega", to_std(state.omega)},
          {"ball_violations", state.ball_violations},
          {"policy_history", history}};
}

GailState state_from_json(const json& doc) {
  if (doc.value("format", "") != "gail-state" || doc.value("version", 0) != 1) {
    throw std::invalid_argument("not a version-1 gail-state checkpoint");
  }
  GailState state = GailState::initial(net_from_json(doc.at("init")));
  const auto p = state.init.num_params();
  auto vec = [&](const json& v) {
    VectorXd out = from_std(v.get<std::vector<double>>());
    if (out.size() != p) throw std::invalid_argument("checkpoint vector has wrong length");
    return out;
  };
  state.k = doc.at("k").get<int>();
  state.tau = doc.at("tau").get<double>();
  state.theta = vec(doc.at("theta"));
  state.beta = vec(doc.at("beta"));
  state.omega = vec(doc.at("omega"));
  state.ball_violations = doc.at("ball_violations").get<int>();
  for (const json& snap : doc.at("policy_history")) {
    state.policy_history.push_back({vec(snap.at("theta")), snap.at("tau").get<double>()});
  }
  return state;
}

ExperimentOutputs compute_experiment(const ExperimentSpec& spec) {
  spec.validate();
  const Problem problem = build_problem(spec);
  const FiniteEmbeddedMDP& mdp = problem.mdp;

  Rng expert_rng = expert_stream(spec.gail.seed);
  const std::vector<StateAction> data =
      generate_expert_trajectory(mdp, problem.expert, spec.expert.n_samples, expert_rng);

  Rng train_rng = training_stream(spec.gail.seed);
  const GailResult result = run_gail(mdp, data, spec.gail, train_rng, &problem.expert);
  check_finite(result.metrics);

  ExperimentOutputs out;
  out.config = spec_to_json(spec);
  out.config["output_dir"] = resolve_output_dir(spec).string();
  out.metrics_csv = metrics_csv(result.metrics);
  out.rdistance = rdistance_document(spec, problem, result.final_state.init,
                                     mixed_from_history(result.final_state));

  json summary;
  if (result.metrics.size() >= 8) {
    summary["convergence"] = summary_to_json(convergence_summary(result.metrics));
  } else {
    summary["convergence"] = nullptr;
  }
  const TabularPolicy uniform = TabularPolicy::uniform(mdp.n_states(), mdp.n_actions());
  summary["hidden_reward_value"] = {
      {"expert", exact_J(mdp, problem.expert, problem.hidden_reward)},
      {"mixed_policy", mixed_policy_value(result.policy, mdp, problem.hidden_reward)},
      {"final_policy",
       exact_J(mdp, policy_as_table(result.final_state.policy(), mdp),
               problem.hidden_reward)},
      {"uniform", exact_J(mdp, uniform, problem.hidden_reward)}};
  summary["final_kl_to_expert"] = result.metrics.back().kl_to_expert;
  summary["ball_violations"] = result.final_state.ball_violations;
  out.summary = summary;

  out.checkpoint = state_to_json(result.final_state);
  return out;
}

void write_outputs(const ExperimentOutputs& outputs, const fs::path& dir) {
  fs::create_directories(dir);
  write_file(dir / "config.json", outputs.config.dump(2) + "\n");
  write_file(dir / "metrics.csv", outputs.metrics_csv);
  write_file(dir / "rdistance.json", outputs.rdistance.dump(2) + "\n");
  write_file(dir / "summary.json", outputs.summary.dump(2) + "\n");
  write_file(dir / "checkpoint.json", outputs.checkpoint.dump() + "\n");
}

int run_experiment(const ExperimentSpec& spec, std::ostream& log) {
  ExperimentOutputs outputs;
  try {
    outputs = compute_experiment(spec);
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    log << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  }
  const fs::path dir = resolve_output_dir(spec);
  try {
    write_outputs(outputs, dir);
  } catch (const std::exception& e) {
    log << "cannot write outputs to '" << dir.string() << "': " << e.what() << "\n";
    return kExitConfig;
  }
  log << "wrote " << dir.string() << "\n";
  return kExitOk;
}

std::vector<std::uint64_t> parse_sweep(const std::string& text) {
  const std::string prefix = "seeds=";
  const auto dots = text.find("..");
  if (text.rfind(prefix, 0) != 0 || dots == std::string::npos) {
    throw ConfigError("sweep must look like seeds=a..b");
  }
  std::uint64_t lo = 0;
  std::uint64_t hi = 0;
  try {
    std::size_t used = 0;
    const std::string a = text.substr(prefix.size(), dots - prefix.size());
    const std::string b = text.substr(dots + 2);
    lo = std::stoull(a, &used);
    if (used != a.size()) throw std::invalid_argument(a);
    hi = std::stoull(b, &used);
    if (used != b.size()) throw std::invalid_argument(b);
  } catch (const std::logic_error&) {
    throw ConfigError("sweep bounds must be nonnegative integers");
  }
  if (hi < lo) throw ConfigError("sweep range is empty");
  if (hi - lo >= 100000) throw ConfigError("sweep range is too large");
  std::vector<std::uint64_t> seeds;
  for (std::uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
  return seeds;
}

int run_sweep(const ExperimentSpec& base, const std::vector<std::uint64_t>& seeds,
              int threads, std::ostream& log) {
  const fs::path root = base.output_dir.empty() ? fs::path("runs") : base.output_dir;
  std::mutex log_mutex;
  std::vector<int> codes(seeds.size(), kExitOk);
  std::size_t next = 0;
  std::mutex queue_mutex;

  auto worker = [&] {
    for (;;) {
      std::size_t job = 0;
      {
        std::lock_guard lock(queue_mutex);
        if (next >= seeds.size()) return;
        job = next++;
      }
      ExperimentSpec spec = base;
      spec.gail.seed = seeds[job];
      spec.output_dir = root / ("seed-" + std::to_string(seeds[job]));
      std::ostringstream local;
      codes[job] = run_experiment(spec, local);
      std::lock_guard lock(log_mutex);
      log << "[seed " << seeds[job] << "] " << local.str();
    }
  };

  const int n = std::max(1, std::min<int>(threads, static_cast<int>(seeds.size())));
  std::vector<std::thread> pool;
  for (int t = 0; t < n; ++t) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();
  return codes.empty() ? kExitOk : *std::max_element(codes.begin(), codes.end());
}

json evaluate_checkpoint(const ExperimentSpec& spec, const json& checkpoint) {
  spec.validate();
  const Problem problem = build_problem(spec);
  const GailState state = state_from_json(checkpoint);
  if (state.init.input_dim() != problem.mdp.dim()) {
    throw ConfigError("checkpoint input dimension does not match the MDP");
  }
  if (state.policy_history.empty()) throw ConfigError("checkpoint has no policy history");
  return rdistance_document(spec, problem, state.init, mixed_from_history(state));
}

std::vector<ProbeRow> probe_linearization(const FiniteEmbeddedMDP& mdp,
                                          const std::vector<int>& widths,
                                          double radius, int n_seeds,
                                          int n_inputs, InitScheme scheme) {
  if (n_seeds < 1) throw ConfigError("probe needs at least one seed");
  const std::vector<VectorXd> inputs = embedded_points(mdp);
  std::vector<ProbeRow> rows;
  for (int m : widths) {
    double total = 0.0;
    for (int seed = 0; seed < n_seeds; ++seed) {
      Rng rng = derived_stream(static_cast<std::uint64_t>(seed), 4);
      const TwoLayerNet net = TwoLayerNet::init(m, mdp.dim(), scheme, rng);
      total += linearization_probe(net, radius, inputs, n_inputs, rng);
    }
    rows.push_back({m, total / n_seeds});
  }
  return rows;
}

}  // namespace gail
