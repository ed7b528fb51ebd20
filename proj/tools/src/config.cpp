#include "anodec/cli/config.hpp"

#include <cmath>
#include <functional>
#include <map>

#include <json.hpp>

#include "anodec/io/files.hpp"
#include "anodec/io/hashing.hpp"

namespace anodec::cli {

using nlohmann::json;

namespace {

template <class T>
T get_as(const json& j, const std::string& key) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config key '" + key + "' has the wrong type");
  }
}

/// Applies every member of `obj` through `setters`; unknown keys throw.
void apply_object(const json& obj, const std::string& scope,
                  const std::map<std::string, std::function<void(const json&, const std::string&)>>& setters) {
  if (!obj.is_object()) throw ConfigError("config key '" + scope + "' must be an object");
  for (const auto& [key, value] : obj.items()) {
    const std::string path = scope.empty() ? key : scope + "." + key;
    const auto it = setters.find(key);
    if (it == setters.end()) throw ConfigError("unknown config key '" + path + "'");
    it->second(value, path);
  }
}

template <class T>
std::function<void(const json&, const std::string&)> set(T& field) {
  return [&field](const json& v, const std::string& path) { field = get_as<T>(v, path); };
}

#define ANODEC_PLANT_FIELDS(X)                                                                              \
  X(inertia) X(damping) X(pulley_radius) X(force_gain) X(contraction_coeff) X(elastic_linear) X(elastic_cubic) \
  X(bw_alpha) X(bw_beta) X(bw_gamma) X(bw_n) X(hysteresis_weight) X(creep_weight) X(creep_time_constant)     \
  X(pressure_time_constant) X(mean_pressure) X(supply_pressure) X(gravity) X(load_mass) X(load_lever)        \
  X(gravity_accel) X(noise_std) X(trial_duration) X(reset_settle_time) X(substeps)

void apply_plant(const json& obj, const std::string& scope, plant::PlantConfig& p) {
  std::map<std::string, std::function<void(const json&, const std::string&)>> setters;
#define X(name) setters[#name] = set(p.name);
  ANODEC_PLANT_FIELDS(X)
#undef X
  apply_object(obj, scope, setters);
}

json plant_to_json(const plant::PlantConfig& p) {
  json j;
#define X(name) j[#name] = p.name;
  ANODEC_PLANT_FIELDS(X)
#undef X
  return j;
}

#undef ANODEC_PLANT_FIELDS

void apply_profile(RunConfig& cfg, const std::string& profile) {
  if (profile == "canonical") {
    const auto budgets = learn::TrainConfig::canonical();
    cfg.train.model_steps = budgets.model_steps;
    cfg.train.controller_steps = budgets.controller_steps;
  } else if (profile == "ci") {
    const auto budgets = learn::TrainConfig::ci_profile();
    cfg.train.model_steps = budgets.model_steps;
    cfg.train.controller_steps = budgets.controller_steps;
  } else {
    throw ConfigError("profile must be 'canonical' or 'ci', got '" + profile + "'");
  }
  cfg.profile = profile;
}

RunConfig defaults_for(int setup) {
  RunConfig cfg;
  cfg.setup = setup;
  cfg.plant = plant::PlantConfig::setup(setup);
  cfg.counts = eval::SuiteCounts::for_setup(setup);
  return cfg;
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
}

}  // namespace

void RunConfig::validate() const {
  if (setup != 1 && setup != 2) throw ConfigError("setup must be 1 or 2");
  plant.validate();
  train.validate();
  if (counts.steps < 0 || counts.double_steps < 0 || counts.cubic_splines < 0)
    throw ConfigError("suite counts must be non-negative");
  if (counts.steps + counts.double_steps + counts.cubic_splines == 0)
    throw ConfigError("suite must contain at least one trial");
  if (!(disturbances.clamp_duration > 0.0) || disturbances.clamp_duration > 1.0)
    throw ConfigError("disturbances.clamp_duration must be in (0, 1] s");
  if (!std::isfinite(pid_gains.kp) || !std::isfinite(pid_gains.ki) || !std::isfinite(pid_gains.kd))
    throw ConfigError("pid gains must be finite");
  if (!std::isfinite(disturbances.impulse_torque)) throw ConfigError("disturbances.impulse_torque must be finite");
}

std::string RunConfig::to_json() const {
  json j;
  j["setup"] = setup;
  j["seed"] = seed;
  j["profile"] = profile;
  j["plant"] = plant_to_json(plant);
  j["train"] = {{"learning_rate", train.learning_rate},   {"clip_norm", train.clip_norm},
                {"model_steps", train.model_steps},       {"controller_steps", train.controller_steps},
                {"reference_batch", train.reference_batch}, {"regularization", train.regularization},
                {"eval_every", train.eval_every},         {"patience", train.patience}};
  j["pid"] = {{"kp", pid_gains.kp}, {"ki", pid_gains.ki}, {"kd", pid_gains.kd}, {"anti_windup", pid_anti_windup}};
  j["suite"] = {{"steps", counts.steps}, {"double_steps", counts.double_steps}, {"cubic_splines", counts.cubic_splines}};
  j["disturbances"] = {{"enabled", disturbances.enabled},
                       {"impulse_torque", disturbances.impulse_torque},
                       {"clamp_duration", disturbances.clamp_duration}};
  return j.dump();
}

std::string RunConfig::hash() const { return io::to_hex(io::fnv1a64(to_json())); }

RunConfig parse_config(const std::string& text, RunConfig cfg, const std::filesystem::path& base_dir) {
  const json root = parse_json(text);
  if (root.contains("setup") && get_as<int>(root["setup"], "setup") != cfg.setup)
    throw ConfigError("config setup does not match the resolved setup");
  if (root.contains("profile")) apply_profile(cfg, get_as<std::string>(root["profile"], "profile"));

  apply_object(root, "", {
      {"setup", [](const json&, const std::string&) {}},
      {"profile", [](const json&, const std::string&) {}},
      {"seed", set(cfg.seed)},
      {"plant_file", [](const json&, const std::string&) {}},
      {"plant", [](const json&, const std::string&) {}},
      {"train", [&](const json& v, const std::string& p) {
         apply_object(v, p, {{"learning_rate", set(cfg.train.learning_rate)},
                             {"clip_norm", set(cfg.train.clip_norm)},
                             {"model_steps", set(cfg.train.model_steps)},
                             {"controller_steps", set(cfg.train.controller_steps)},
                             {"reference_batch", set(cfg.train.reference_batch)},
                             {"regularization", set(cfg.train.regularization)},
                             {"eval_every", set(cfg.train.eval_every)},
                             {"patience", set(cfg.train.patience)},
                             {"threads", set(cfg.train.threads)}});
       }},
      {"pid", [&](const json& v, const std::string& p) {
         apply_object(v, p, {{"kp", set(cfg.pid_gains.kp)},
                             {"ki", set(cfg.pid_gains.ki)},
                             {"kd", set(cfg.pid_gains.kd)},
                             {"anti_windup", set(cfg.pid_anti_windup)}});
       }},
      {"suite", [&](const json& v, const std::string& p) {
         apply_object(v, p, {{"steps", set(cfg.counts.steps)},
                             {"double_steps", set(cfg.counts.double_steps)},
                             {"cubic_splines", set(cfg.counts.cubic_splines)},
                             {"threads", set(cfg.suite_threads)}});
       }},
      {"disturbances", [&](const json& v, const std::string& p) {
         apply_object(v, p, {{"enabled", set(cfg.disturbances.enabled)},
                             {"impulse_torque", set(cfg.disturbances.impulse_torque)},
                             {"clamp_duration", set(cfg.disturbances.clamp_duration)}});
       }},
  });
  // Plant values apply after the profile; a plant file applies before inline values.
  if (root.contains("plant_file")) {
    const auto file = base_dir / get_as<std::string>(root["plant_file"], "plant_file");
    if (!std::filesystem::exists(file)) throw ConfigError("plant_file '" + file.string() + "' does not exist");
    apply_plant(parse_json(io::read_text(file)), "plant_file", cfg.plant);
  }
  if (root.contains("plant")) apply_plant(root["plant"], "plant", cfg.plant);
  cfg.validate();
  return cfg;
}

RunConfig resolve_config(const std::optional<std::filesystem::path>& path, const Overrides& overrides) {
  std::string text = "{}";
  std::filesystem::path base_dir;
  if (path) {
    if (!std::filesystem::exists(*path)) throw ConfigError("config file '" + path->string() + "' does not exist");
    text = io::read_text(*path);
    base_dir = path->parent_path();
  }
  const json root = parse_json(text);
  if (!root.is_object()) throw ConfigError("config must be a JSON object");
  int setup = 1;
  if (root.contains("setup")) setup = get_as<int>(root["setup"], "setup");
  if (overrides.setup) setup = *overrides.setup;
  if (setup != 1 && setup != 2) throw ConfigError("setup must be 1 or 2, got " + std::to_string(setup));

  json file = root;
  file["setup"] = setup;
  RunConfig cfg = parse_config(file.dump(), defaults_for(setup), base_dir);
  if (overrides.ci_profile) apply_profile(cfg, "ci");
  if (overrides.seed) cfg.seed = *overrides.seed;
  if (overrides.disturbances) cfg.disturbances.enabled = true;
  cfg.validate();
  return cfg;
}

}  // namespace anodec::cli
