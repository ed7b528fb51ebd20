#pragma once

// Run configuration for the anodec command-line tool.
//
// A config file is a JSON object; every key is optional and unknown keys are
// rejected. Schema (defaults shown for setup 1):
//
//   {
//     "setup": 1,                      // 1 or 2
//     "seed": 0,                       // master seed
//     "profile": "canonical",          // or "ci"
//     "plant_file": "plant.json",      // optional, relative to the config file
//     "plant": { "damping": 0.4, ... },   // any PlantConfig field
//     "train": { "learning_rate": 0.001, "clip_norm": 1, "model_steps": 50000,
//                "controller_steps": 12000, "reference_batch": 50,
//                "regularization": 0.0004, "eval_every": 100, "patience": 0,
//                "threads": 0 },
//     "pid": { "kp": 2, "ki": 30, "kd": 0, "anti_windup": true },
//     "suite": { "steps": 2, "double_steps": 2, "cubic_splines": 12, "threads": 0 },
//     "disturbances": { "enabled": false, "impulse_torque": 0.75, "clamp_duration": 0.5 }
//   }
//
// Precedence: setup defaults, then profile, then file values, then flags.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "anodec/eval/suite.hpp"
#include "anodec/learn/train.hpp"
#include "anodec/plant/plant.hpp"

namespace anodec::cli {

struct DisturbanceOptions {
  bool enabled = false;
  double impulse_torque = eval::DisturbanceSchedule::kDefaultImpulseTorque;  ///< [N m]
  double clamp_duration = 0.5;                                             ///< [s]
};

struct RunConfig {
  int setup = 1;
  std::uint64_t seed = 0;
  std::string profile = "canonical";
  plant::PlantConfig plant = plant::PlantConfig::setup(1);
  learn::TrainConfig train = learn::TrainConfig::canonical();
  baseline::PidGains pid_gains{};
  bool pid_anti_windup = true;
  eval::SuiteCounts counts = eval::SuiteCounts::for_setup(1);
  int suite_threads = 0;
  DisturbanceOptions disturbances;

  /// Throws ConfigError on any invalid field.
  void validate() const;
  /// Resolved configuration as compact JSON with sorted keys.
  std::string to_json() const;
  /// FNV-1a of to_json(), as 16 hex digits. Thread counts are excluded since
  /// they never change results.
  std::string hash() const;
};

/// Command-line overrides; unset fields keep the file or default value.
struct Overrides {
  std::optional<int> setup;
  std::optional<std::uint64_t> seed;
  bool ci_profile = false;
  bool disturbances = false;
};

/// Defaults for `overrides.setup` (or the file's setup), then the file at
/// `path` if given, then the remaining overrides.
RunConfig resolve_config(const std::optional<std::filesystem::path>& path, const Overrides& overrides);

/// Parses the JSON produced by RunConfig::to_json (or any config file text)
/// on top of `base`. Throws ConfigError on unknown keys or bad values.
RunConfig parse_config(const std::string& text, RunConfig base, const std::filesystem::path& base_dir = {});

}  // namespace anodec::cli
