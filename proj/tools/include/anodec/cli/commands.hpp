#pragma once

// Pipeline stages behind the anodec subcommands. Every stage writes into its
// own subdirectory of a run directory and records itself in
// <run>/manifest.json; a completed stage is never rewritten.
//
//   <run>/manifest.json
//   <run>/data/trial_<i>.csv                 collect
//   <run>/model/{model.json, report.json, loss_curve.csv, validation_fit.csv}
//   <run>/controller/{controller.json, report.json, loss_curve.csv}
//   <run>/eval/{summary.csv, summary.json, trials/, disturbances/}

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "anodec/cli/config.hpp"

namespace anodec::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitStageFailure = 1,
  kExitConfigError = 2,
  kExitPartialSuite = 3,  ///< evaluation finished but some trials failed
};

inline constexpr const char* kStages[] = {"collect", "train-model", "train-controller", "evaluate"};

struct RunLayout {
  std::filesystem::path root;

  std::filesystem::path manifest() const { return root / "manifest.json"; }
  std::filesystem::path data() const { return root / "data"; }
  std::filesystem::path model() const { return root / "model"; }
  std::filesystem::path controller() const { return root / "controller"; }
  std::filesystem::path eval() const { return root / "eval"; }
  std::filesystem::path model_checkpoint() const { return model() / "model.json"; }
  std::filesystem::path controller_checkpoint() const { return controller() / "controller.json"; }
};

/// Stages recorded as complete in the run's manifest (empty if none exists).
/// Throws ConfigError if the manifest was written with a different config.
std::vector<std::string> completed_stages(const RunConfig& cfg, const RunLayout& run);

/// Each stage throws ConfigError when its outputs already exist or its inputs
/// are missing, and anodec::Error on a stage failure.
void cmd_collect(const RunConfig& cfg, const RunLayout& run, std::ostream& log);
void cmd_train_model(const RunConfig& cfg, const RunLayout& run, std::ostream& log);
void cmd_train_controller(const RunConfig& cfg, const RunLayout& run, std::ostream& log);
/// Returns kExitPartialSuite if any trial failed, kExitOk otherwise.
int cmd_evaluate(const RunConfig& cfg, const RunLayout& run, std::ostream& log);
/// Runs the stages not yet recorded in the manifest, in order.
int cmd_pipeline(const RunConfig& cfg, const RunLayout& run, std::ostream& log);

/// Full command-line entry point; maps exceptions to exit codes.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace anodec::cli
