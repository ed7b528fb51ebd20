#include "anodec/cli/commands.hpp"

#include <algorithm>
#include <iomanip>
#include <ostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "anodec/io/csv.hpp"
#include "anodec/io/files.hpp"
#include "anodec/io/hashing.hpp"
#include "anodec/learn/dataset.hpp"
#include "anodec/nets/checkpoint.hpp"

namespace anodec::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

bool contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

json read_manifest(const RunLayout& run) {
  try {
    return json::parse(io::read_text(run.manifest()));
  } catch (const json::exception& e) {
    throw ConfigError("unreadable manifest " + run.manifest().string() + ": " + e.what());
  }
}

void write_atomically(const fs::path& path, const std::string& text) {
  fs::path tmp = path;
  tmp += ".tmp";
  io::write_text(tmp, text);
  fs::rename(tmp, path);
}

void record_stage(const RunConfig& cfg, const RunLayout& run, const std::string& stage) {
  json m;
  if (fs::exists(run.manifest())) {
    m = read_manifest(run);
  } else {
    m["tool"] = "anodec";
    m["seed"] = cfg.seed;
    m["config_hash"] = cfg.hash();
    m["config"] = json::parse(cfg.to_json());
    m["stages"] = json::array();
  }
  m["stages"].push_back(stage);
  write_atomically(run.manifest(), m.dump(2) + "\n");
}

void require(const std::vector<std::string>& done, const std::string& stage, const std::string& needed) {
  if (!contains(done, needed))
    throw ConfigError("stage '" + stage + "' needs '" + needed + "' to have completed in this run directory");
}

/// Runs `body` against a scratch directory that is renamed to `dir` on
/// success, so a stage's outputs appear all at once or not at all.
template <class Body>
void run_stage(const RunConfig& cfg, const RunLayout& run, const std::string& stage, const fs::path& dir,
               Body&& body) {
  const auto done = completed_stages(cfg, run);
  if (contains(done, stage)) throw ConfigError("stage '" + stage + "' already completed in " + run.root.string());
  if (fs::exists(dir)) throw ConfigError(dir.string() + " already exists; outputs are write-once");
  fs::path scratch = dir;
  scratch += ".partial";
  fs::remove_all(scratch);
  fs::create_directories(scratch);
  body(scratch, done);
  fs::rename(scratch, dir);
  record_stage(cfg, run, stage);
}

std::vector<eval::ControllerFactory> controllers(const RunConfig& cfg, const nets::ControllerParams& anodec) {
  const double dt = Grid::kDefaultStep;
  const auto pid = baseline::pid_reset(cfg.pid_gains, dt, cfg.pid_anti_windup, cfg.plant.input_range);
  return {{"anodec",
           [anodec, dt, range = cfg.plant.input_range] {
             return std::make_unique<eval::AnodecController>(anodec, dt, range);
           }},
          {"pid", [pid] { return std::make_unique<eval::PidController>(pid); }}};
}

void print_row(std::ostream& log, const eval::SummaryRow& r) {
  log << "  " << std::left << std::setw(8) << r.controller << std::setw(15) << r.distribution << "N=" << std::setw(4)
      << r.trials << std::right << std::fixed << std::setprecision(2) << std::setw(7) << r.mean_rmse_deg << " +- "
      << r.std_rmse_deg << " deg\n"
      << std::defaultfloat;
}

}  // namespace

std::vector<std::string> completed_stages(const RunConfig& cfg, const RunLayout& run) {
  if (!fs::exists(run.manifest())) return {};
  const json m = read_manifest(run);
  try {
    if (m.at("config_hash").get<std::string>() != cfg.hash())
      throw ConfigError("run directory " + run.root.string() + " was created with a different config (hash " +
                        m.at("config_hash").get<std::string>() + ", now " + cfg.hash() + ")");
    return m.at("stages").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw ConfigError("malformed manifest " + run.manifest().string() + ": " + e.what());
  }
}

void cmd_collect(const RunConfig& cfg, const RunLayout& run, std::ostream& log) {
  run_stage(cfg, run, "collect", run.data(), [&](const fs::path& out, const auto&) {
    plant::Plant plant(cfg.plant, io::derive_seed(cfg.seed, "collect-noise"));
    const auto plan = learn::GeneratorPlan::canonical(io::derive_seed(cfg.seed, "collect-plan"));
    const auto dataset = learn::collect_dataset(plant, plan, cfg.plant.trial_duration);
    dataset.validate(cfg.plant.input_range, cfg.plant.output_range);
    learn::save_dataset(out, dataset);
    log << "collect: " << dataset.trials.size() << " trials, " << dataset.interaction_time()
        << " s of interaction, " << plant.clipped_inputs() << " clipped inputs\n";
  });
}

void cmd_train_model(const RunConfig& cfg, const RunLayout& run, std::ostream& log) {
  run_stage(cfg, run, "train-model", run.model(), [&](const fs::path& out, const auto& done) {
    require(done, "train-model", "collect");
    const auto dataset = learn::load_dataset(run.data());
    learn::TrainConfig tc = cfg.train;
    tc.seed = cfg.seed;
    const int every = std::max(1, tc.model_steps / 10);
    learn::ModelTrainResult result;
    try {
      result = learn::train_model(dataset, tc, [&](int step, double loss) {
        if (step % every == 0) log << "train-model: step " << step << " loss " << loss << "\n";
      });
    } catch (const learn::DivergenceError& e) {
      io::write_text(out / "report.json", learn::report_to_json(e.report()));
      throw;
    }
    result.report.checkpoint = "model.json";
    result.report.config_hash = cfg.hash();
    nets::save_checkpoint(out / "model.json", result.params);
    io::write_text(out / "report.json", learn::report_to_json(result.report));
    learn::write_loss_curve_csv(out / "loss_curve.csv", result.report);

    const auto& val = dataset.validation();
    const auto predicted = learn::predict_output(result.params, val.input);
    io::write_csv(out / "validation_fit.csv",
                  io::Table{{"t", "u", "phi_meas", "phi_hat"},
                            {[&] {
                               std::vector<double> t(val.input.grid.samples());
                               for (std::size_t n = 0; n < t.size(); ++n) t[n] = val.input.grid.time(n);
                               return t;
                             }(),
                             val.input.values, val.output.values, predicted}});
    log << "train-model: best step " << result.report.best_step << ", validation loss "
        << result.report.best_validation_loss << " (final " << result.report.final_validation_loss
        << "), validation RMSE " << learn::rmse(predicted, val.output.values) << " rad\n";
  });
}

void cmd_train_controller(const RunConfig& cfg, const RunLayout& run, std::ostream& log) {
  run_stage(cfg, run, "train-controller", run.controller(), [&](const fs::path& out, const auto& done) {
    require(done, "train-controller", "train-model");
    const auto model = nets::load_model_checkpoint(run.model_checkpoint());
    learn::TrainConfig tc = cfg.train;
    tc.seed = cfg.seed;
    const int every = std::max(1, tc.controller_steps / 10);
    learn::ControllerTrainResult result;
    try {
      result = learn::train_controller(
          model, tc, Grid(cfg.plant.trial_duration),
          [&](int step, double obj) {
            if (step % every == 0) log << "train-controller: step " << step << " objective " << obj << "\n";
          },
          cfg.plant.output_range, cfg.plant.input_range);
    } catch (const learn::DivergenceError& e) {
      io::write_text(out / "report.json", learn::report_to_json(e.report()));
      throw;
    }
    result.report.checkpoint = "controller.json";
    result.report.config_hash = cfg.hash();
    nets::save_checkpoint(out / "controller.json", result.params);
    io::write_text(out / "report.json", learn::report_to_json(result.report));
    learn::write_loss_curve_csv(out / "loss_curve.csv", result.report);
    log << "train-controller: objective " << result.report.initial_eval_objective << " -> "
        << result.report.final_eval_objective << " on the fixed evaluation batch\n";
  });
}

int cmd_evaluate(const RunConfig& cfg, const RunLayout& run, std::ostream& log) {
  int code = kExitOk;
  run_stage(cfg, run, "evaluate", run.eval(), [&](const fs::path& out, const auto& done) {
    require(done, "evaluate", "train-controller");
    const auto factories = controllers(cfg, nets::load_controller_checkpoint(run.controller_checkpoint()));
    const auto report = eval::evaluate_suite(cfg.plant, factories, cfg.counts, io::derive_seed(cfg.seed, "evaluate"),
                                             cfg.setup, cfg.suite_threads);
    eval::export_report(report, out);
    log << "evaluate: setup " << cfg.setup << ", RMSE per distribution\n";
    for (const auto& r : report.summary) print_row(log, r);
    for (const auto& r : report.overall) print_row(log, r);

    if (cfg.disturbances.enabled) {
      const auto records =
          eval::run_disturbance_trials(cfg.plant, factories, cfg.disturbances.impulse_torque,
                                       cfg.disturbances.clamp_duration, io::derive_seed(cfg.seed, "disturbances"));
      fs::create_directories(out / "disturbances");
      json summary = json::array();
      for (const auto& rec : records) {
        const std::string name = rec.controller + "_" + rec.distribution;
        eval::write_trial_csv(out / "disturbances" / (name + ".csv"), rec);
        json events = json::array();
        if (!rec.failed) {
          for (const auto& r : eval::analyze_recovery(rec))
            events.push_back({{"pre_level", r.pre_level},
                              {"peak_error", r.peak_error},
                              {"recovery_time", r.recovery_time},
                              {"recovered", r.recovered()}});
        }
        summary.push_back({{"controller", rec.controller},
                           {"schedule", rec.distribution},
                           {"file", "disturbances/" + name + ".csv"},
                           {"failed", rec.failed},
                           {"failure", rec.failure},
                           {"events", events}});
        log << "evaluate: disturbed trial " << name << (rec.failed ? " FAILED: " + rec.failure : "") << "\n";
        if (rec.failed) code = kExitPartialSuite;
      }
      io::write_text(out / "disturbances" / "recovery.json", summary.dump(2) + "\n");
    }
    if (report.partial()) {
      log << "evaluate: warning, some trials failed; the suite is partial\n";
      code = kExitPartialSuite;
    }
  });
  return code;
}

int cmd_pipeline(const RunConfig& cfg, const RunLayout& run, std::ostream& log) {
  const auto done = completed_stages(cfg, run);
  for (const auto* stage : kStages) {
    if (contains(done, stage)) log << "pipeline: " << stage << " already complete, skipping\n";
  }
  if (!contains(done, "collect")) cmd_collect(cfg, run, log);
  if (!contains(done, "train-model")) cmd_train_model(cfg, run, log);
  if (!contains(done, "train-controller")) cmd_train_controller(cfg, run, log);
  if (!contains(done, "evaluate")) return cmd_evaluate(cfg, run, log);
  return kExitOk;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Learned neural-ODE control of a simulated soft actuator", "anodec"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::uint64_t seed = 0;
  int setup = 0;
  std::string out_dir;
  bool ci = false;
  bool disturbances = false;
  app.add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
  auto* seed_opt = app.add_option("--seed", seed, "master seed");
  auto* setup_opt = app.add_option("--setup", setup, "plant setup: 1 (horizontal) or 2 (gravity-loaded)")
                        ->check(CLI::IsMember({1, 2}));
  app.add_option("--out", out_dir, "run directory")->required();
  app.add_flag("--ci-profile", ci, "reduced training budgets");
  app.add_flag("--disturbances", disturbances, "add disturbed trials to the evaluation");

  const std::pair<const char*, const char*> subcommands[] = {
      {"collect", "record the six probing trials"},
      {"train-model", "fit the model ODE to the collected data"},
      {"train-controller", "train the controller ODE on the learned model"},
      {"evaluate", "run the benchmark suite for the learned controller and PID"},
      {"pipeline", "run every stage not yet completed"}};
  for (const auto& [name, help] : subcommands) app.add_subcommand(name, help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  try {
    Overrides ov;
    if (*setup_opt) ov.setup = setup;
    if (*seed_opt) ov.seed = seed;
    ov.ci_profile = ci;
    ov.disturbances = disturbances;
    const RunConfig cfg =
        resolve_config(config_path.empty() ? std::nullopt : std::optional<fs::path>(config_path), ov);
    const RunLayout run{out_dir};
    fs::create_directories(run.root);
    const std::string cmd = app.get_subcommands().front()->get_name();
    err << "anodec " << cmd << ": setup " << cfg.setup << ", seed " << cfg.seed << ", profile " << cfg.profile
        << ", config " << cfg.hash() << "\n";
    if (cmd == "collect") cmd_collect(cfg, run, err);
    if (cmd == "train-model") cmd_train_model(cfg, run, err);
    if (cmd == "train-controller") cmd_train_controller(cfg, run, err);
    if (cmd == "evaluate") return cmd_evaluate(cfg, run, err);
    if (cmd == "pipeline") return cmd_pipeline(cfg, run, err);
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    err << "stage failed: " << e.what() << "\n";
    return kExitStageFailure;
  }
}

}  // namespace anodec::cli
