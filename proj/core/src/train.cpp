#include "anodec/learn/train.hpp"

#include <chrono>
#include <cmath>
#include <random>

#include "anodec/io/hashing.hpp"
#include "anodec/nets/fields.hpp"
#include "anodec/odecore/optim.hpp"
#include "anodec/odecore/rk4.hpp"
#include "parallel.hpp"

namespace anodec::learn {

using nets::ClosedLoopField;
using nets::ControllerParams;
using nets::ModelField;
using nets::ModelParams;

TrainConfig TrainConfig::canonical() { return TrainConfig{}; }

TrainConfig TrainConfig::ci_profile() {
  TrainConfig cfg;
  cfg.model_steps = 5000;
  cfg.controller_steps = 1200;
  return cfg;
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
  if (!(clip_norm > 0.0)) throw ConfigError("clip_norm must be positive");
  if (model_steps < 1 || controller_steps < 1) throw ConfigError("step budgets must be positive");
  if (reference_batch < 1) throw ConfigError("reference_batch must be positive");
  if (regularization < 0.0) throw ConfigError("regularization must be non-negative");
  if (eval_every < 1) throw ConfigError("eval_every must be positive");
  if (patience < 0) throw ConfigError("patience must be non-negative");
}

namespace {

double sign(double v) { return (v > 0.0) - (v < 0.0); }

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

using ModelTape = Rk4Tape<ModelField::kStateDim>;
using ClosedLoopTape = Rk4Tape<ClosedLoopField::kStateDim>;

GradResult<ModelField::kParamDim> trial_loss_grad(const ModelParams& params, const Trial& trial, ModelTape& tape) {
  const ModelField field(params);
  const Grid& grid = trial.input.grid;
  const auto target = trial.output.span();
  const double dt = grid.dt();
  auto loss = [&](std::span<const ModelField::State> states, std::span<ModelField::State> state_bar,
                  ModelField::Params& param_bar) {
    const auto A2 = params.A2();
    double sum = 0.0;
    for (std::size_t n = 0; n < grid.steps(); ++n) {
      const double diff = target[n] - (A2.dot(states[n]) + params.b2());
      sum += std::abs(diff);
      const double g = -dt * sign(diff);
      state_bar[n] = g * A2.transpose();
      param_bar.segment<nets::kModelLatent>(ModelParams::kA2Offset) += g * states[n];
      param_bar[ModelParams::kB2Offset] += g;
    }
    return dt * sum;
  };
  return rollout_grad(field, ModelField::State::Zero(), trial.input.span(), grid, loss, &tape);
}

double validation_loss(const ModelParams& params, const Trial& trial) {
  const auto predicted = predict_output(params, trial.input);
  return trajectory_loss(trial.output.span(), predicted, trial.input.grid);
}

}  // namespace

std::vector<double> predict_output(const ModelParams& params, const siggen::SampledSignal& input) {
  const ModelField field(params);
  const auto states = rollout(field, ModelField::State::Zero(), input.span(), input.grid);
  std::vector<double> out(states.size());
  for (std::size_t n = 0; n < states.size(); ++n) out[n] = nets::model_output(params, states[n]);
  return out;
}

std::pair<double, ModelParams::Flat> model_loss_and_grad(const ModelParams& params, std::span<const Trial> trials,
                                                         int threads) {
  const unsigned workers = detail::worker_count(threads, trials.size());
  std::vector<GradResult<ModelField::kParamDim>> parts(trials.size());
  std::vector<ModelTape> tapes(workers);
  detail::parallel_for(trials.size(), workers,
                       [&](std::size_t i, unsigned w) { parts[i] = trial_loss_grad(params, trials[i], tapes[w]); });
  double loss = 0.0;
  ModelParams::Flat grad = ModelParams::Flat::Zero();
  for (const auto& p : parts) {
    loss += p.loss;
    grad += p.grad;
  }
  return {loss, grad};
}

ModelTrainResult train_model(const Dataset& dataset, const TrainConfig& cfg, const ProgressFn& progress) {
  cfg.validate();
  dataset.validate();
  const auto start = std::chrono::steady_clock::now();

  ModelParams params = nets::init_model_params(io::derive_seed(cfg.seed, "model-init"));
  AdamState adam(ModelParams::kSize, AdamConfig{.learning_rate = cfg.learning_rate});

  TrainReport report;
  report.stage = "model";
  report.seed = cfg.seed;
  report.train_loss.reserve(static_cast<std::size_t>(cfg.model_steps));

  ModelParams best = params;
  double best_loss = validation_loss(params, dataset.validation());
  report.validation.push_back({0, best_loss});
  report.best_step = 0;

  const auto train = dataset.train();
  for (int step = 1; step <= cfg.model_steps; ++step) {
    ModelParams::Flat grad;
    double loss = 0.0;
    try {
      std::tie(loss, grad) = model_loss_and_grad(params, train, cfg.threads);
    } catch (const Error& e) {
      report.wall_clock_seconds = seconds_since(start);
      throw DivergenceError(report, e.what());
    }
    if (!std::isfinite(loss)) {
      report.wall_clock_seconds = seconds_since(start);
      throw DivergenceError(report, "non-finite training loss at step " + std::to_string(step));
    }
    report.train_loss.push_back(loss);
    const Eigen::VectorXd clipped = clip_global_norm(grad, cfg.clip_norm);
    adam_step(params.flat(), clipped, adam);
    if (progress) progress(step, loss);

    if (step % cfg.eval_every == 0 || step == cfg.model_steps) {
      const double v = validation_loss(params, dataset.validation());
      report.validation.push_back({step, v});
      if (v < best_loss) {
        best_loss = v;
        best = params;
        report.best_step = step;
      }
      if (cfg.patience > 0 && step - report.best_step >= cfg.patience) break;
    }
  }

  report.best_validation_loss = best_loss;
  report.final_validation_loss = report.validation.back().loss;
  report.wall_clock_seconds = seconds_since(start);
  return {best, params, std::move(report)};
}

ClosedLoopTrajectory closed_loop_rollout(const ModelParams& model, const ControllerParams& controller,
                                         const siggen::SampledSignal& reference, const nets::InputRange& range) {
  const ClosedLoopField field(model, controller, range);
  const auto states = rollout(field, ClosedLoopField::State::Zero(), reference.span(), reference.grid);
  ClosedLoopTrajectory out;
  out.phi_hat.reserve(states.size());
  out.u.reserve(states.size());
  for (const auto& x : states) {
    out.phi_hat.push_back(field.output(x));
    out.u.push_back(field.control(x));
  }
  return out;
}

ControllerObjective controller_objective(const ModelParams& model, const ControllerParams& controller,
                                         std::span<const double> references, const Grid& grid, double lambda,
                                         int threads, const nets::InputRange& range) {
  if (references.empty()) throw ShapeError("controller_objective needs at least one reference");
  const unsigned workers = detail::worker_count(threads, references.size());
  std::vector<GradResult<ClosedLoopField::kParamDim>> parts(references.size());
  std::vector<ClosedLoopTape> tapes(workers);
  const ClosedLoopField field(model, controller, range);
  const double dt = grid.dt();

  detail::parallel_for(references.size(), workers, [&](std::size_t i, unsigned w) {
    const double phi_d = references[i];
    const std::vector<double> input(grid.steps(), phi_d);
    auto loss = [&](std::span<const ClosedLoopField::State> states, std::span<ClosedLoopField::State> state_bar,
                    ClosedLoopField::Params&) {
      const auto A2 = model.A2();
      double sum = 0.0;
      for (std::size_t n = 0; n < grid.steps(); ++n) {
        const double diff = phi_d - (A2.dot(states[n].head<nets::kModelLatent>()) + model.b2());
        sum += std::abs(diff);
        state_bar[n].head<nets::kModelLatent>() = (-dt * sign(diff)) * A2.transpose();
      }
      return dt * sum;
    };
    parts[i] = rollout_grad(field, ClosedLoopField::State::Zero(), input, grid, loss, &tapes[w]);
  });

  ControllerObjective out;
  const double inv = 1.0 / static_cast<double>(references.size());
  for (const auto& p : parts) {
    out.tracking += p.loss;
    out.grad += p.grad;
  }
  out.tracking *= inv;
  out.grad *= inv;
  const double norm = controller.flat().norm();
  out.regularization = lambda * norm;
  if (norm > 0.0) out.grad += (lambda / norm) * controller.flat();
  out.value = out.regularization + out.tracking;
  return out;
}

ControllerTrainResult train_controller(const ModelParams& model, const TrainConfig& cfg, const Grid& grid,
                                       const ProgressFn& progress, const nets::OutputRange& outputs,
                                       const nets::InputRange& inputs) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();

  ControllerParams params = nets::init_controller_params(io::derive_seed(cfg.seed, "controller-init"));
  AdamState adam(ControllerParams::kSize, AdamConfig{.learning_rate = cfg.learning_rate});
  std::mt19937_64 rng(io::derive_seed(cfg.seed, "controller-references"));
  std::uniform_real_distribution<double> level(outputs.lo, outputs.hi);

  std::vector<double> eval_refs(20);
  {
    std::mt19937_64 eval_rng(io::derive_seed(cfg.seed, "controller-eval"));
    for (auto& r : eval_refs) r = level(eval_rng);
  }

  TrainReport report;
  report.stage = "controller";
  report.seed = cfg.seed;
  report.initial_eval_objective =
      controller_objective(model, params, eval_refs, grid, cfg.regularization, cfg.threads, inputs).value;

  std::vector<double> refs(static_cast<std::size_t>(cfg.reference_batch));
  for (int step = 1; step <= cfg.controller_steps; ++step) {
    for (auto& r : refs) r = level(rng);
    ControllerObjective obj;
    try {
      obj = controller_objective(model, params, refs, grid, cfg.regularization, cfg.threads, inputs);
    } catch (const Error& e) {
      report.wall_clock_seconds = seconds_since(start);
      throw DivergenceError(report, e.what());
    }
    if (!std::isfinite(obj.value)) {
      report.wall_clock_seconds = seconds_since(start);
      throw DivergenceError(report, "non-finite controller objective at step " + std::to_string(step));
    }
    report.train_loss.push_back(obj.value);
    report.regularization.push_back(obj.regularization);
    report.tracking.push_back(obj.tracking);
    const Eigen::VectorXd clipped = clip_global_norm(obj.grad, cfg.clip_norm);
    adam_step(params.flat(), clipped, adam);
    if (progress) progress(step, obj.value);
  }

  report.final_eval_objective =
      controller_objective(model, params, eval_refs, grid, cfg.regularization, cfg.threads, inputs).value;
  report.best_step = cfg.controller_steps;
  report.wall_clock_seconds = seconds_since(start);
  return {params, std::move(report)};
}

}  // namespace anodec::learn
