#pragma once

// Model learning from probing data and controller learning on the frozen
// model, both by Adam on exact RK4-unrolled gradients with global-norm
// clipping.

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "anodec/learn/dataset.hpp"
#include "anodec/nets/params.hpp"

namespace anodec::learn {

struct TrainConfig {
  double learning_rate = 1e-3;
  double clip_norm = 1.0;
  int model_steps = 50000;
  int controller_steps = 12000;
  int reference_batch = 50;
  double regularization = 4e-4;  ///< weight of the L2 norm of the controller parameters
  int eval_every = 100;          ///< validation interval of model training [steps]
  int patience = 0;              ///< abort after this many steps without improvement; 0 = never
  std::uint64_t seed = 0;
  int threads = 0;               ///< worker threads for batched rollouts; 0 = hardware concurrency

  /// Full budgets (50000 / 12000 steps).
  static TrainConfig canonical();
  /// Reduced budgets for continuous integration (5000 / 1200 steps).
  static TrainConfig ci_profile();

  void validate() const;
};

struct ValidationPoint {
  int step = 0;
  double loss = 0.0;
};

struct TrainReport {
  std::string stage;                     ///< "model" or "controller"
  std::vector<double> train_loss;        ///< objective before each update
  std::vector<double> regularization;    ///< controller only: lambda * ||theta||
  std::vector<double> tracking;          ///< controller only: batch-mean tracking loss
  std::vector<ValidationPoint> validation;
  int best_step = 0;
  double best_validation_loss = 0.0;
  double final_validation_loss = 0.0;    ///< loss of the last-step parameters
  double initial_eval_objective = 0.0;   ///< controller only: fixed evaluation batch before training
  double final_eval_objective = 0.0;     ///< controller only: same batch after training
  double wall_clock_seconds = 0.0;
  std::string checkpoint;                ///< file the returned parameters were written to, if any
  std::uint64_t seed = 0;
  std::string config_hash;
};

/// Raised when the objective or its gradient stops being finite.
class DivergenceError : public Error {
 public:
  DivergenceError(TrainReport report, const std::string& what)
      : Error("training diverged: " + what), report_(std::move(report)) {}
  const TrainReport& report() const noexcept { return report_; }

 private:
  TrainReport report_;
};

/// Called after every optimizer step with (step, objective).
using ProgressFn = std::function<void(int, double)>;

/// Model output phi_hat along the rollout of `input` from xi(0) = 0.
std::vector<double> predict_output(const nets::ModelParams& params, const siggen::SampledSignal& input);

/// Sum of trajectory losses over `trials` and its gradient.
std::pair<double, nets::ModelParams::Flat> model_loss_and_grad(const nets::ModelParams& params,
                                                               std::span<const Trial> trials, int threads = 1);

struct ModelTrainResult {
  nets::ModelParams params;  ///< best-validation parameters
  nets::ModelParams final_params;
  TrainReport report;
};

/// Minimizes the summed training-trial loss; keeps the parameters with the
/// lowest validation loss (evaluated every `eval_every` steps and at the end).
ModelTrainResult train_model(const Dataset& dataset, const TrainConfig& cfg, const ProgressFn& progress = {});

struct ClosedLoopTrajectory {
  std::vector<double> phi_hat;  ///< model output per grid sample [rad]
  std::vector<double> u;        ///< controller output per grid sample [bar]
};

/// Joint model + controller rollout from zero latent states.
ClosedLoopTrajectory closed_loop_rollout(const nets::ModelParams& model, const nets::ControllerParams& controller,
                                         const siggen::SampledSignal& reference, const nets::InputRange& range = {});

struct ControllerObjective {
  double value = 0.0;           ///< regularization + tracking
  double regularization = 0.0;
  double tracking = 0.0;        ///< mean over the references
  nets::ControllerParams::Flat grad = nets::ControllerParams::Flat::Zero();
};

/// lambda ||theta_c||_2 + mean over constant references of the closed-loop
/// trajectory loss, with its gradient.
ControllerObjective controller_objective(const nets::ModelParams& model, const nets::ControllerParams& controller,
                                         std::span<const double> references, const Grid& grid, double lambda,
                                         int threads = 1, const nets::InputRange& range = {});

struct ControllerTrainResult {
  nets::ControllerParams params;
  TrainReport report;
};

/// Fresh uniform references every step from the output range.
ControllerTrainResult train_controller(const nets::ModelParams& model, const TrainConfig& cfg, const Grid& grid,
                                       const ProgressFn& progress = {}, const nets::OutputRange& outputs = {},
                                       const nets::InputRange& inputs = {});

std::string report_to_json(const TrainReport& report);
TrainReport report_from_json(const std::string& text);
/// Columns step, loss (and regularization, tracking for controller reports).
void write_loss_curve_csv(const std::filesystem::path& path, const TrainReport& report);

}  // namespace anodec::learn
