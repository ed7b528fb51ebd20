#pragma once

// Closed-loop evaluation on the plant: single trials, disturbance schedules,
// and the paired benchmark suite over three reference distributions.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "anodec/eval/controllers.hpp"
#include "anodec/plant/plant.hpp"
#include "anodec/siggen/signals.hpp"

namespace anodec::eval {

enum class DisturbanceKind { kImpulseTorque, kHoldClamp };

std::string to_string(DisturbanceKind kind);
DisturbanceKind disturbance_kind_from_string(const std::string& name);

/// Active over [start, start + duration). An impulse applies `magnitude`
/// [N m] of external torque while active; a clamp pins the arm at the angle it
/// had when the event started and releases it at start + duration.
struct DisturbanceEvent {
  DisturbanceKind kind = DisturbanceKind::kImpulseTorque;
  double start = 0.0;     ///< [s]
  double duration = 0.0;  ///< [s]
  double magnitude = 0.0; ///< impulse torque [N m]; unused for clamps

  double end() const noexcept { return start + duration; }
  bool active(double t) const noexcept;
  friend bool operator==(const DisturbanceEvent&, const DisturbanceEvent&) = default;
};

struct DisturbanceSchedule {
  std::vector<DisturbanceEvent> events;

  bool empty() const noexcept { return events.empty(); }
  /// Events must lie inside [0, duration] with non-negative durations and
  /// must not overlap. Throws ConfigError.
  void validate(double duration) const;

  /// Two 0.1 s torque impulses of `magnitude` and -`magnitude` at 3 s and 7 s.
  static DisturbanceSchedule impulses(double magnitude = kDefaultImpulseTorque);
  /// Four 0.5 s clamps starting at 2, 4.5, 7 and 9.5 s.
  static DisturbanceSchedule clamps(double duration = 0.5);
  friend bool operator==(const DisturbanceSchedule&, const DisturbanceSchedule&) = default;

  static constexpr double kDefaultImpulseTorque = 0.75;  ///< [N m]
};

/// Duration of the disturbance trials [s].
inline constexpr double kDisturbanceTrialDuration = 12.0;
/// Period of the sinusoidal reference tracked during disturbance trials [s].
inline constexpr double kDisturbanceReferencePeriod = 2.0;

/// 0.3 sin(2 pi t / kDisturbanceReferencePeriod) on `grid`.
siggen::SampledSignal disturbance_reference(const Grid& grid);

/// Per-tick effect of an active event. An impulse adds the angular impulse of
/// its torque over one tick, magnitude * dt / inertia, to omega. A clamp sets
/// phi to `pin_angle` and zeroes omega.
plant::PlantState apply_disturbance(const plant::PlantState& state, const DisturbanceEvent& event, double dt,
                                    const plant::PlantConfig& cfg, double pin_angle);

struct TrialRecord {
  std::string controller;
  std::string distribution;
  std::size_t index = 0;
  std::uint64_t seed = 0;          ///< seed of the reference draw
  std::uint64_t noise_seed = 0;
  std::vector<double> t;
  std::vector<double> phi_d;
  std::vector<double> phi;         ///< noiseless plant angle
  std::vector<double> phi_meas;
  std::vector<double> u;
  DisturbanceSchedule disturbances;
  double rmse_deg = 0.0;
  bool failed = false;
  std::string failure;

  friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

/// Recovery of one disturbance event. Tracking error levels are RMS values
/// over half a reference period, which makes them independent of the phase
/// of a steady sinusoidal error.
struct Recovery {
  double pre_level = 0.0;      ///< before the event starts [rad]
  double peak_error = 0.0;     ///< max |phi_d - phi| from start to 1 s after release [rad]
  double recovery_time = -1.0; ///< first delay after release with level < 2 pre_level; -1 if none within 1 s
  bool recovered() const noexcept { return recovery_time >= 0.0; }
};

/// One entry per event of `record.disturbances`.
std::vector<Recovery> analyze_recovery(const TrialRecord& record);

/// Root-mean-square of phi_d - phi over every sample, in degrees.
double rmse_deg(std::span<const double> phi_d, std::span<const double> phi);

/// Resets plant and controller, then streams the reference one tick at a time:
/// measure, act, step. Samples 0..N are logged; u[N] is computed but not
/// applied. A plant fault is recorded in the trial instead of thrown.
TrialRecord run_trial(plant::Plant& plant, Controller& controller, const siggen::SampledSignal& reference,
                      const DisturbanceSchedule& disturbances = {});

enum class Distribution { kSteps, kDoubleSteps, kCubicSplines };
inline constexpr Distribution kAllDistributions[] = {Distribution::kSteps, Distribution::kDoubleSteps,
                                                     Distribution::kCubicSplines};

std::string to_string(Distribution d);
Distribution distribution_from_string(const std::string& name);

siggen::SampledSignal draw_reference(Distribution d, const Grid& grid, std::uint64_t seed,
                                     const nets::OutputRange& range = {});

struct SuiteCounts {
  int steps = 2;
  int double_steps = 2;
  int cubic_splines = 12;

  int of(Distribution d) const;
  /// 2/2/12 for setup 1 and 2/2/4 for setup 2.
  static SuiteCounts for_setup(int setup);
};

struct SummaryRow {
  std::string controller;
  std::string distribution;  ///< a distribution name, or "overall" for pooled rows
  std::size_t trials = 0;    ///< trials that completed
  double mean_rmse_deg = 0.0;
  double std_rmse_deg = 0.0; ///< population standard deviation

  friend bool operator==(const SummaryRow&, const SummaryRow&) = default;
};

struct SuiteReport {
  std::uint64_t seed = 0;
  int setup = 1;
  std::vector<SummaryRow> summary;  ///< one row per (controller, distribution)
  std::vector<SummaryRow> overall;  ///< one row per controller, pooled over all trials
  std::vector<TrialRecord> trials;

  bool partial() const;
  const SummaryRow& row(const std::string& controller, const std::string& distribution) const;
  friend bool operator==(const SuiteReport&, const SuiteReport&) = default;
};

/// Builds a fresh controller for every trial.
struct ControllerFactory {
  std::string id;
  std::function<std::unique_ptr<Controller>()> make;
};

/// Mean and population std over the completed trials of each
/// (controller, distribution) pair, in order of first appearance.
std::vector<SummaryRow> summarize(std::span<const TrialRecord> trials);
/// Same statistics pooled over all distributions, one row per controller.
std::vector<SummaryRow> summarize_overall(std::span<const TrialRecord> trials);

/// Every controller sees the same references and the same sensor-noise
/// sequence for a given (distribution, index). Trials run in parallel but the
/// report is ordered by distribution, index, then controller.
SuiteReport evaluate_suite(const plant::PlantConfig& cfg, std::span<const ControllerFactory> controllers,
                           const SuiteCounts& counts, std::uint64_t seed, int setup = 1, int threads = 0);

/// One trial per (schedule, controller) on the disturbance reference: first
/// the impulse schedule, then the clamp schedule. Records carry the schedule
/// name ("impulses" or "clamps") as their distribution.
std::vector<TrialRecord> run_disturbance_trials(const plant::PlantConfig& cfg,
                                                std::span<const ControllerFactory> controllers,
                                                double impulse_torque, double clamp_duration, std::uint64_t seed);

/// Columns t, phi_d, phi, phi_meas, u.
void write_trial_csv(const std::filesystem::path& path, const TrialRecord& record);

/// Writes summary.csv, summary.json and trials/<controller>_<distribution>_<index>_<seed>.csv.
void export_report(const SuiteReport& report, const std::filesystem::path& dir);
SuiteReport import_report(const std::filesystem::path& dir);

}  // namespace anodec::eval
