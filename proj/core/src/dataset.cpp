#include "anodec/learn/dataset.hpp"

#include <cmath>
#include <filesystem>

#include "anodec/io/csv.hpp"
#include "anodec/io/hashing.hpp"

namespace anodec::learn {

double Dataset::interaction_time() const {
  double total = 0.0;
  for (const auto& t : trials) total += t.input.grid.duration();
  return total;
}

void Dataset::validate(const nets::InputRange& inputs, const nets::OutputRange& outputs) const {
  if (trials.size() != kTrials) {
    throw ShapeError("dataset needs " + std::to_string(kTrials) + " trials, has " + std::to_string(trials.size()));
  }
  const Grid g = grid();
  for (std::size_t i = 0; i < trials.size(); ++i) {
    const auto& t = trials[i];
    if (!(t.input.grid == g) || !(t.output.grid == g)) {
      throw ShapeError("trial " + std::to_string(i) + " is not on the common grid");
    }
    for (double u : t.input.values) {
      if (!(u >= inputs.lo && u <= inputs.hi)) throw ConfigError("trial " + std::to_string(i) + " input out of range");
    }
    for (double y : t.output.values) {
      if (!(y >= outputs.lo && y <= outputs.hi)) throw ConfigError("trial " + std::to_string(i) + " output out of range");
    }
  }
}

GeneratorPlan GeneratorPlan::canonical(std::uint64_t seed) {
  GeneratorPlan plan;
  for (int f : {1, 2}) {
    InputSpec s;
    s.kind = InputSpec::Kind::kSinusoid;
    s.frequency_hz = f;
    plan.inputs.push_back(s);
  }
  for (int i = 0; i < 4; ++i) {
    InputSpec s;
    s.kind = InputSpec::Kind::kSpline;
    s.spline.seed = io::derive_seed(seed, "probe-spline-" + std::to_string(i));
    plan.inputs.push_back(s);
  }
  return plan;
}

std::vector<siggen::SampledSignal> GeneratorPlan::realize(double duration, double dt) const {
  std::vector<siggen::SampledSignal> out;
  out.reserve(inputs.size());
  for (const auto& s : inputs) {
    if (s.kind == InputSpec::Kind::kSinusoid) {
      out.push_back(siggen::generate_sinusoidal(duration, s.frequency_hz, dt));
    } else {
      out.push_back(siggen::draw_spline(duration, s.spline, dt));
    }
  }
  return out;
}

Dataset collect_dataset(plant::Plant& plant, const GeneratorPlan& plan, double duration) {
  if (plan.inputs.size() != Dataset::kTrials) {
    throw ShapeError("generator plan must yield " + std::to_string(Dataset::kTrials) + " inputs");
  }
  const auto inputs = plan.realize(duration, plant.dt());
  Dataset ds;
  for (const auto& u : inputs) {
    const Grid& g = u.grid;
    std::vector<double> y(g.samples());
    try {
      plant.reset();
      for (std::size_t n = 0; n < g.samples(); ++n) {
        y[n] = plant.measure();
        if (n < g.steps()) plant.step(u.values[n]);
      }
    } catch (const plant::SimulationFault& fault) {
      throw CollectionError(std::move(ds.trials), fault.what());
    }
    ds.trials.push_back({u, siggen::SampledSignal(g, std::move(y))});
  }
  return ds;
}

double trajectory_loss(std::span<const double> target, std::span<const double> predicted, const Grid& grid) {
  if (target.size() != grid.samples() || predicted.size() != grid.samples()) {
    throw ShapeError("trajectory_loss: series do not match the grid");
  }
  double sum = 0.0;
  for (std::size_t n = 0; n < grid.steps(); ++n) sum += std::abs(target[n] - predicted[n]);
  return grid.dt() * sum;
}

double trajectory_loss(const siggen::SampledSignal& target, const siggen::SampledSignal& predicted) {
  if (!(target.grid == predicted.grid)) throw ShapeError("trajectory_loss: grid mismatch");
  return trajectory_loss(target.span(), predicted.span(), target.grid);
}

double rmse(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.empty()) throw ShapeError("rmse: series lengths differ");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s / static_cast<double>(a.size()));
}

void save_dataset(const std::filesystem::path& dir, const Dataset& dataset) {
  std::filesystem::create_directories(dir);
  for (std::size_t i = 0; i < dataset.trials.size(); ++i) {
    const auto& t = dataset.trials[i];
    io::Table table;
    table.header = {"t", "u", "phi_meas"};
    std::vector<double> time(t.input.grid.samples());
    for (std::size_t n = 0; n < time.size(); ++n) time[n] = t.input.grid.time(n);
    table.columns = {time, t.input.values, t.output.values};
    io::write_csv(dir / ("trial_" + std::to_string(i) + ".csv"), table);
  }
}

Dataset load_dataset(const std::filesystem::path& dir) {
  Dataset ds;
  for (std::size_t i = 0; i < Dataset::kTrials; ++i) {
    const auto table = io::read_csv(dir / ("trial_" + std::to_string(i) + ".csv"));
    const auto& time = table.column("t");
    if (time.size() < 2) throw ShapeError("trial file too short");
    const double dt = time[1] - time[0];
    const Grid g(time.back() - time.front(), std::round(dt * 1e9) / 1e9, time.front());
    ds.trials.push_back({siggen::SampledSignal(g, table.column("u")), siggen::SampledSignal(g, table.column("phi_meas"))});
  }
  ds.validate();
  return ds;
}

}  // namespace anodec::learn
