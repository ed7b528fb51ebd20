#include "anodec/eval/suite.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "anodec/io/csv.hpp"
#include "anodec/io/files.hpp"
#include "anodec/io/hashing.hpp"
#include "parallel.hpp"

namespace anodec::eval {

using nlohmann::json;

std::string to_string(DisturbanceKind kind) {
  return kind == DisturbanceKind::kImpulseTorque ? "impulse-torque" : "hold-clamp";
}

DisturbanceKind disturbance_kind_from_string(const std::string& name) {
  if (name == "impulse-torque") return DisturbanceKind::kImpulseTorque;
  if (name == "hold-clamp") return DisturbanceKind::kHoldClamp;
  throw ConfigError("unknown disturbance kind '" + name + "'");
}

bool DisturbanceEvent::active(double t) const noexcept {
  // Absorbs rounding in grid times such as 2.4999999999.
  constexpr double eps = 1e-9;
  return t >= start - eps && t < end() - eps;
}

void DisturbanceSchedule::validate(double duration) const {
  for (std::size_t i = 0; i < events.size(); ++i) {
    const auto& e = events[i];
    if (!(e.start >= 0.0) || !(e.duration >= 0.0) || e.end() > duration + 1e-9)
      throw ConfigError("disturbance " + std::to_string(i) + " lies outside the trial");
    if (!std::isfinite(e.magnitude)) throw ConfigError("disturbance magnitude must be finite");
    for (std::size_t j = 0; j < i; ++j) {
      const auto& o = events[j];
      if (e.start < o.end() && o.start < e.end())
        throw ConfigError("disturbances " + std::to_string(j) + " and " + std::to_string(i) + " overlap");
    }
  }
}

DisturbanceSchedule DisturbanceSchedule::impulses(double magnitude) {
  return {{{DisturbanceKind::kImpulseTorque, 3.0, 0.1, magnitude},
           {DisturbanceKind::kImpulseTorque, 7.0, 0.1, -magnitude}}};
}

DisturbanceSchedule DisturbanceSchedule::clamps(double duration) {
  DisturbanceSchedule s;
  for (double start : {2.0, 4.5, 7.0, 9.5}) s.events.push_back({DisturbanceKind::kHoldClamp, start, duration, 0.0});
  return s;
}

siggen::SampledSignal disturbance_reference(const Grid& grid) {
  std::vector<double> v(grid.samples());
  for (std::size_t n = 0; n < v.size(); ++n)
    v[n] = 0.3 * std::sin(2.0 * std::numbers::pi * grid.time(n) / kDisturbanceReferencePeriod);
  return {grid, std::move(v)};
}

std::vector<Recovery> analyze_recovery(const TrialRecord& record) {
  if (record.t.size() < 2) throw ShapeError("analyze_recovery: record too short");
  const double dt = record.t[1] - record.t[0];
  const auto window = static_cast<std::size_t>(std::lround(0.5 * kDisturbanceReferencePeriod / dt));
  const auto horizon = static_cast<std::size_t>(std::lround(1.0 / dt));
  const std::size_t size = record.phi.size();
  auto err = [&](std::size_t i) { return record.phi_d[i] - record.phi[i]; };
  auto level = [&](std::size_t from) {
    double sum = 0.0;
    for (std::size_t i = from; i < from + window; ++i) sum += err(i) * err(i);
    return std::sqrt(sum / static_cast<double>(window));
  };

  std::vector<Recovery> out;
  for (const auto& e : record.disturbances.events) {
    const auto start = static_cast<std::size_t>(std::lround(e.start / dt));
    const auto release = static_cast<std::size_t>(std::lround(e.end() / dt));
    if (start < window || release + horizon + window > size)
      throw ShapeError("analyze_recovery: event too close to the trial boundary");
    Recovery r;
    r.pre_level = level(start - window);
    for (std::size_t i = start; i <= release + horizon; ++i) r.peak_error = std::max(r.peak_error, std::abs(err(i)));
    for (std::size_t i = release; i <= release + horizon; ++i) {
      if (level(i) < 2.0 * r.pre_level) {
        r.recovery_time = static_cast<double>(i - release) * dt;
        break;
      }
    }
    out.push_back(r);
  }
  return out;
}

plant::PlantState apply_disturbance(const plant::PlantState& state, const DisturbanceEvent& event, double dt,
                                    const plant::PlantConfig& cfg, double pin_angle) {
  plant::PlantState out = state;
  if (event.kind == DisturbanceKind::kImpulseTorque) {
    out.omega += event.magnitude * dt / cfg.inertia;
  } else {
    out.phi = pin_angle;
    out.omega = 0.0;
  }
  return out;
}

double rmse_deg(std::span<const double> phi_d, std::span<const double> phi) {
  if (phi_d.size() != phi.size()) throw ShapeError("rmse_deg: length mismatch");
  if (phi.empty()) throw ShapeError("rmse_deg: empty trajectory");
  double sum = 0.0;
  for (std::size_t i = 0; i < phi.size(); ++i) sum += (phi_d[i] - phi[i]) * (phi_d[i] - phi[i]);
  return std::sqrt(sum / static_cast<double>(phi.size())) * 180.0 / std::numbers::pi;
}

TrialRecord run_trial(plant::Plant& plant, Controller& controller, const siggen::SampledSignal& reference,
                      const DisturbanceSchedule& disturbances) {
  const Grid& grid = reference.grid;
  disturbances.validate(grid.duration());
  const std::size_t n_steps = grid.steps();

  TrialRecord rec;
  rec.controller = controller.id();
  rec.disturbances = disturbances;
  rec.t.reserve(grid.samples());
  rec.phi_d.reserve(grid.samples());
  rec.phi.reserve(grid.samples());
  rec.phi_meas.reserve(grid.samples());
  rec.u.reserve(grid.samples());

  plant.reset();
  controller.reset();
  std::vector<double> pins(disturbances.events.size(), std::numeric_limits<double>::quiet_NaN());

  try {
    for (std::size_t n = 0; n <= n_steps; ++n) {
      const double t = grid.time(n);
      const double phi = plant.true_angle();
      const double meas = plant.measure();
      const double u = controller.act(reference.values[n], meas);
      rec.t.push_back(t);
      rec.phi_d.push_back(reference.values[n]);
      rec.phi.push_back(phi);
      rec.phi_meas.push_back(meas);
      rec.u.push_back(u);
      if (n == n_steps) break;

      for (std::size_t k = 0; k < pins.size(); ++k) {
        if (disturbances.events[k].active(t) && std::isnan(pins[k])) pins[k] = phi;
      }
      plant.step(u);
      for (std::size_t k = 0; k < pins.size(); ++k) {
        const auto& e = disturbances.events[k];
        if (e.active(t)) plant.set_state(apply_disturbance(plant.state(), e, grid.dt(), plant.config(), pins[k]));
      }
    }
    rec.rmse_deg = rmse_deg(rec.phi_d, rec.phi);
  } catch (const Error& e) {
    rec.failed = true;
    rec.failure = e.what();
    rec.rmse_deg = std::numeric_limits<double>::quiet_NaN();
  }
  return rec;
}

std::string to_string(Distribution d) {
  switch (d) {
    case Distribution::kSteps: return "steps";
    case Distribution::kDoubleSteps: return "double-steps";
    case Distribution::kCubicSplines: return "cubic-splines";
  }
  return "?";
}

Distribution distribution_from_string(const std::string& name) {
  for (auto d : kAllDistributions) {
    if (to_string(d) == name) return d;
  }
  throw ConfigError("unknown reference distribution '" + name + "'");
}

siggen::SampledSignal draw_reference(Distribution d, const Grid& grid, std::uint64_t seed,
                                     const nets::OutputRange& range) {
  switch (d) {
    case Distribution::kSteps: return siggen::draw_step_reference(grid, range, seed);
    case Distribution::kDoubleSteps: return siggen::draw_double_step_reference(grid, range, seed);
    case Distribution::kCubicSplines: return siggen::draw_cubic_spline_reference(grid, range, seed);
  }
  throw ConfigError("unknown reference distribution");
}

int SuiteCounts::of(Distribution d) const {
  switch (d) {
    case Distribution::kSteps: return steps;
    case Distribution::kDoubleSteps: return double_steps;
    case Distribution::kCubicSplines: return cubic_splines;
  }
  return 0;
}

SuiteCounts SuiteCounts::for_setup(int setup) {
  if (setup == 1) return {2, 2, 12};
  if (setup == 2) return {2, 2, 4};
  throw ConfigError("setup must be 1 or 2, got " + std::to_string(setup));
}

bool SuiteReport::partial() const {
  return std::any_of(trials.begin(), trials.end(), [](const TrialRecord& t) { return t.failed; });
}

const SummaryRow& SuiteReport::row(const std::string& controller, const std::string& distribution) const {
  for (const auto* rows : {&summary, &overall}) {
    for (const auto& r : *rows) {
      if (r.controller == controller && r.distribution == distribution) return r;
    }
  }
  throw Error("no summary row for " + controller + "/" + distribution);
}

namespace {

SummaryRow make_row(const std::string& controller, const std::string& distribution,
                    const std::vector<double>& values) {
  SummaryRow row{controller, distribution, values.size(), 0.0, 0.0};
  if (values.empty()) {
    row.mean_rmse_deg = row.std_rmse_deg = std::numeric_limits<double>::quiet_NaN();
    return row;
  }
  double sum = 0.0;
  for (double v : values) sum += v;
  row.mean_rmse_deg = sum / static_cast<double>(values.size());
  double sq = 0.0;
  for (double v : values) sq += (v - row.mean_rmse_deg) * (v - row.mean_rmse_deg);
  row.std_rmse_deg = std::sqrt(sq / static_cast<double>(values.size()));
  return row;
}

void check_id(const std::string& id) {
  const bool ok = !id.empty() && std::all_of(id.begin(), id.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '-';
  });
  if (!ok) throw ConfigError("controller id '" + id + "' must be non-empty and use only letters, digits and '-'");
}

}  // namespace

namespace {

std::vector<std::string> controllers_of(std::span<const TrialRecord> trials) {
  std::vector<std::string> out;
  for (const auto& t : trials) {
    if (std::find(out.begin(), out.end(), t.controller) == out.end()) out.push_back(t.controller);
  }
  return out;
}

}  // namespace

std::vector<SummaryRow> summarize(std::span<const TrialRecord> trials) {
  std::vector<std::string> distributions;
  for (const auto& t : trials) {
    if (std::find(distributions.begin(), distributions.end(), t.distribution) == distributions.end())
      distributions.push_back(t.distribution);
  }
  std::vector<SummaryRow> rows;
  for (const auto& c : controllers_of(trials)) {
    for (const auto& d : distributions) {
      std::vector<double> values;
      for (const auto& t : trials) {
        if (t.controller == c && t.distribution == d && !t.failed) values.push_back(t.rmse_deg);
      }
      rows.push_back(make_row(c, d, values));
    }
  }
  return rows;
}

std::vector<SummaryRow> summarize_overall(std::span<const TrialRecord> trials) {
  std::vector<SummaryRow> rows;
  for (const auto& c : controllers_of(trials)) {
    std::vector<double> values;
    for (const auto& t : trials) {
      if (t.controller == c && !t.failed) values.push_back(t.rmse_deg);
    }
    rows.push_back(make_row(c, "overall", values));
  }
  return rows;
}

SuiteReport evaluate_suite(const plant::PlantConfig& cfg, std::span<const ControllerFactory> controllers,
                           const SuiteCounts& counts, std::uint64_t seed, int setup, int threads) {
  cfg.validate();
  if (controllers.empty()) throw ConfigError("evaluate_suite needs at least one controller");
  for (const auto& c : controllers) check_id(c.id);
  const Grid grid(cfg.trial_duration);

  struct Job {
    Distribution distribution;
    std::size_t index;
    std::uint64_t reference_seed;
    std::uint64_t noise_seed;
    std::size_t reference;
    std::size_t controller;
  };
  std::vector<siggen::SampledSignal> references;
  std::vector<Job> jobs;
  for (auto d : kAllDistributions) {
    const int count = counts.of(d);
    if (count < 0) throw ConfigError("trial counts must be non-negative");
    for (int i = 0; i < count; ++i) {
      const std::string tag = to_string(d) + "-" + std::to_string(i);
      const auto ref_seed = io::derive_seed(seed, "reference-" + tag);
      const auto noise_seed = io::derive_seed(seed, "noise-" + tag);
      references.push_back(draw_reference(d, grid, ref_seed, cfg.output_range));
      for (std::size_t c = 0; c < controllers.size(); ++c)
        jobs.push_back({d, static_cast<std::size_t>(i), ref_seed, noise_seed, references.size() - 1, c});
    }
  }

  SuiteReport report;
  report.seed = seed;
  report.setup = setup;
  report.trials.resize(jobs.size());
  detail::parallel_for(jobs.size(), detail::worker_count(threads, jobs.size()), [&](std::size_t j, unsigned) {
    const Job& job = jobs[j];
    plant::Plant plant(cfg, job.noise_seed, grid.dt());
    auto controller = controllers[job.controller].make();
    TrialRecord rec = run_trial(plant, *controller, references[job.reference]);
    rec.controller = controllers[job.controller].id;
    rec.distribution = to_string(job.distribution);
    rec.index = job.index;
    rec.seed = job.reference_seed;
    rec.noise_seed = job.noise_seed;
    report.trials[j] = std::move(rec);
  });
  report.summary = summarize(report.trials);
  report.overall = summarize_overall(report.trials);
  return report;
}

std::vector<TrialRecord> run_disturbance_trials(const plant::PlantConfig& cfg,
                                                std::span<const ControllerFactory> controllers,
                                                double impulse_torque, double clamp_duration, std::uint64_t seed) {
  cfg.validate();
  const Grid grid(kDisturbanceTrialDuration);
  const auto reference = disturbance_reference(grid);
  const std::pair<const char*, DisturbanceSchedule> schedules[] = {
      {"impulses", DisturbanceSchedule::impulses(impulse_torque)},
      {"clamps", DisturbanceSchedule::clamps(clamp_duration)}};
  std::vector<TrialRecord> out;
  for (const auto& [name, schedule] : schedules) {
    const auto noise_seed = io::derive_seed(seed, std::string("noise-") + name);
    for (const auto& factory : controllers) {
      check_id(factory.id);
      plant::Plant plant(cfg, noise_seed, grid.dt());
      auto controller = factory.make();
      TrialRecord rec = run_trial(plant, *controller, reference, schedule);
      rec.controller = factory.id;
      rec.distribution = name;
      rec.noise_seed = noise_seed;
      out.push_back(std::move(rec));
    }
  }
  return out;
}

namespace {

std::string trial_file(const TrialRecord& t) {
  return t.controller + "_" + t.distribution + "_" + std::to_string(t.index) + "_" + io::to_hex(t.seed) + ".csv";
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double number_from(const json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

json rows_to_json(const std::vector<SummaryRow>& rows) {
  json out = json::array();
  for (const auto& r : rows)
    out.push_back({{"controller", r.controller},
                   {"distribution", r.distribution},
                   {"trials", r.trials},
                   {"mean_rmse_deg", number_or_null(r.mean_rmse_deg)},
                   {"std_rmse_deg", number_or_null(r.std_rmse_deg)}});
  return out;
}

std::vector<SummaryRow> rows_from_json(const json& rows) {
  std::vector<SummaryRow> out;
  for (const auto& r : rows)
    out.push_back({r.at("controller").get<std::string>(), r.at("distribution").get<std::string>(),
                   r.at("trials").get<std::size_t>(), number_from(r.at("mean_rmse_deg")),
                   number_from(r.at("std_rmse_deg"))});
  return out;
}

}  // namespace

void write_trial_csv(const std::filesystem::path& path, const TrialRecord& t) {
  io::write_csv(path, io::Table{{"t", "phi_d", "phi", "phi_meas", "u"}, {t.t, t.phi_d, t.phi, t.phi_meas, t.u}});
}

void export_report(const SuiteReport& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir / "trials");

  std::ostringstream csv;
  csv << std::setprecision(17) << "controller,distribution,trials,mean_rmse_deg,std_rmse_deg\n";
  for (const auto* rows : {&report.summary, &report.overall})
    for (const auto& r : *rows)
      csv << r.controller << ',' << r.distribution << ',' << r.trials << ',' << r.mean_rmse_deg << ','
          << r.std_rmse_deg << '\n';
  io::write_text(dir / "summary.csv", csv.str());

  json j;
  j["seed"] = report.seed;
  j["setup"] = report.setup;
  j["partial"] = report.partial();
  j["summary"] = rows_to_json(report.summary);
  j["overall"] = rows_to_json(report.overall);
  json trials = json::array();
  for (const auto& t : report.trials) {
    json events = json::array();
    for (const auto& e : t.disturbances.events)
      events.push_back({{"kind", to_string(e.kind)},
                        {"start", e.start},
                        {"duration", e.duration},
                        {"magnitude", e.magnitude}});
    const std::string file = trial_file(t);
    trials.push_back({{"controller", t.controller},
                      {"distribution", t.distribution},
                      {"index", t.index},
                      {"seed", t.seed},
                      {"noise_seed", t.noise_seed},
                      {"rmse_deg", number_or_null(t.rmse_deg)},
                      {"failed", t.failed},
                      {"failure", t.failure},
                      {"disturbances", events},
                      {"file", "trials/" + file}});
    write_trial_csv(dir / "trials" / file, t);
  }
  j["trials"] = trials;
  io::write_text(dir / "summary.json", j.dump(2) + "\n");
}

SuiteReport import_report(const std::filesystem::path& dir) {
  SuiteReport report;
  try {
    const json j = json::parse(io::read_text(dir / "summary.json"));
    report.seed = j.at("seed").get<std::uint64_t>();
    report.setup = j.at("setup").get<int>();
    report.summary = rows_from_json(j.at("summary"));
    report.overall = rows_from_json(j.at("overall"));
    for (const auto& tj : j.at("trials")) {
      TrialRecord t;
      t.controller = tj.at("controller").get<std::string>();
      t.distribution = tj.at("distribution").get<std::string>();
      t.index = tj.at("index").get<std::size_t>();
      t.seed = tj.at("seed").get<std::uint64_t>();
      t.noise_seed = tj.at("noise_seed").get<std::uint64_t>();
      t.rmse_deg = number_from(tj.at("rmse_deg"));
      t.failed = tj.at("failed").get<bool>();
      t.failure = tj.at("failure").get<std::string>();
      for (const auto& e : tj.at("disturbances"))
        t.disturbances.events.push_back({disturbance_kind_from_string(e.at("kind").get<std::string>()),
                                         e.at("start").get<double>(), e.at("duration").get<double>(),
                                         e.at("magnitude").get<double>()});
      const auto table = io::read_csv(dir / tj.at("file").get<std::string>());
      t.t = table.column("t");
      t.phi_d = table.column("phi_d");
      t.phi = table.column("phi");
      t.phi_meas = table.column("phi_meas");
      t.u = table.column("u");
      report.trials.push_back(std::move(t));
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed evaluation report: ") + e.what());
  }
  return report;
}

}  // namespace anodec::eval
