#include <json.hpp>

#include "anodec/io/csv.hpp"
#include "anodec/learn/train.hpp"

namespace anodec::learn {

using nlohmann::json;

std::string report_to_json(const TrainReport& r) {
  json j;
  j["stage"] = r.stage;
  j["seed"] = r.seed;
  j["config_hash"] = r.config_hash;
  j["checkpoint"] = r.checkpoint;
  j["best_step"] = r.best_step;
  j["best_validation_loss"] = r.best_validation_loss;
  j["final_validation_loss"] = r.final_validation_loss;
  j["initial_eval_objective"] = r.initial_eval_objective;
  j["final_eval_objective"] = r.final_eval_objective;
  j["wall_clock_seconds"] = r.wall_clock_seconds;
  j["steps"] = r.train_loss.size();
  j["train_loss"] = r.train_loss;
  j["regularization"] = r.regularization;
  j["tracking"] = r.tracking;
  json val = json::array();
  for (const auto& v : r.validation) val.push_back({{"step", v.step}, {"loss", v.loss}});
  j["validation"] = val;
  return j.dump(2) + "\n";
}

TrainReport report_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    TrainReport r;
    r.stage = j.at("stage").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.config_hash = j.at("config_hash").get<std::string>();
    r.checkpoint = j.at("checkpoint").get<std::string>();
    r.best_step = j.at("best_step").get<int>();
    r.best_validation_loss = j.at("best_validation_loss").get<double>();
    r.final_validation_loss = j.at("final_validation_loss").get<double>();
    r.initial_eval_objective = j.at("initial_eval_objective").get<double>();
    r.final_eval_objective = j.at("final_eval_objective").get<double>();
    r.wall_clock_seconds = j.at("wall_clock_seconds").get<double>();
    r.train_loss = j.at("train_loss").get<std::vector<double>>();
    r.regularization = j.at("regularization").get<std::vector<double>>();
    r.tracking = j.at("tracking").get<std::vector<double>>();
    for (const auto& v : j.at("validation")) r.validation.push_back({v.at("step").get<int>(), v.at("loss").get<double>()});
    return r;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed training report: ") + e.what());
  }
}

void write_loss_curve_csv(const std::filesystem::path& path, const TrainReport& report) {
  io::Table t;
  std::vector<double> steps(report.train_loss.size());
  for (std::size_t i = 0; i < steps.size(); ++i) steps[i] = static_cast<double>(i + 1);
  t.header = {"step", "loss"};
  t.columns = {steps, report.train_loss};
  if (!report.tracking.empty()) {
    t.header.insert(t.header.end(), {"regularization", "tracking"});
    t.columns.push_back(report.regularization);
    t.columns.push_back(report.tracking);
  }
  io::write_csv(path, t);
}

}  // namespace anodec::learn
