#include "anodec/nets/checkpoint.hpp"

#include <json.hpp>
#include <vector>

#include "anodec/io/files.hpp"
#include "anodec/odecore/errors.hpp"

namespace anodec::nets {

namespace {

using nlohmann::json;

template <class Params>
std::string dump(const Params& p, const char* kind, int inputs) {
  json j;
  j["format_version"] = kCheckpointFormatVersion;
  j["net"] = kind;
  j["dims"] = {{"latent", Params::kLatent}, {"inputs", inputs}, {"outputs", 1}, {"params", Params::kSize}};
  j["layout"] = "row-major A1, b1, A2, b2";
  std::vector<double> flat(p.flat().data(), p.flat().data() + Params::kSize);
  j["params"] = flat;
  return j.dump(2) + "\n";
}

template <class Params>
Params parse(const std::string& text, const char* kind, int inputs) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("checkpoint is not valid JSON: ") + e.what());
  }
  try {
    if (j.at("format_version").get<int>() != kCheckpointFormatVersion) {
      throw ConfigError("unsupported checkpoint format version");
    }
    if (j.at("net").get<std::string>() != kind) {
      throw ConfigError(std::string("checkpoint is not a ") + kind + " checkpoint");
    }
    const auto& dims = j.at("dims");
    if (dims.at("latent").get<int>() != Params::kLatent || dims.at("inputs").get<int>() != inputs ||
        dims.at("params").get<int>() != Params::kSize) {
      throw ConfigError("checkpoint dimensions do not match");
    }
    const auto values = j.at("params").get<std::vector<double>>();
    if (values.size() != static_cast<std::size_t>(Params::kSize)) {
      throw ConfigError("checkpoint holds " + std::to_string(values.size()) + " scalars, expected " +
                        std::to_string(Params::kSize));
    }
    return Params::from_span(values);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed checkpoint: ") + e.what());
  }
}

}  // namespace

std::string to_checkpoint_json(const ModelParams& params) { return dump(params, "model", 1); }
std::string to_checkpoint_json(const ControllerParams& params) { return dump(params, "controller", 2); }

ModelParams model_from_checkpoint_json(const std::string& text) { return parse<ModelParams>(text, "model", 1); }
ControllerParams controller_from_checkpoint_json(const std::string& text) {
  return parse<ControllerParams>(text, "controller", 2);
}

void save_checkpoint(const std::filesystem::path& path, const ModelParams& params) {
  io::write_text(path, to_checkpoint_json(params));
}
void save_checkpoint(const std::filesystem::path& path, const ControllerParams& params) {
  io::write_text(path, to_checkpoint_json(params));
}
ModelParams load_model_checkpoint(const std::filesystem::path& path) {
  return model_from_checkpoint_json(io::read_text(path));
}
ControllerParams load_controller_checkpoint(const std::filesystem::path& path) {
  return controller_from_checkpoint_json(io::read_text(path));
}

}  // namespace anodec::nets
