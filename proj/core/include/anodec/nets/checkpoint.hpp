#pragma once

// JSON checkpoints: a small header (format version, net kind, dimensions,
// layout) followed by the flat parameter list in row-major A1, b1, A2, b2
// order. Values are written in shortest round-trip form, so save/load is
// bit-exact at double precision.

#include <filesystem>
#include <string>

#include "anodec/nets/params.hpp"

namespace anodec::nets {

inline constexpr int kCheckpointFormatVersion = 1;

std::string to_checkpoint_json(const ModelParams& params);
std::string to_checkpoint_json(const ControllerParams& params);

/// Throw ConfigError on a wrong net kind, version, dimensions or count.
ModelParams model_from_checkpoint_json(const std::string& text);
ControllerParams controller_from_checkpoint_json(const std::string& text);

void save_checkpoint(const std::filesystem::path& path, const ModelParams& params);
void save_checkpoint(const std::filesystem::path& path, const ControllerParams& params);
ModelParams load_model_checkpoint(const std::filesystem::path& path);
ControllerParams load_controller_checkpoint(const std::filesystem::path& path);

}  // namespace anodec::nets
