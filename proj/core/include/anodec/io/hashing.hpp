#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace anodec::io {

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes);

/// Independent per-stage seed derived from a master seed and a stage label.
/// Stable across platforms and builds.
std::uint64_t derive_seed(std::uint64_t master, std::string_view label);

/// Sixteen lowercase hex digits.
std::string to_hex(std::uint64_t value);

}  // namespace anodec::io
