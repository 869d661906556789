#pragma once

#include "defence/motion.hpp"

#include <filesystem>

namespace defence {

/// Middlebury .flo: float magic 202021.25, int32 width, int32 height, then
/// interleaved float32 (u, v) in row-major order, little endian.
FlowField read_flow(const std::filesystem::path& path);
void write_flow(const std::filesystem::path& path, const FlowField& flow);

}  // namespace defence
