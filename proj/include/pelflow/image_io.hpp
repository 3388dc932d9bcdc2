#pragma once

#include <filesystem>
#include <vector>

#include "pelflow/frame.hpp"

namespace pelflow {

/// Reads a binary (P5) PGM with maxval 255. Comment lines are accepted
/// between header tokens. Throws ParseError naming the offending field.
Frame load_pgm(const std::filesystem::path& path);
void save_pgm(const Frame& frame, const std::filesystem::path& path);

/// Loads each path as a frame; sizes must agree.
Sequence load_sequence(const std::vector<std::filesystem::path>& paths);

/// Middlebury .flo: "PIEH", int32 LE width, int32 LE height, then
/// row-major interleaved float32 LE (dx, dy).
void save_flo(const FlowField& flow, const std::filesystem::path& path);
FlowField load_flo(const std::filesystem::path& path);

/// Human-readable dump: header `x,y,dx,dy`, one row per pixel in raster order.
void save_flow_csv(const FlowField& flow, const std::filesystem::path& path);

}  // namespace pelflow
