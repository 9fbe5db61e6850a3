#pragma once

#include <filesystem>

#include "imscat/grid.hpp"

namespace imscat {

/// Fixed color scale for Re q: values at or below kHeatmapMin are black,
/// values at or above kHeatmapMax are full green.
inline constexpr double kHeatmapMin = 0.0;
inline constexpr double kHeatmapMax = 0.12;
inline constexpr int kHeatmapCellPixels = 16;

/// Green intensity (0..255) for a real value on the fixed scale.
unsigned char heatmap_level(double value);

/// Writes an RGB PNG with one kHeatmapCellPixels square per cell. The top
/// image row holds the highest m2, the left column the lowest m1.
void render_heatmap(const Medium& medium, const std::filesystem::path& path);

}  // namespace imscat
