#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "sdc/core.hpp"
#include "sdc/geometry.hpp"

namespace sdc {

// --- PFM: float grids, grayscale "Pf", bottom-up rows, sign of the scale
// --- field selects the byte order (negative = little endian).

void pfm_write(const std::string& path, const Grid<float>& grid);
Grid<float> pfm_read(const std::string& path);

void pfm_write_image(const std::string& path, const ImageGrid& img);
ImageGrid pfm_read_image(const std::string& path);

/// Writes a dense inverse depth map as PFM (values are inverse depth [1/m]).
void pfm_write_inv_depth(const std::string& path, const InvDepthMap& map);
InvDepthMap pfm_read_inv_depth(const std::string& path);

// --- PGM: binary P5, maxval 255 or 65535 (two-byte samples big-endian).

void pgm_write(const std::string& path, const ImageGrid& img, int maxval = 255);
ImageGrid pgm_read(const std::string& path);

// --- 16-bit single-channel PNG holding depth in 1/256 m units; the stored
// --- value round(depth_m * 256) of 0 marks an empty pixel.

void png16_depth_write(const std::string& path, const InvDepthMap& map);
InvDepthMap png16_depth_read(const std::string& path);

// --- ASCII PLY point cloud writer with optional per-point color.

void ply_write(const std::string& path, const PointCloud& points,
               const std::vector<std::array<uint8_t, 3>>* colors = nullptr);

}  // namespace sdc
