#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "imgep/grid.hpp"

namespace imgep {

// 8-bit grayscale PNG; each cell maps to round(255 * clip(v, 0, 1)).
std::vector<std::uint8_t> encode_png(const Grid2D& grid);

struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;  // row-major
};

// Decodes an 8-bit grayscale PNG. Throws std::runtime_error on anything else.
GrayImage decode_png(const std::vector<std::uint8_t>& bytes);

void write_png(const std::string& path, const Grid2D& grid);

}  // namespace imgep
