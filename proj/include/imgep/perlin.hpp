#pragma once

#include <cstdint>

#include "imgep/grid.hpp"

namespace imgep {

// Single-octave gradient noise, min-max normalized to [0, 1].
//
// The gradient lattice has round(side / cell_size) cells per axis (at least
// one) and wraps around, so the field is continuous across the torus seams.
// A flat field (possible only for degenerate lattices) comes back as zeros.
Grid2D perlin_noise(int width, int height, int cell_size, std::uint64_t seed);

}  // namespace imgep
