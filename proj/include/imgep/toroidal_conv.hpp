#pragma once

#include <complex>
#include <vector>

#include "imgep/grid.hpp"

namespace imgep {

// Circular (toroidal) convolution of one field against a fixed set of kernels
// via real-to-complex FFTs. Kernels are given origin-centered: entry (dx, dy)
// is the weight applied to the neighbour at offset (dx, dy), wrapped.
//
// Thread-safe for concurrent use of distinct instances.
class ToroidalConvolver {
public:
    ToroidalConvolver(int width, int height, const std::vector<Grid2D>& kernels);

    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t kernel_count() const { return spectra_.size(); }

    // out[k](x, y) = sum_{dx,dy} kernel_k(dx, dy) * field(x - dx, y - dy)
    void convolve(const Grid2D& field, std::vector<Grid2D>& out) const;

private:
    int width_;
    int height_;
    std::vector<std::vector<std::complex<double>>> spectra_;
    mutable std::vector<double> real_scratch_;
    mutable std::vector<std::complex<double>> field_spectrum_;
    mutable std::vector<std::complex<double>> product_;
};

// Direct O(N * support) evaluation of the same convolution; for small grids and tests.
Grid2D convolve_direct(const Grid2D& field, const Grid2D& kernel);

}  // namespace imgep
