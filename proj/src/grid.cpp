#include "imgep/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace imgep {

Grid2D::Grid2D(int width, int height, double fill) : width_(width), height_(height) {
    if (width < 1 || height < 1) throw std::invalid_argument("Grid2D dimensions must be >= 1");
    values_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
}

Grid2D::Grid2D(int width, int height, std::vector<double> values)
    : width_(width), height_(height), values_(std::move(values)) {
    if (width < 1 || height < 1) throw std::invalid_argument("Grid2D dimensions must be >= 1");
    if (values_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height))
        throw std::invalid_argument("Grid2D value count must equal width * height");
}

double Grid2D::wrapped(int x, int y) const {
    x %= width_;
    y %= height_;
    if (x < 0) x += width_;
    if (y < 0) y += height_;
    return (*this)(x, y);
}

double Grid2D::min() const { return *std::min_element(values_.begin(), values_.end()); }
double Grid2D::max() const { return *std::max_element(values_.begin(), values_.end()); }

bool Grid2D::all_finite() const {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace imgep
