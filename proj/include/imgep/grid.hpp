#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace imgep {

// Real-valued field on a toroidal width x height lattice, stored row-major.
class Grid2D {
public:
    Grid2D() = default;
    Grid2D(int width, int height, double fill = 0.0);
    Grid2D(int width, int height, std::vector<double> values);

    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t size() const { return values_.size(); }

    double& operator()(int x, int y) { return values_[index(x, y)]; }
    double operator()(int x, int y) const { return values_[index(x, y)]; }

    // Wraps out-of-range coordinates around the torus.
    double wrapped(int x, int y) const;

    std::span<double> values() { return values_; }
    std::span<const double> values() const { return values_; }

    double min() const;
    double max() const;
    bool all_finite() const;

    bool operator==(const Grid2D&) const = default;

private:
    std::size_t index(int x, int y) const {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<double> values_;
};

}  // namespace imgep
