#include "imgep/perlin.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

namespace imgep {

namespace {

double fade(double t) { return t * t * t * (t * (t * 6.0 - 15.0) + 10.0); }

struct Gradient {
    double x;
    double y;
};

}  // namespace

Grid2D perlin_noise(int width, int height, int cell_size, std::uint64_t seed) {
    if (width < 1 || height < 1) throw std::invalid_argument("perlin_noise: grid dimensions must be >= 1");
    if (cell_size < 1) throw std::invalid_argument("perlin_noise: cell_size must be >= 1");

    const int cells_x = std::max(1, static_cast<int>(std::lround(static_cast<double>(width) / cell_size)));
    const int cells_y = std::max(1, static_cast<int>(std::lround(static_cast<double>(height) / cell_size)));

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    std::vector<Gradient> lattice(static_cast<std::size_t>(cells_x) * cells_y);
    for (auto& g : lattice) {
        const double a = angle(rng);
        g = {std::cos(a), std::sin(a)};
    }
    auto grad_at = [&](int i, int j) -> const Gradient& {
        return lattice[static_cast<std::size_t>(j % cells_y) * cells_x + static_cast<std::size_t>(i % cells_x)];
    };

    Grid2D out(width, height);
    const double sx = static_cast<double>(cells_x) / width;
    const double sy = static_cast<double>(cells_y) / height;
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            // Sample at pixel centers.
            const double px = (x + 0.5) * sx;
            const double py = (y + 0.5) * sy;
            const int i0 = static_cast<int>(std::floor(px));
            const int j0 = static_cast<int>(std::floor(py));
            const double fx = px - i0;
            const double fy = py - j0;

            auto dot = [&](int di, int dj) {
                const Gradient& g = grad_at(i0 + di, j0 + dj);
                return g.x * (fx - di) + g.y * (fy - dj);
            };
            const double u = fade(fx);
            const double v = fade(fy);
            const double top = dot(0, 0) + u * (dot(1, 0) - dot(0, 0));
            const double bottom = dot(0, 1) + u * (dot(1, 1) - dot(0, 1));
            out(x, y) = top + v * (bottom - top);
        }
    }

    const double lo = out.min();
    const double hi = out.max();
    const double range = hi - lo;
    for (double& value : out.values()) value = range > 0.0 ? (value - lo) / range : 0.0;
    return out;
}

}  // namespace imgep
