#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "imgep/grid.hpp"
#include "imgep/toroidal_conv.hpp"

namespace imgep::lenia {

inline constexpr int kKernelCount = 3;
inline constexpr int kBumpCount = 3;
inline constexpr int kParamCount = kKernelCount * (kBumpCount * 3 + 4) + 2;
static_assert(kParamCount == 41);

struct Bump {
    double b = 1.0;  // height
    double w = 0.1;  // width, in units of the kernel radius
    double a = 0.5;  // center, in units of the kernel radius
};

struct Kernel {
    double mu = 0.15;
    double sigma = 0.015;
    double h = 1.0;
    double r = 1.0;
    std::array<Bump, kBumpCount> bumps{};
};

struct Params {
    double R = 13.0;
    double T = 10.0;
    std::array<Kernel, kKernelCount> kernels{};

    // Flat layout: R, T, then per kernel: mu, sigma, h, r, b1..b3, w1..w3, a1..a3.
    std::vector<double> to_vector() const;
    static Params from_vector(std::span<const double> values);
};

struct ParamBound {
    double lo;
    double hi;
};

// Names and bounds of the 41 flat parameters, in to_vector() order.
const std::vector<std::string>& param_names();
const std::vector<ParamBound>& param_bounds();

struct Config {
    int width = 64;
    int height = 64;
    int steps = 200;
    int perlin_cell_size = 8;
    std::uint64_t seed = 0;
};

void validate(const Params& p);
void validate(const Config& c);

// 2 exp(-(x - mu)^2 / (2 sigma^2)) - 1
double growth(double x, double mu, double sigma);

// Radial kernel sum_i b_i exp(-((d / (r R) - a_i)^2) / (2 w_i^2)) for toroidal
// distance d <= r R from the origin, zero beyond, normalized to unit sum.
// Origin-centered: cell (0, 0) holds the center weight.
// Throws ZeroKernel when the un-normalized sum is below 1e-12.
Grid2D kernel_grid(const Kernel& kernel, double R, int width, int height);

// Precomputed per-parameter stepping state (kernel spectra).
class Stepper {
public:
    Stepper(const Params& p, int width, int height);

    // clip(A + dt * sum_k h_k G_k(K_k * A), 0, 1) with dt = 1 / T.
    Grid2D step(const Grid2D& a) const;
    void step_in_place(Grid2D& a) const;

private:
    Params params_;
    ToroidalConvolver convolver_;
    mutable std::vector<Grid2D> potentials_;
};

Grid2D step(const Grid2D& a, const Params& p);

// Perlin field (not thresholded).
Grid2D init_state(const Config& config);

Grid2D rollout(const Params& p, const Config& config);
Grid2D rollout_from(const Grid2D& initial, const Params& p, const Config& config);

}  // namespace imgep::lenia
