#include "imgep/lenia.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "imgep/errors.hpp"
#include "imgep/perlin.hpp"

namespace imgep::lenia {

namespace {

constexpr int kPerKernel = 4 + 3 * kBumpCount;

struct Layout {
    std::vector<std::string> names;
    std::vector<ParamBound> bounds;
};

const Layout& layout() {
    static const Layout l = [] {
        Layout out;
        out.names = {"R", "T"};
        out.bounds = {{2.0, 40.0}, {2.0, 20.0}};
        for (int k = 1; k <= kKernelCount; ++k) {
            const std::string s = std::to_string(k);
            out.names.insert(out.names.end(), {"mu" + s, "sigma" + s, "h" + s, "r" + s});
            out.bounds.insert(out.bounds.end(), {{0.05, 0.5}, {0.001, 0.18}, {0.01, 1.0}, {0.2, 1.0}});
            for (const char* field : {"b", "w", "a"}) {
                for (int i = 1; i <= kBumpCount; ++i) {
                    out.names.push_back(std::string(field) + s + "_" + std::to_string(i));
                    if (field[0] == 'b') out.bounds.push_back({0.001, 1.0});
                    else if (field[0] == 'w') out.bounds.push_back({0.01, 0.5});
                    else out.bounds.push_back({0.0, 1.0});
                }
            }
        }
        return out;
    }();
    return l;
}

}  // namespace

const std::vector<std::string>& param_names() { return layout().names; }
const std::vector<ParamBound>& param_bounds() { return layout().bounds; }

std::vector<double> Params::to_vector() const {
    std::vector<double> v{R, T};
    v.reserve(kParamCount);
    for (const Kernel& k : kernels) {
        v.insert(v.end(), {k.mu, k.sigma, k.h, k.r});
        for (const Bump& b : k.bumps) v.push_back(b.b);
        for (const Bump& b : k.bumps) v.push_back(b.w);
        for (const Bump& b : k.bumps) v.push_back(b.a);
    }
    return v;
}

Params Params::from_vector(std::span<const double> values) {
    if (values.size() != static_cast<std::size_t>(kParamCount))
        throw std::invalid_argument("lenia::Params::from_vector expects 41 values");
    Params p;
    p.R = values[0];
    p.T = values[1];
    for (int k = 0; k < kKernelCount; ++k) {
        const auto kv = values.subspan(2 + static_cast<std::size_t>(k) * kPerKernel, kPerKernel);
        Kernel& kernel = p.kernels[k];
        kernel.mu = kv[0];
        kernel.sigma = kv[1];
        kernel.h = kv[2];
        kernel.r = kv[3];
        for (int i = 0; i < kBumpCount; ++i) {
            kernel.bumps[i].b = kv[4 + i];
            kernel.bumps[i].w = kv[4 + kBumpCount + i];
            kernel.bumps[i].a = kv[4 + 2 * kBumpCount + i];
        }
    }
    return p;
}

void validate(const Params& p) {
    const auto v = p.to_vector();
    const auto& bounds = param_bounds();
    for (std::size_t i = 0; i < v.size(); ++i)
        if (!(v[i] >= bounds[i].lo && v[i] <= bounds[i].hi))
            throw ValidationError(param_names()[i], "out of bounds [" + std::to_string(bounds[i].lo) + ", " +
                                                        std::to_string(bounds[i].hi) + "]");
}

void validate(const Config& c) {
    if (c.width < 1 || c.height < 1) throw ValidationError("width/height", "must be >= 1");
    if (c.steps < 1) throw ValidationError("steps", "must be >= 1");
    if (c.perlin_cell_size < 1 || c.perlin_cell_size > std::max(c.width, c.height))
        throw ValidationError("perlin_cell_size", "must be in [1, grid side]");
}

double growth(double x, double mu, double sigma) {
    const double z = (x - mu) / sigma;
    return 2.0 * std::exp(-0.5 * z * z) - 1.0;
}

Grid2D kernel_grid(const Kernel& kernel, double R, int width, int height) {
    const double radius = kernel.r * R;
    Grid2D out(width, height);
    double total = 0.0;
    for (int y = 0; y < height; ++y) {
        const int dy = std::min(y, height - y);
        for (int x = 0; x < width; ++x) {
            const int dx = std::min(x, width - x);
            const double d = std::sqrt(static_cast<double>(dx * dx + dy * dy));
            if (d > radius) continue;
            const double rel = d / radius;
            double value = 0.0;
            for (const Bump& bump : kernel.bumps) {
                const double z = (rel - bump.a) / bump.w;
                value += bump.b * std::exp(-0.5 * z * z);
            }
            out(x, y) = value;
            total += value;
        }
    }
    if (total < 1e-12) throw ZeroKernel("lenia kernel has (near-)zero mass");
    for (double& v : out.values()) v /= total;
    return out;
}

namespace {

std::vector<Grid2D> build_kernels(const Params& p, int width, int height) {
    std::vector<Grid2D> kernels;
    for (const Kernel& k : p.kernels) kernels.push_back(kernel_grid(k, p.R, width, height));
    return kernels;
}

}  // namespace

Stepper::Stepper(const Params& p, int width, int height)
    : params_(p), convolver_(width, height, build_kernels(p, width, height)) {}

void Stepper::step_in_place(Grid2D& a) const {
    convolver_.convolve(a, potentials_);
    const double dt = 1.0 / params_.T;
    auto cells = a.values();
    for (std::size_t i = 0; i < cells.size(); ++i) {
        double delta = 0.0;
        for (int k = 0; k < kKernelCount; ++k) {
            const Kernel& kernel = params_.kernels[k];
            delta += kernel.h * growth(potentials_[k].values()[i], kernel.mu, kernel.sigma);
        }
        cells[i] = std::clamp(cells[i] + dt * delta, 0.0, 1.0);
    }
}

Grid2D Stepper::step(const Grid2D& a) const {
    Grid2D out = a;
    step_in_place(out);
    return out;
}

Grid2D step(const Grid2D& a, const Params& p) { return Stepper(p, a.width(), a.height()).step(a); }

Grid2D init_state(const Config& config) {
    validate(config);
    return perlin_noise(config.width, config.height, config.perlin_cell_size, config.seed);
}

Grid2D rollout_from(const Grid2D& initial, const Params& p, const Config& config) {
    const Stepper stepper(p, initial.width(), initial.height());
    Grid2D a = initial;
    for (int t = 0; t < config.steps; ++t) stepper.step_in_place(a);
    return a;
}

Grid2D rollout(const Params& p, const Config& config) {
    validate(p);
    return rollout_from(init_state(config), p, config);
}

}  // namespace imgep::lenia
