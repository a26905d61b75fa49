#include "imgep/gray_scott.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "imgep/errors.hpp"
#include "imgep/perlin.hpp"

namespace imgep::gray_scott {

namespace {

constexpr int kFiniteCheckInterval = 64;

}  // namespace

void validate(const Params& p) {
    if (!(p.f >= kFeedMin && p.f <= kFeedMax))
        throw ValidationError("f", "feed rate must lie in [0.001, 0.2]");
    if (!(p.k >= kKillMin && p.k <= kKillMax))
        throw ValidationError("k", "kill rate must lie in [0.01, 0.075]");
}

void validate(const Config& c) {
    if (c.width < 1 || c.height < 1) throw ValidationError("width/height", "must be >= 1");
    if (c.steps < 1) throw ValidationError("steps", "must be >= 1");
    if (!(c.dt > 0.0) || !std::isfinite(c.dt * c.steps)) throw ValidationError("dt", "must be positive and finite");
    if (c.perlin_cell_size < 1 || c.perlin_cell_size > std::max(c.width, c.height))
        throw ValidationError("perlin_cell_size", "must be in [1, grid side]");
}

State init_state(const Config& config) {
    validate(config);
    const Grid2D noise = perlin_noise(config.width, config.height, config.perlin_cell_size, config.seed);
    State s{Grid2D(config.width, config.height, 1.0), Grid2D(config.width, config.height, 0.0)};
    for (std::size_t i = 0; i < noise.size(); ++i)
        s.v.values()[i] = noise.values()[i] > config.perlin_threshold ? 1.0 : 0.0;
    return s;
}

void step_into(const State& s, State& out, const Params& p, double dt, KillTerm kill_term, Stencil stencil) {
    const int w = s.u.width();
    const int h = s.u.height();
    if (s.v.width() != w || s.v.height() != h) throw std::invalid_argument("gray_scott::step: u and v dimensions differ");
    const double loss = kill_term == KillTerm::classical ? p.f + p.k : p.f - p.k;
    const bool nine = stencil == Stencil::nine_point;

    const auto u = s.u.values();
    const auto v = s.v.values();
    auto nu = out.u.values();
    auto nv = out.v.values();
    auto laplacian = [nine](std::span<const double> a, std::size_t up, std::size_t row, std::size_t down,
                            std::size_t left, std::size_t x, std::size_t right) {
        const double axial = a[up + x] + a[down + x] + a[row + left] + a[row + right];
        if (!nine) return axial - 4.0 * a[row + x];
        const double diagonal = a[up + left] + a[up + right] + a[down + left] + a[down + right];
        return 0.2 * axial + 0.05 * diagonal - a[row + x];
    };
    for (int y = 0; y < h; ++y) {
        const std::size_t row = static_cast<std::size_t>(y) * w;
        const std::size_t up = static_cast<std::size_t>(y == 0 ? h - 1 : y - 1) * w;
        const std::size_t down = static_cast<std::size_t>(y == h - 1 ? 0 : y + 1) * w;
        for (int xi = 0; xi < w; ++xi) {
            const std::size_t x = static_cast<std::size_t>(xi);
            const std::size_t left = xi == 0 ? w - 1 : x - 1;
            const std::size_t right = xi == w - 1 ? 0 : x + 1;
            const std::size_t i = row + x;
            const double lap_u = laplacian(u, up, row, down, left, x, right);
            const double lap_v = laplacian(v, up, row, down, left, x, right);
            const double uvv = u[i] * v[i] * v[i];
            nu[i] = u[i] + dt * (kDiffusionU * lap_u - uvv + p.f * (1.0 - u[i]));
            nv[i] = v[i] + dt * (kDiffusionV * lap_v + uvv - loss * v[i]);
        }
    }
}

State step(const State& s, const Params& p, double dt, KillTerm kill_term, Stencil stencil) {
    if (!(dt > 0.0)) throw std::invalid_argument("gray_scott::step: dt must be positive");
    State out{Grid2D(s.u.width(), s.u.height()), Grid2D(s.u.width(), s.u.height())};
    step_into(s, out, p, dt, kill_term, stencil);
    return out;
}

State integrate(const State& initial, const Params& p, const Config& config) {
    State a = initial;
    State b = initial;
    for (int t = 0; t < config.steps; ++t) {
        step_into(a, b, p, config.dt, config.kill_term, config.stencil);
        std::swap(a, b);
        if ((t + 1) % kFiniteCheckInterval == 0 && !(a.u.all_finite() && a.v.all_finite()))
            throw DivergentRollout("gray_scott rollout diverged at step " + std::to_string(t + 1));
    }
    if (!(a.u.all_finite() && a.v.all_finite())) throw DivergentRollout("gray_scott rollout diverged");
    return a;
}

State rollout_state(const Params& p, const Config& config) {
    validate(p);
    return integrate(init_state(config), p, config);
}

Grid2D rollout(const Params& p, const Config& config) {
    State s = rollout_state(p, config);
    return config.observe == Channel::u ? std::move(s.u) : std::move(s.v);
}

}  // namespace imgep::gray_scott
