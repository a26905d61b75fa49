#pragma once

#include <cstdint>
#include <utility>

#include "imgep/grid.hpp"

namespace imgep::gray_scott {

inline constexpr double kDiffusionU = 0.5;
inline constexpr double kDiffusionV = 0.25;
inline constexpr double kSeedThreshold = 0.7;

inline constexpr double kFeedMin = 0.001, kFeedMax = 0.2;
inline constexpr double kKillMin = 0.01, kKillMax = 0.075;

// classical:  dv/dt = Dv lap(v) + u v^2 - (f + k) v
// as_printed: dv/dt = Dv lap(v) + u v^2 - (f - k) v
enum class KillTerm { classical, as_printed };

// five_point: (N + S + E + W - 4 c); explicit Euler needs dt <= 1 / (8 Du) ≈ 0.25..0.5.
// nine_point: 0.2 (N + S + E + W) + 0.05 (diagonals) - c; stable at dt = 1 for Du = 0.5.
enum class Stencil { five_point, nine_point };

enum class Channel { u, v };

struct Params {
    double f = 0.035;
    double k = 0.065;
};

struct Config {
    int width = 32;
    int height = 32;
    int steps = 2000;
    double dt = 1.0;
    int perlin_cell_size = 8;
    double perlin_threshold = kSeedThreshold;
    KillTerm kill_term = KillTerm::classical;
    Stencil stencil = Stencil::nine_point;
    Channel observe = Channel::v;
    std::uint64_t seed = 0;
};

struct State {
    Grid2D u;
    Grid2D v;
};

void validate(const Params& p);
void validate(const Config& c);

// u = 1 everywhere; v = 1 where the normalized Perlin field exceeds the threshold.
State init_state(const Config& config);

// One forward-Euler step on the torus. Does not check finiteness.
State step(const State& s, const Params& p, double dt, KillTerm kill_term = KillTerm::classical,
           Stencil stencil = Stencil::nine_point);

// Writes the next state into `out`, which must already have the grid dimensions.
void step_into(const State& s, State& out, const Params& p, double dt, KillTerm kill_term, Stencil stencil);

// Runs `config.steps` steps from `initial`. Throws DivergentRollout if any value
// becomes non-finite.
State integrate(const State& initial, const Params& p, const Config& config);

// Final state of a rollout from init_state(config).
State rollout_state(const Params& p, const Config& config);

// Observed channel (config.observe) of rollout_state().
Grid2D rollout(const Params& p, const Config& config);

}  // namespace imgep::gray_scott
