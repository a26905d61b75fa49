#pragma once

#include <cmath>

#include "imgep/system.hpp"

// Cheap stand-in for a simulator: an 8x8 grid whose first round(64 a) cells hold
// 0.2 + 0.8 b, so volume tracks a and mean pixel tracks a * b.
class FakeSystem final : public imgep::System {
public:
    FakeSystem() {
        auto s = std::make_shared<imgep::ParamSpace>();
        s->names = {"a", "b"};
        s->bounds = {{0.0, 1.0}, {0.0, 1.0}};
        s->mutation_sigmas = {0.05, 0.05};
        space_ = s;
    }
    std::string name() const override { return "fake"; }
    const std::shared_ptr<const imgep::ParamSpace>& space() const override { return space_; }
    imgep::RolloutResult rollout(std::span<const double> p) const override {
        imgep::Grid2D g(8, 8);
        const auto n = static_cast<std::size_t>(std::lround(64.0 * p[0]));
        for (std::size_t i = 0; i < n; ++i) g.values()[i] = 0.2 + 0.8 * p[1] * static_cast<double>(i % 5) / 4.0;
        return {g, false};
    }

private:
    std::shared_ptr<const imgep::ParamSpace> space_;
};
