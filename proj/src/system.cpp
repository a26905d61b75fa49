#include "imgep/system.hpp"

#include <stdexcept>

#include "imgep/errors.hpp"

namespace imgep {

bool ParamSpace::contains(std::span<const double> values) const {
    if (values.size() != bounds.size()) return false;
    for (std::size_t i = 0; i < values.size(); ++i)
        if (!(values[i] >= bounds[i].lo && values[i] <= bounds[i].hi)) return false;
    return true;
}

ParamVector::ParamVector(std::shared_ptr<const ParamSpace> space, std::vector<double> values)
    : space_(std::move(space)), values_(std::move(values)) {
    if (!space_) throw std::invalid_argument("ParamVector requires a parameter space");
    if (!space_->contains(values_)) throw ValidationError("params", "values outside the parameter box");
}

std::shared_ptr<const ParamSpace> gray_scott_space() {
    static const auto space = std::make_shared<const ParamSpace>(ParamSpace{
        std::vector<std::string>{"f", "k"},
        {{gray_scott::kFeedMin, gray_scott::kFeedMax}, {gray_scott::kKillMin, gray_scott::kKillMax}},
        {0.2, 0.001},
    });
    return space;
}

std::shared_ptr<const ParamSpace> lenia_space() {
    static const auto space = [] {
        ParamSpace s;
        s.names = lenia::param_names();
        for (const auto& b : lenia::param_bounds()) s.bounds.push_back({b.lo, b.hi});
        for (const auto& n : s.names) {
            double sigma = 0.2;
            if (n == "T") sigma = 0.5;
            else if (n.rfind("sigma", 0) == 0) sigma = 0.01;
            s.mutation_sigmas.push_back(sigma);
        }
        return std::make_shared<const ParamSpace>(std::move(s));
    }();
    return space;
}

GrayScottSystem::GrayScottSystem(gray_scott::Config config)
    : config_(config), initial_(gray_scott::init_state(config_)), space_(gray_scott_space()) {}

RolloutResult GrayScottSystem::rollout(std::span<const double> params) const {
    if (params.size() != 2) throw std::invalid_argument("gray_scott expects 2 parameters");
    const gray_scott::Params p{params[0], params[1]};
    gray_scott::validate(p);
    try {
        gray_scott::State s = gray_scott::integrate(initial_, p, config_);
        return {config_.observe == gray_scott::Channel::u ? std::move(s.u) : std::move(s.v), false};
    } catch (const DivergentRollout&) {
        return {Grid2D(config_.width, config_.height, 0.0), true};
    }
}

LeniaSystem::LeniaSystem(lenia::Config config)
    : config_(config), initial_(lenia::init_state(config_)), space_(lenia_space()) {}

RolloutResult LeniaSystem::rollout(std::span<const double> params) const {
    const lenia::Params p = lenia::Params::from_vector(params);
    lenia::validate(p);
    try {
        return {lenia::rollout_from(initial_, p, config_), false};
    } catch (const ZeroKernel&) {
        return {Grid2D(config_.width, config_.height, 0.0), true};
    }
}

SystemKind parse_system_kind(const std::string& name) {
    if (name == "gray_scott") return SystemKind::gray_scott;
    if (name == "lenia") return SystemKind::lenia;
    throw ValidationError("system", "unknown system '" + name + "' (expected gray_scott or lenia)");
}

std::string to_string(SystemKind kind) { return kind == SystemKind::gray_scott ? "gray_scott" : "lenia"; }

std::unique_ptr<System> make_system(const SystemSpec& spec, std::uint64_t initial_state_seed) {
    if (spec.kind == SystemKind::gray_scott) {
        gray_scott::Config c = spec.gray_scott;
        c.seed = initial_state_seed;
        return std::make_unique<GrayScottSystem>(c);
    }
    lenia::Config c = spec.lenia;
    c.seed = initial_state_seed;
    return std::make_unique<LeniaSystem>(c);
}

bool is_homogeneous(const Grid2D& obs, double tol) { return obs.max() - obs.min() <= tol; }

}  // namespace imgep
