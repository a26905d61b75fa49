#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "imgep/gray_scott.hpp"
#include "imgep/grid.hpp"
#include "imgep/lenia.hpp"

namespace imgep {

struct Interval {
    double lo;
    double hi;
};

// Named, bounded parameter box with per-dimension mutation scales (raw units).
struct ParamSpace {
    std::vector<std::string> names;
    std::vector<Interval> bounds;
    std::vector<double> mutation_sigmas;

    std::size_t dims() const { return names.size(); }
    bool contains(std::span<const double> values) const;
};

// A point in a ParamSpace. The space is shared, never copied per sample.
class ParamVector {
public:
    ParamVector() = default;
    ParamVector(std::shared_ptr<const ParamSpace> space, std::vector<double> values);

    const ParamSpace& space() const { return *space_; }
    const std::shared_ptr<const ParamSpace>& space_ptr() const { return space_; }
    std::span<const double> values() const { return values_; }
    std::size_t size() const { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }

    bool operator==(const ParamVector& other) const { return values_ == other.values_; }

private:
    std::shared_ptr<const ParamSpace> space_;
    std::vector<double> values_;
};

struct RolloutResult {
    Grid2D observation;
    // Divergent (Gray-Scott) or zero-kernel (Lenia) rollouts come back as a
    // constant-0 observation with this flag set.
    bool invalid = false;
};

// A seeded grid system with a fixed initial state. rollout() is pure and safe
// to call concurrently.
class System {
public:
    virtual ~System() = default;
    virtual std::string name() const = 0;
    virtual const std::shared_ptr<const ParamSpace>& space() const = 0;
    virtual RolloutResult rollout(std::span<const double> params) const = 0;
};

class GrayScottSystem final : public System {
public:
    explicit GrayScottSystem(gray_scott::Config config);

    std::string name() const override { return "gray_scott"; }
    const std::shared_ptr<const ParamSpace>& space() const override { return space_; }
    RolloutResult rollout(std::span<const double> params) const override;

    const gray_scott::Config& config() const { return config_; }
    const gray_scott::State& initial_state() const { return initial_; }

private:
    gray_scott::Config config_;
    gray_scott::State initial_;
    std::shared_ptr<const ParamSpace> space_;
};

class LeniaSystem final : public System {
public:
    explicit LeniaSystem(lenia::Config config);

    std::string name() const override { return "lenia"; }
    const std::shared_ptr<const ParamSpace>& space() const override { return space_; }
    RolloutResult rollout(std::span<const double> params) const override;

    const lenia::Config& config() const { return config_; }
    const Grid2D& initial_state() const { return initial_; }

private:
    lenia::Config config_;
    Grid2D initial_;
    std::shared_ptr<const ParamSpace> space_;
};

std::shared_ptr<const ParamSpace> gray_scott_space();
std::shared_ptr<const ParamSpace> lenia_space();

enum class SystemKind { gray_scott, lenia };

SystemKind parse_system_kind(const std::string& name);
std::string to_string(SystemKind kind);

// Declarative system description: kind plus rollout settings. The Perlin seed of
// the initial state is not part of it; it is derived from the explorer seed.
struct SystemSpec {
    SystemKind kind = SystemKind::gray_scott;
    gray_scott::Config gray_scott{};
    lenia::Config lenia{};
};

std::unique_ptr<System> make_system(const SystemSpec& spec, std::uint64_t initial_state_seed);

// True iff (max - min) <= tol.
bool is_homogeneous(const Grid2D& obs, double tol = 1e-4);

}  // namespace imgep
