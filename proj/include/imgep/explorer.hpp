#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "imgep/features.hpp"
#include "imgep/grid.hpp"
#include "imgep/system.hpp"

namespace imgep::explorer {

// R: uniform sampling. N: nearest neighbour on all behavior axes.
// NRA: nearest neighbour on a random axis subset. NRAB: NRA with balanced
// global/constrained candidate sets.
enum class Method { R, N, NRA, NRAB };

Method parse_method(const std::string& name);
std::string to_string(Method method);

// Closed interval [lo, hi] on one constraint feature.
struct Constraint {
    std::string feature;
    double lo = 0.0;
    double hi = 0.0;

    bool operator==(const Constraint&) const = default;
};

// Conjunction of constraints; empty means everything is an inlier.
struct Roi {
    std::vector<Constraint> constraints;

    // Throws UnknownFeature for unknown names, ValidationError for lo > hi.
    void validate() const;
    bool operator==(const Roi&) const = default;
};

// The experiment ROI used throughout the benchmarks: volume in [0.6, 0.7].
Roi volume_roi(double lo = 0.6, double hi = 0.7);

// +1 if every interval contains its feature value, -1 otherwise.
int classify(const features::ConstraintFeatures& f, const Roi& roi);

struct ExplorerConfig {
    int n_init = 250;
    int budget = 1000;
    double balance_prob = 0.5;
    int subspace_dims = 3;
    Method method = Method::NRAB;
    std::vector<double> mutation_sigmas;  // empty: the system's defaults
    std::uint64_t seed = 0;

    // Throws ValidationError with the offending field name.
    void validate(const ParamSpace& space) const;
};

struct HistoryEntry {
    std::size_t index = 0;
    ParamVector params;
    std::shared_ptr<const Grid2D> observation;  // may be released once exported
    features::BehaviorVector behavior;
    features::ConstraintFeatures constraint_features;
    int classification = -1;
    bool invalid = false;        // divergent / zero-kernel rollout
    bool homogeneous = false;    // is_homogeneous(observation) at the default tolerance
    bool random_sample = false;  // produced by uniform sampling
    features::HaralickVector haralick{};
    double elapsed_ms = 0.0;
};

using History = std::vector<HistoryEntry>;
using Goal = std::array<double, features::kBehaviorDims>;

// Independent RNG sub-streams derived from one master seed, so that method
// variants consume identical randomness for the parts they share.
enum class Stream : std::uint64_t { init_sampling = 1, goal, axes, bernoulli, mutation, rollout_init };

std::mt19937_64 make_stream(std::uint64_t seed, Stream stream);

// Seed of the (fixed) initial state for a session with this master seed.
std::uint64_t initial_state_seed(std::uint64_t seed);

// Uniform in the bounding box of all history behaviors (raw coordinates).
Goal sample_goal(const History& history, std::mt19937_64& rng);

enum class SelectionMode { global, constrained };

// Nearest history entry to `goal` on `axes`, after standardizing the history
// behaviors and the goal with the history's per-dimension statistics.
// Constrained mode only considers inliers and falls back to global when there
// are none. Ties go to the lowest index. Degenerate dimensions contribute 0.
std::size_t select_candidate(const History& history, const Goal& goal, SelectionMode mode,
                             std::span<const int> axes);

// `count` distinct axes out of `dims`, uniformly.
std::vector<int> sample_axes(int dims, int count, std::mt19937_64& rng);

// value + N(0, sigma) per dimension, clipped to the box.
ParamVector mutate(const ParamVector& params, std::span<const double> sigmas, std::mt19937_64& rng);

ParamVector random_sample(const std::shared_ptr<const ParamSpace>& space, std::mt19937_64& rng);

// Re-classifies every entry from its stored constraint features. Returns the
// inlier count. No rollouts are executed.
std::size_t update_roi(History& history, const Roi& roi);

struct Proposal {
    ParamVector params;
    bool random_sample = false;
    std::optional<std::size_t> parent;
    SelectionMode mode = SelectionMode::global;
    std::vector<int> axes;
};

struct RunningMetrics {
    std::size_t samples = 0;
    std::size_t inliers = 0;
    std::size_t post_init_samples = 0;
    std::size_t post_init_inliers = 0;
    double acceptance_rate = 0.0;  // post-init; 0 before the first post-init sample
};

class Explorer {
public:
    Explorer(const System& system, ExplorerConfig config, Roi roi);

    // Split step, so a driver can release locks while the rollout runs:
    // propose() reads the history, evaluate() touches nothing shared,
    // commit() classifies under the current ROI and appends.
    Proposal propose();
    HistoryEntry evaluate(const Proposal& proposal) const;
    const HistoryEntry& commit(HistoryEntry entry);

    const HistoryEntry& step();
    bool done() const { return history_.size() >= static_cast<std::size_t>(config_.budget); }

    std::size_t update_roi(const Roi& roi);
    void set_balance_prob(double p);

    const History& history() const { return history_; }
    History& mutable_history() { return history_; }
    const Roi& roi() const { return roi_; }
    const ExplorerConfig& config() const { return config_; }
    const System& system() const { return *system_; }
    RunningMetrics metrics() const;

private:
    const System* system_;
    ExplorerConfig config_;
    Roi roi_;
    std::vector<double> sigmas_;
    History history_;
    std::mt19937_64 init_rng_;
    std::mt19937_64 goal_rng_;
    std::mt19937_64 axes_rng_;
    std::mt19937_64 bernoulli_rng_;
    std::mt19937_64 mutation_rng_;
};

RunningMetrics running_metrics(const History& history, int n_init);

// Return false to cancel; the partial history is returned.
using ProgressCallback = std::function<bool(const HistoryEntry&, const RunningMetrics&)>;

History run_exploration(const System& system, const ExplorerConfig& config, const Roi& roi,
                        const ProgressCallback& callback = {});

}  // namespace imgep::explorer
