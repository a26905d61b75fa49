#include "imgep/explorer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "imgep/errors.hpp"
#include "imgep/standardize.hpp"

namespace imgep::explorer {

Method parse_method(const std::string& name) {
    if (name == "R") return Method::R;
    if (name == "N") return Method::N;
    if (name == "NRA") return Method::NRA;
    if (name == "NRAB") return Method::NRAB;
    throw ValidationError("method", "unknown method '" + name + "' (expected R, N, NRA or NRAB)");
}

std::string to_string(Method method) {
    switch (method) {
        case Method::R: return "R";
        case Method::N: return "N";
        case Method::NRA: return "NRA";
        case Method::NRAB: return "NRAB";
    }
    return "?";
}

void Roi::validate() const {
    for (const Constraint& c : constraints) {
        const auto& names = features::ConstraintFeatures::names();
        if (std::find(names.begin(), names.end(), c.feature) == names.end()) throw UnknownFeature(c.feature);
        if (!(c.lo <= c.hi)) throw ValidationError("roi." + c.feature, "lo must be <= hi");
    }
}

Roi volume_roi(double lo, double hi) { return Roi{{{"volume", lo, hi}}}; }

int classify(const features::ConstraintFeatures& f, const Roi& roi) {
    for (const Constraint& c : roi.constraints) {
        const double v = f.get(c.feature);
        if (!(v >= c.lo && v <= c.hi)) return -1;
    }
    return 1;
}

void ExplorerConfig::validate(const ParamSpace& space) const {
    if (n_init < 1) throw ValidationError("n_init", "must be >= 1");
    if (budget < n_init) throw ValidationError("budget", "must be >= n_init");
    if (!(balance_prob >= 0.0 && balance_prob <= 1.0)) throw ValidationError("balance_prob", "must lie in [0, 1]");
    if (subspace_dims < 1 || subspace_dims > features::kBehaviorDims)
        throw ValidationError("subspace_dims", "must lie in [1, 9]");
    if (!mutation_sigmas.empty()) {
        if (mutation_sigmas.size() != space.dims())
            throw ValidationError("mutation_sigmas", "expected one sigma per parameter");
        for (double s : mutation_sigmas)
            if (!(s >= 0.0) || !std::isfinite(s)) throw ValidationError("mutation_sigmas", "must be finite and >= 0");
    }
}

std::mt19937_64 make_stream(std::uint64_t seed, Stream stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), 0x1f2e3d4cU};
    return std::mt19937_64(seq);
}

std::uint64_t initial_state_seed(std::uint64_t seed) { return make_stream(seed, Stream::rollout_init)(); }

namespace {

double uniform01(std::mt19937_64& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

}  // namespace

Goal sample_goal(const History& history, std::mt19937_64& rng) {
    if (history.empty()) throw std::invalid_argument("sample_goal: empty history");
    Goal lo = history.front().behavior.to_array();
    Goal hi = lo;
    for (const HistoryEntry& e : history) {
        const auto b = e.behavior.to_array();
        for (int d = 0; d < features::kBehaviorDims; ++d) {
            lo[d] = std::min(lo[d], b[d]);
            hi[d] = std::max(hi[d], b[d]);
        }
    }
    Goal goal{};
    for (int d = 0; d < features::kBehaviorDims; ++d) goal[d] = lo[d] + (hi[d] - lo[d]) * uniform01(rng);
    return goal;
}

std::size_t select_candidate(const History& history, const Goal& goal, SelectionMode mode,
                             std::span<const int> axes) {
    if (history.empty()) throw std::invalid_argument("select_candidate: empty history");
    if (axes.empty()) throw std::invalid_argument("select_candidate: no axes");

    Eigen::MatrixXd behaviors(static_cast<Eigen::Index>(history.size()), features::kBehaviorDims);
    for (std::size_t i = 0; i < history.size(); ++i) {
        const auto b = history[i].behavior.to_array();
        for (int d = 0; d < features::kBehaviorDims; ++d) behaviors(static_cast<Eigen::Index>(i), d) = b[d];
    }
    const features::Standardized z = features::standardize(behaviors);
    const Eigen::VectorXd g = z.stats.apply(Eigen::Map<const Eigen::VectorXd>(goal.data(), features::kBehaviorDims));

    bool restrict_to_inliers = false;
    if (mode == SelectionMode::constrained)
        restrict_to_inliers = std::any_of(history.begin(), history.end(),
                                          [](const HistoryEntry& e) { return e.classification == 1; });

    std::size_t best = history.size();
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < history.size(); ++i) {
        if (restrict_to_inliers && history[i].classification != 1) continue;
        if (best == history.size()) best = i;  // survives even if every distance is NaN
        double dist = 0.0;
        for (int axis : axes) {
            const double diff = z.data(static_cast<Eigen::Index>(i), axis) - g[axis];
            dist += diff * diff;
        }
        if (dist < best_dist) {
            best_dist = dist;
            best = i;
        }
    }
    return best;
}

std::vector<int> sample_axes(int dims, int count, std::mt19937_64& rng) {
    if (count < 1 || count > dims) throw std::invalid_argument("sample_axes: count out of range");
    std::vector<int> all(static_cast<std::size_t>(dims));
    std::iota(all.begin(), all.end(), 0);
    for (int i = 0; i < count; ++i) {
        std::uniform_int_distribution<int> pick(i, dims - 1);
        std::swap(all[static_cast<std::size_t>(i)], all[static_cast<std::size_t>(pick(rng))]);
    }
    all.resize(static_cast<std::size_t>(count));
    return all;
}

ParamVector mutate(const ParamVector& params, std::span<const double> sigmas, std::mt19937_64& rng) {
    const ParamSpace& space = params.space();
    if (sigmas.size() != params.size()) throw std::invalid_argument("mutate: sigma count mismatch");
    std::vector<double> out(params.values().begin(), params.values().end());
    std::normal_distribution<double> normal(0.0, 1.0);
    for (std::size_t d = 0; d < out.size(); ++d) {
        const double noise = normal(rng);
        out[d] = std::clamp(out[d] + sigmas[d] * noise, space.bounds[d].lo, space.bounds[d].hi);
    }
    return ParamVector(params.space_ptr(), std::move(out));
}

ParamVector random_sample(const std::shared_ptr<const ParamSpace>& space, std::mt19937_64& rng) {
    std::vector<double> v(space->dims());
    for (std::size_t d = 0; d < v.size(); ++d) {
        const Interval b = space->bounds[d];
        v[d] = std::min(b.hi, b.lo + (b.hi - b.lo) * uniform01(rng));
    }
    return ParamVector(space, std::move(v));
}

std::size_t update_roi(History& history, const Roi& roi) {
    roi.validate();
    std::size_t inliers = 0;
    for (HistoryEntry& e : history) {
        e.classification = classify(e.constraint_features, roi);
        inliers += e.classification == 1;
    }
    return inliers;
}

RunningMetrics running_metrics(const History& history, int n_init) {
    RunningMetrics m;
    m.samples = history.size();
    for (const HistoryEntry& e : history) {
        const bool inlier = e.classification == 1;
        m.inliers += inlier;
        if (e.index >= static_cast<std::size_t>(n_init)) {
            ++m.post_init_samples;
            m.post_init_inliers += inlier;
        }
    }
    m.acceptance_rate =
        m.post_init_samples ? static_cast<double>(m.post_init_inliers) / static_cast<double>(m.post_init_samples) : 0.0;
    return m;
}

Explorer::Explorer(const System& system, ExplorerConfig config, Roi roi)
    : system_(&system),
      config_(std::move(config)),
      roi_(std::move(roi)),
      init_rng_(make_stream(config_.seed, Stream::init_sampling)),
      goal_rng_(make_stream(config_.seed, Stream::goal)),
      axes_rng_(make_stream(config_.seed, Stream::axes)),
      bernoulli_rng_(make_stream(config_.seed, Stream::bernoulli)),
      mutation_rng_(make_stream(config_.seed, Stream::mutation)) {
    const ParamSpace& space = *system.space();
    config_.validate(space);
    roi_.validate();
    sigmas_ = config_.mutation_sigmas.empty() ? space.mutation_sigmas : config_.mutation_sigmas;
    history_.reserve(static_cast<std::size_t>(config_.budget));
}

Proposal Explorer::propose() {
    Proposal p;
    if (history_.size() < static_cast<std::size_t>(config_.n_init) || config_.method == Method::R) {
        p.params = random_sample(system_->space(), init_rng_);
        p.random_sample = true;
        return p;
    }

    const Goal goal = sample_goal(history_, goal_rng_);
    // Drawn for every policy method so the streams stay aligned across variants.
    const bool constrained = uniform01(bernoulli_rng_) < config_.balance_prob;

    if (config_.method == Method::N) {
        p.axes.resize(features::kBehaviorDims);
        std::iota(p.axes.begin(), p.axes.end(), 0);
    } else {
        p.axes = sample_axes(features::kBehaviorDims, config_.subspace_dims, axes_rng_);
    }
    p.mode = (config_.method == Method::NRAB && constrained) ? SelectionMode::constrained : SelectionMode::global;
    const std::size_t parent = select_candidate(history_, goal, p.mode, p.axes);
    p.parent = parent;
    p.params = mutate(history_[parent].params, sigmas_, mutation_rng_);
    return p;
}

HistoryEntry Explorer::evaluate(const Proposal& proposal) const {
    const auto start = std::chrono::steady_clock::now();
    RolloutResult result = system_->rollout(proposal.params.values());
    HistoryEntry e;
    e.params = proposal.params;
    e.random_sample = proposal.random_sample;
    e.invalid = result.invalid;
    e.homogeneous = is_homogeneous(result.observation);
    e.behavior = features::behavior(result.observation);
    e.constraint_features = features::constraint_features(result.observation);
    e.haralick = features::haralick13(result.observation);
    e.observation = std::make_shared<const Grid2D>(std::move(result.observation));
    e.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return e;
}

const HistoryEntry& Explorer::commit(HistoryEntry entry) {
    entry.index = history_.size();
    entry.classification = classify(entry.constraint_features, roi_);
    history_.push_back(std::move(entry));
    return history_.back();
}

const HistoryEntry& Explorer::step() {
    const auto start = std::chrono::steady_clock::now();
    const Proposal proposal = propose();
    HistoryEntry entry = evaluate(proposal);
    entry.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return commit(std::move(entry));
}

std::size_t Explorer::update_roi(const Roi& roi) {
    roi.validate();
    roi_ = roi;
    return explorer::update_roi(history_, roi_);
}

void Explorer::set_balance_prob(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("balance_prob", "must lie in [0, 1]");
    config_.balance_prob = p;
}

RunningMetrics Explorer::metrics() const { return running_metrics(history_, config_.n_init); }

History run_exploration(const System& system, const ExplorerConfig& config, const Roi& roi,
                        const ProgressCallback& callback) {
    Explorer explorer(system, config, roi);
    RunningMetrics m;
    while (!explorer.done()) {
        const HistoryEntry& e = explorer.step();
        m.samples += 1;
        m.inliers += e.classification == 1;
        if (e.index >= static_cast<std::size_t>(config.n_init)) {
            m.post_init_samples += 1;
            m.post_init_inliers += e.classification == 1;
            m.acceptance_rate = static_cast<double>(m.post_init_inliers) / static_cast<double>(m.post_init_samples);
        }
        if (callback && !callback(e, m)) break;
    }
    return std::move(explorer.mutable_history());
}

}  // namespace imgep::explorer
