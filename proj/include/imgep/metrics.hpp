#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <unordered_set>
#include <vector>

#include "imgep/explorer.hpp"
#include "imgep/features.hpp"
#include "imgep/standardize.hpp"

namespace imgep::metrics {

using features::EvalEmbedding;

inline constexpr int kEvalDims = 4;
inline constexpr long kGlobalBins = 200000;
inline constexpr long kConstrainedBins = 100000;

// Uniform grid over a 4-D box. bins_per_dim = floor(n_bins_target^(1/4)).
struct BinningSpec {
    long n_bins_target = kGlobalBins;
    int bins_per_dim = 1;
    EvalEmbedding lo{};
    EvalEmbedding hi{};

    std::uint64_t bin_count() const;
};

// Exact integer floor of the fourth root.
int bins_per_dim_for(long n_bins_target);

// Bounds = per-dimension min/max of `pooled`. Empty input gives a [0, 0] box.
BinningSpec make_binning(long n_bins_target, std::span<const EvalEmbedding> pooled);

// Mixed-radix index (dimension 0 least significant); coordinates clamp to the edge bins.
std::uint64_t bin_index(const EvalEmbedding& point, const BinningSpec& spec);

std::size_t diversity(std::span<const EvalEmbedding> points, const BinningSpec& spec);

// Diversity over entries classified +1. `embeddings` is aligned with history order.
std::size_t constrained_diversity(const explorer::History& history, const BinningSpec& spec,
                                  std::span<const EvalEmbedding> embeddings);

// Inliers among entries with index >= n_init over (length - n_init).
// Throws InsufficientHistory when length <= n_init.
double acceptance_rate(const explorer::History& history, int n_init);
double acceptance_rate(std::span<const int> classifications, int n_init);

struct DiversityReport {
    std::vector<std::size_t> global;       // occupied bins after sample i
    std::vector<std::size_t> constrained;  // occupied bins among inliers after sample i
    std::vector<int> inlier_flags;         // classification per sample, -1 / 1
    double acceptance_rate = 0.0;          // 0 when there are no post-init samples
};

// Occupied-bin sets that only grow; add() reports the running counts.
class DiversityTracker {
public:
    DiversityTracker(BinningSpec global_spec, BinningSpec constrained_spec);

    void add(const EvalEmbedding& point, bool inlier);
    std::size_t global() const { return global_bins_.size(); }
    std::size_t constrained() const { return constrained_bins_.size(); }
    const BinningSpec& global_spec() const { return global_spec_; }
    const BinningSpec& constrained_spec() const { return constrained_spec_; }

private:
    BinningSpec global_spec_;
    BinningSpec constrained_spec_;
    std::unordered_set<std::uint64_t> global_bins_;
    std::unordered_set<std::uint64_t> constrained_bins_;
};

// Per-sample series. With the same spec for both, constrained <= global everywhere.
DiversityReport diversity_series(std::span<const EvalEmbedding> embeddings, std::span<const int> classifications,
                                 const BinningSpec& global_spec, const BinningSpec& constrained_spec, int n_init);

// Columns: sample_index, global_diversity, constrained_diversity, inlier_flag.
void write_diversity_csv(std::ostream& out, const DiversityReport& report);

// Haralick -> standardize -> PCA(4) fitted on the given pool.
features::PcaBasis fit_evaluation_space(std::span<const features::HaralickVector> pooled);
EvalEmbedding embed(const features::PcaBasis& basis, const features::HaralickVector& haralick);
std::vector<EvalEmbedding> embed_all(const features::PcaBasis& basis,
                                     std::span<const features::HaralickVector> haralick);

}  // namespace imgep::metrics
