#include "imgep/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "imgep/errors.hpp"

namespace imgep::metrics {

std::uint64_t BinningSpec::bin_count() const {
    std::uint64_t n = 1;
    for (int d = 0; d < kEvalDims; ++d) n *= static_cast<std::uint64_t>(bins_per_dim);
    return n;
}

int bins_per_dim_for(long n_bins_target) {
    if (n_bins_target < 1) throw ValidationError("n_bins_target", "must be >= 1");
    auto pow4 = [](long b) { return b * b * b * b; };
    long b = static_cast<long>(std::floor(std::pow(static_cast<double>(n_bins_target), 0.25)));
    while (b > 1 && pow4(b) > n_bins_target) --b;
    while (pow4(b + 1) <= n_bins_target) ++b;
    return static_cast<int>(std::max(1L, b));
}

BinningSpec make_binning(long n_bins_target, std::span<const EvalEmbedding> pooled) {
    BinningSpec spec;
    spec.n_bins_target = n_bins_target;
    spec.bins_per_dim = bins_per_dim_for(n_bins_target);
    if (pooled.empty()) return spec;
    spec.lo = spec.hi = pooled.front();
    for (const EvalEmbedding& p : pooled) {
        for (int d = 0; d < kEvalDims; ++d) {
            spec.lo[d] = std::min(spec.lo[d], p[d]);
            spec.hi[d] = std::max(spec.hi[d], p[d]);
        }
    }
    return spec;
}

std::uint64_t bin_index(const EvalEmbedding& point, const BinningSpec& spec) {
    const int b = spec.bins_per_dim;
    std::uint64_t index = 0;
    std::uint64_t radix = 1;
    for (int d = 0; d < kEvalDims; ++d) {
        const double range = spec.hi[d] - spec.lo[d];
        int cell = 0;
        if (range > 0.0) {
            const double t = (point[d] - spec.lo[d]) / range;
            // NaN falls through to cell 0 via the comparisons below.
            if (t >= 1.0) cell = b - 1;
            else if (t > 0.0) cell = std::min(b - 1, static_cast<int>(std::floor(t * b)));
        }
        index += static_cast<std::uint64_t>(cell) * radix;
        radix *= static_cast<std::uint64_t>(b);
    }
    return index;
}

std::size_t diversity(std::span<const EvalEmbedding> points, const BinningSpec& spec) {
    std::unordered_set<std::uint64_t> bins;
    for (const EvalEmbedding& p : points) bins.insert(bin_index(p, spec));
    return bins.size();
}

std::size_t constrained_diversity(const explorer::History& history, const BinningSpec& spec,
                                  std::span<const EvalEmbedding> embeddings) {
    if (embeddings.size() != history.size())
        throw std::invalid_argument("constrained_diversity: embeddings not aligned with history");
    std::unordered_set<std::uint64_t> bins;
    for (std::size_t i = 0; i < history.size(); ++i)
        if (history[i].classification == 1) bins.insert(bin_index(embeddings[i], spec));
    return bins.size();
}

double acceptance_rate(std::span<const int> classifications, int n_init) {
    if (n_init < 0) throw std::invalid_argument("acceptance_rate: n_init must be >= 0");
    if (classifications.size() <= static_cast<std::size_t>(n_init))
        throw InsufficientHistory("acceptance_rate: history length " + std::to_string(classifications.size()) +
                                  " <= n_init " + std::to_string(n_init));
    std::size_t inliers = 0;
    for (std::size_t i = static_cast<std::size_t>(n_init); i < classifications.size(); ++i)
        inliers += classifications[i] == 1;
    return static_cast<double>(inliers) / static_cast<double>(classifications.size() - n_init);
}

double acceptance_rate(const explorer::History& history, int n_init) {
    std::vector<int> c;
    c.reserve(history.size());
    for (const auto& e : history) c.push_back(e.classification);
    return acceptance_rate(c, n_init);
}

DiversityTracker::DiversityTracker(BinningSpec global_spec, BinningSpec constrained_spec)
    : global_spec_(global_spec), constrained_spec_(constrained_spec) {}

void DiversityTracker::add(const EvalEmbedding& point, bool inlier) {
    global_bins_.insert(bin_index(point, global_spec_));
    if (inlier) constrained_bins_.insert(bin_index(point, constrained_spec_));
}

DiversityReport diversity_series(std::span<const EvalEmbedding> embeddings, std::span<const int> classifications,
                                 const BinningSpec& global_spec, const BinningSpec& constrained_spec, int n_init) {
    if (embeddings.size() != classifications.size())
        throw std::invalid_argument("diversity_series: embeddings and classifications differ in length");
    DiversityReport report;
    DiversityTracker tracker(global_spec, constrained_spec);
    for (std::size_t i = 0; i < embeddings.size(); ++i) {
        tracker.add(embeddings[i], classifications[i] == 1);
        report.global.push_back(tracker.global());
        report.constrained.push_back(tracker.constrained());
        report.inlier_flags.push_back(classifications[i] == 1 ? 1 : -1);
    }
    if (classifications.size() > static_cast<std::size_t>(std::max(0, n_init)))
        report.acceptance_rate = acceptance_rate(classifications, n_init);
    return report;
}

void write_diversity_csv(std::ostream& out, const DiversityReport& report) {
    out << "sample_index,global_diversity,constrained_diversity,inlier_flag\n";
    for (std::size_t i = 0; i < report.global.size(); ++i)
        out << i << ',' << report.global[i] << ',' << report.constrained[i] << ',' << report.inlier_flags[i] << '\n';
}

features::PcaBasis fit_evaluation_space(std::span<const features::HaralickVector> pooled) {
    Eigen::MatrixXd data(static_cast<Eigen::Index>(pooled.size()), features::kHaralickCount);
    for (std::size_t i = 0; i < pooled.size(); ++i)
        for (int d = 0; d < features::kHaralickCount; ++d) data(static_cast<Eigen::Index>(i), d) = pooled[i][d];
    return features::pca_fit(data, kEvalDims);
}

EvalEmbedding embed(const features::PcaBasis& basis, const features::HaralickVector& haralick) {
    return features::pca_project(basis, Eigen::Map<const Eigen::VectorXd>(haralick.data(), features::kHaralickCount));
}

std::vector<EvalEmbedding> embed_all(const features::PcaBasis& basis,
                                     std::span<const features::HaralickVector> haralick) {
    std::vector<EvalEmbedding> out;
    out.reserve(haralick.size());
    for (const auto& h : haralick) out.push_back(embed(basis, h));
    return out;
}

}  // namespace imgep::metrics
