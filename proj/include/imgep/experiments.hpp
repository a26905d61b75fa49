#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "imgep/explorer.hpp"
#include "imgep/metrics.hpp"
#include "imgep/system.hpp"

namespace imgep::experiments {

// One compared configuration: a method at a balance probability. Labels name the
// output files, e.g. "NRAB" or "NRAB_b0.25" in a balance sweep.
struct Arm {
    std::string label;
    explorer::Method method = explorer::Method::NRAB;
    double balance_prob = 0.5;
};

struct ExperimentPlan {
    SystemSpec system;
    std::vector<explorer::Method> methods{explorer::Method::R, explorer::Method::N, explorer::Method::NRA,
                                          explorer::Method::NRAB};
    std::vector<std::uint64_t> seeds;
    int budget = 1000;
    int n_init = 250;
    explorer::Roi roi = explorer::volume_roi();
    double balance_prob = 0.5;
    int subspace_dims = 3;
    std::vector<double> mutation_sigmas;  // empty: system defaults
    std::vector<double> balance_sweep{0.0, 0.25, 0.5, 0.75, 1.0};
    long global_bins = metrics::kGlobalBins;
    long constrained_bins = metrics::kConstrainedBins;
    std::filesystem::path output_dir;  // empty: nothing is written
    int threads = 0;                   // 0: hardware concurrency
    bool write_observations = false;   // PNGs under runs/<label>_<seed>/

    void validate() const;
    std::vector<Arm> method_arms() const;
    std::vector<Arm> sweep_arms() const;  // NRAB at each balance_sweep value
};

ExperimentPlan plan_from_json(const nlohmann::json& j);
nlohmann::json plan_to_json(const ExperimentPlan& plan);
ExperimentPlan load_plan(const std::filesystem::path& path);

struct RunResult {
    Arm arm;
    std::uint64_t seed = 0;
    explorer::History history;  // observations are dropped after feature extraction
    bool failed = false;
    std::string error;
    double wall_ms = 0.0;
    std::vector<metrics::EvalEmbedding> embeddings;
    metrics::DiversityReport diversity;
    double acceptance_rate = 0.0;
    double mean_ms_per_sample = 0.0;
};

struct ArmCurve {
    std::string label;
    std::vector<double> global_mean, global_std;
    std::vector<double> constrained_mean, constrained_std;
};

struct ResultBundle {
    ExperimentPlan plan;
    std::vector<Arm> arms;
    std::vector<RunResult> runs;  // arm-major, then seed order
    features::PcaBasis eval_space;
    metrics::BinningSpec global_spec;
    metrics::BinningSpec constrained_spec;
    bool has_eval_space = false;  // false when fewer than 5 samples were pooled
    std::size_t pooled_samples = 0;
    std::vector<ArmCurve> curves;
    std::vector<std::filesystem::path> files;  // relative to output_dir
};

using ProgressFn = std::function<void(const RunResult&)>;

// Runs every (arm, seed) pair (in parallel, plan.threads). Each history is written to
// runs/<label>_<seed>.jsonl as soon as it finishes when plan.output_dir is set.
std::vector<RunResult> execute_runs(const ExperimentPlan& plan, const std::vector<Arm>& arms,
                                    const ProgressFn& progress = {});

// Fits the evaluation space on the pooled Haralick features of the successful runs,
// then computes embeddings, diversity series, acceptance and per-arm curves.
ResultBundle analyze(const ExperimentPlan& plan, const std::vector<Arm>& arms, std::vector<RunResult> runs);

// CSVs, summary and manifest (with SHA-256 of every listed file) under plan.output_dir.
void write_outputs(ResultBundle& bundle);

// execute_runs + analyze (+ write_outputs when plan.output_dir is set). Runs every (arm, seed) pair, fits the evaluation space on the pooled Haralick
// features of all successful runs, computes diversity series and curves, and writes
// the outputs when plan.output_dir is set.
ResultBundle run_arms(const ExperimentPlan& plan, const std::vector<Arm>& arms, const ProgressFn& progress = {});
ResultBundle run_plan(const ExperimentPlan& plan, const ProgressFn& progress = {});
ResultBundle sweep_balance(const ExperimentPlan& plan, const ProgressFn& progress = {});

struct SummaryRow {
    std::string label;
    std::size_t runs = 0;
    double acceptance_rate = 0.0;  // mean over runs
    double acceptance_std = 0.0;
    double ms_per_sample = 0.0;
    double s_per_inlier = 0.0;  // infinite when nothing was accepted
    double final_global_mean = 0.0;
    double final_constrained_mean = 0.0;
};

// s_per_inlier = ms_per_sample / 1000 / acceptance_rate.
double seconds_per_inlier(double ms_per_sample, double acceptance_rate);

std::vector<SummaryRow> summarize(const ResultBundle& bundle);
// Recomputes acceptance from runs/*.jsonl and reads timing.csv and diversity.csv.
std::vector<SummaryRow> summarize(const std::filesystem::path& dir);

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows);
std::string format_summary(const std::vector<SummaryRow>& rows);

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);

}  // namespace imgep::experiments
