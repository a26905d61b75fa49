#include "imgep/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <openssl/evp.h>

#include "imgep/config_io.hpp"
#include "imgep/errors.hpp"
#include "imgep/history_io.hpp"

namespace imgep::experiments {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

std::string run_stem(const Arm& arm, std::uint64_t seed) { return arm.label + "_" + std::to_string(seed); }

void reject_unknown(const json& j, std::initializer_list<const char*> known) {
    for (const auto& [key, value] : j.items()) {
        if (std::none_of(known.begin(), known.end(), [&](const char* k) { return key == k; }))
            throw ValidationError("plan." + key, "unknown field");
    }
}

double mean_of(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

// Sample standard deviation; 0 for fewer than two values.
double std_of(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean_of(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    return out;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

RunResult execute_run(const ExperimentPlan& plan, const Arm& arm, std::uint64_t seed) {
    RunResult r;
    r.arm = arm;
    r.seed = seed;
    const auto start = std::chrono::steady_clock::now();
    std::unique_ptr<System> system;
    std::unique_ptr<explorer::Explorer> ex;
    try {
        system = make_system(plan.system, explorer::initial_state_seed(seed));
        explorer::ExplorerConfig cfg;
        cfg.n_init = plan.n_init;
        cfg.budget = plan.budget;
        cfg.balance_prob = arm.balance_prob;
        cfg.subspace_dims = plan.subspace_dims;
        cfg.method = arm.method;
        cfg.mutation_sigmas = plan.mutation_sigmas;
        cfg.seed = seed;
        ex = std::make_unique<explorer::Explorer>(*system, cfg, plan.roi);
        const fs::path png_dir = plan.output_dir / "runs" / run_stem(arm, seed);
        while (!ex->done()) {
            ex->step();
            auto& entry = ex->mutable_history().back();
            if (plan.write_observations && !plan.output_dir.empty())
                history_io::write_observations(png_dir, explorer::History{entry});
            entry.observation.reset();
        }
    } catch (const std::exception& e) {
        r.failed = true;
        r.error = e.what();
    }
    if (ex) r.history = std::move(ex->mutable_history());
    r.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    double total = 0.0;
    for (const auto& e : r.history) total += e.elapsed_ms;
    r.mean_ms_per_sample = r.history.empty() ? 0.0 : total / static_cast<double>(r.history.size());
    r.acceptance_rate = explorer::running_metrics(r.history, plan.n_init).acceptance_rate;
    return r;
}

}  // namespace

void ExperimentPlan::validate() const {
    if (methods.empty()) throw ValidationError("plan.methods", "must not be empty");
    if (seeds.empty()) throw ValidationError("plan.seeds", "must not be empty");
    if (n_init < 1) throw ValidationError("plan.n_init", "must be >= 1");
    if (budget < n_init) throw ValidationError("plan.budget", "must be >= n_init");
    if (!(balance_prob >= 0.0 && balance_prob <= 1.0)) throw ValidationError("plan.balance_prob", "must lie in [0, 1]");
    for (double b : balance_sweep)
        if (!(b >= 0.0 && b <= 1.0)) throw ValidationError("plan.balance_sweep", "values must lie in [0, 1]");
    if (subspace_dims < 1 || subspace_dims > features::kBehaviorDims)
        throw ValidationError("plan.subspace_dims", "must lie in [1, 9]");
    if (global_bins < 1) throw ValidationError("plan.global_bins", "must be >= 1");
    if (constrained_bins < 1) throw ValidationError("plan.constrained_bins", "must be >= 1");
    if (threads < 0) throw ValidationError("plan.threads", "must be >= 0");
    roi.validate();
}

std::vector<Arm> ExperimentPlan::method_arms() const {
    std::vector<Arm> arms;
    for (auto m : methods) arms.push_back({explorer::to_string(m), m, balance_prob});
    return arms;
}

std::vector<Arm> ExperimentPlan::sweep_arms() const {
    std::vector<Arm> arms;
    for (double b : balance_sweep) arms.push_back({"NRAB_b" + format_number(b), explorer::Method::NRAB, b});
    return arms;
}

ExperimentPlan plan_from_json(const json& j) {
    if (!j.is_object()) throw ValidationError("plan", "expected a JSON object");
    reject_unknown(j, {"system", "gray_scott", "lenia", "methods", "seeds", "budget", "n_init", "roi", "balance_prob",
                       "subspace_dims", "mutation_sigmas", "balance_sweep", "global_bins", "constrained_bins",
                       "output_dir", "threads", "write_observations"});
    ExperimentPlan p;
    json sys = json::object();
    for (const char* k : {"system", "gray_scott", "lenia"})
        if (j.contains(k)) sys[k] = j.at(k);
    p.system = config_io::system_spec_from_json(sys);

    try {
        if (j.contains("methods")) {
            p.methods.clear();
            for (const auto& m : j.at("methods")) p.methods.push_back(explorer::parse_method(m.get<std::string>()));
        }
        if (j.contains("seeds")) p.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
        p.budget = j.value("budget", p.budget);
        p.n_init = j.value("n_init", p.n_init);
        if (j.contains("roi")) p.roi = config_io::roi_from_json(j.at("roi"));
        p.balance_prob = j.value("balance_prob", p.balance_prob);
        p.subspace_dims = j.value("subspace_dims", p.subspace_dims);
        if (j.contains("mutation_sigmas")) p.mutation_sigmas = j.at("mutation_sigmas").get<std::vector<double>>();
        if (j.contains("balance_sweep")) p.balance_sweep = j.at("balance_sweep").get<std::vector<double>>();
        p.global_bins = j.value("global_bins", p.global_bins);
        p.constrained_bins = j.value("constrained_bins", p.constrained_bins);
        if (j.contains("output_dir")) p.output_dir = j.at("output_dir").get<std::string>();
        p.threads = j.value("threads", p.threads);
        p.write_observations = j.value("write_observations", p.write_observations);
    } catch (const json::exception& e) {
        throw ValidationError("plan", e.what());
    }
    p.validate();
    return p;
}

json plan_to_json(const ExperimentPlan& p) {
    json j = config_io::system_spec_to_json(p.system);
    json methods = json::array();
    for (auto m : p.methods) methods.push_back(explorer::to_string(m));
    j["methods"] = methods;
    j["seeds"] = p.seeds;
    j["budget"] = p.budget;
    j["n_init"] = p.n_init;
    j["roi"] = config_io::roi_to_json(p.roi);
    j["balance_prob"] = p.balance_prob;
    j["subspace_dims"] = p.subspace_dims;
    j["mutation_sigmas"] = p.mutation_sigmas;
    j["balance_sweep"] = p.balance_sweep;
    j["global_bins"] = p.global_bins;
    j["constrained_bins"] = p.constrained_bins;
    j["output_dir"] = p.output_dir.string();
    j["threads"] = p.threads;
    j["write_observations"] = p.write_observations;
    return j;
}

ExperimentPlan load_plan(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read plan " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ValidationError("plan", std::string("invalid JSON: ") + e.what());
    }
    ExperimentPlan plan = plan_from_json(j);
    // Relative output directories resolve against the plan file.
    if (!plan.output_dir.empty() && plan.output_dir.is_relative())
        plan.output_dir = path.parent_path() / plan.output_dir;
    return plan;
}

std::vector<RunResult> execute_runs(const ExperimentPlan& plan, const std::vector<Arm>& arms,
                                    const ProgressFn& progress) {
    plan.validate();
    struct Job {
        Arm arm;
        std::uint64_t seed;
    };
    std::vector<Job> jobs;
    for (const Arm& a : arms)
        for (auto s : plan.seeds) jobs.push_back({a, s});
    std::vector<RunResult> runs(jobs.size());

    if (!plan.output_dir.empty()) fs::create_directories(plan.output_dir / "runs");

    std::atomic<std::size_t> next{0};
    std::mutex report_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < jobs.size(); i = next++) {
            RunResult r = execute_run(plan, jobs[i].arm, jobs[i].seed);
            // Flushed per run so a later failure keeps what finished.
            if (!plan.output_dir.empty())
                history_io::write_jsonl(plan.output_dir / "runs" / (run_stem(r.arm, r.seed) + ".jsonl"), r.history);
            std::lock_guard lock(report_mutex);
            if (progress) progress(r);
            runs[i] = std::move(r);
        }
    };
    const unsigned hw = std::max(1U, std::thread::hardware_concurrency());
    const std::size_t n_threads =
        std::min<std::size_t>(jobs.size(), plan.threads > 0 ? static_cast<std::size_t>(plan.threads) : hw);
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    }
    return runs;
}

ResultBundle analyze(const ExperimentPlan& plan, const std::vector<Arm>& arms, std::vector<RunResult> runs) {
    ResultBundle bundle;
    bundle.plan = plan;
    bundle.arms = arms;
    bundle.runs = std::move(runs);

    // Evaluation space and bin bounds over the pooled successful runs.
    std::vector<features::HaralickVector> pooled;
    for (const auto& r : bundle.runs)
        if (!r.failed)
            for (const auto& e : r.history) pooled.push_back(e.haralick);
    bundle.pooled_samples = pooled.size();
    bundle.has_eval_space = pooled.size() >= 5;
    const bool have_space = bundle.has_eval_space;
    if (have_space) {
        bundle.eval_space = metrics::fit_evaluation_space(pooled);
        std::vector<metrics::EvalEmbedding> all;
        for (auto& r : bundle.runs) {
            if (r.failed) continue;
            std::vector<features::HaralickVector> h;
            for (const auto& e : r.history) h.push_back(e.haralick);
            r.embeddings = metrics::embed_all(bundle.eval_space, h);
            all.insert(all.end(), r.embeddings.begin(), r.embeddings.end());
        }
        bundle.global_spec = metrics::make_binning(plan.global_bins, all);
        bundle.constrained_spec = metrics::make_binning(plan.constrained_bins, all);
        bundle.constrained_spec.lo = bundle.global_spec.lo;
        bundle.constrained_spec.hi = bundle.global_spec.hi;
    }
    for (auto& r : bundle.runs) {
        std::vector<int> cls;
        for (const auto& e : r.history) cls.push_back(e.classification);
        if (cls.size() > static_cast<std::size_t>(plan.n_init)) r.acceptance_rate = metrics::acceptance_rate(cls, plan.n_init);
        if (have_space && !r.failed)
            r.diversity =
                metrics::diversity_series(r.embeddings, cls, bundle.global_spec, bundle.constrained_spec, plan.n_init);
    }

    for (const Arm& a : arms) {
        ArmCurve c;
        c.label = a.label;
        std::vector<const RunResult*> ok;
        for (const auto& r : bundle.runs)
            if (r.arm.label == a.label && !r.failed && !r.diversity.global.empty()) ok.push_back(&r);
        if (!ok.empty()) {
            std::size_t len = ok.front()->diversity.global.size();
            for (auto* r : ok) len = std::min(len, r->diversity.global.size());
            for (std::size_t i = 0; i < len; ++i) {
                std::vector<double> g, k;
                for (auto* r : ok) {
                    g.push_back(static_cast<double>(r->diversity.global[i]));
                    k.push_back(static_cast<double>(r->diversity.constrained[i]));
                }
                c.global_mean.push_back(mean_of(g));
                c.global_std.push_back(std_of(g));
                c.constrained_mean.push_back(mean_of(k));
                c.constrained_std.push_back(std_of(k));
            }
        }
        bundle.curves.push_back(std::move(c));
    }

    return bundle;
}

void write_outputs(ResultBundle& bundle) {
    const ExperimentPlan& plan = bundle.plan;
    const std::vector<Arm>& arms = bundle.arms;
    const bool have_space = bundle.has_eval_space;
    const fs::path dir = plan.output_dir;
    fs::create_directories(dir / "runs");
    bundle.files.clear();
    for (const auto& r : bundle.runs) {
        const fs::path jsonl = fs::path("runs") / (run_stem(r.arm, r.seed) + ".jsonl");
        // runs executed elsewhere (or relabelled) have no file here yet
        if (!fs::exists(dir / jsonl)) history_io::write_jsonl(dir / jsonl, r.history);
        bundle.files.push_back(jsonl);
        if (plan.write_observations) {
            const fs::path sub = fs::path("runs") / run_stem(r.arm, r.seed);
            for (const auto& e : r.history) bundle.files.push_back(sub / (history_io::observation_id(e.index) + ".png"));
        }
    }

    std::ostringstream div;
    div << "label,seed,sample_index,global_diversity,constrained_diversity,inlier_flag\n";
    for (const auto& r : bundle.runs)
        for (std::size_t i = 0; i < r.diversity.global.size(); ++i)
            div << r.arm.label << ',' << r.seed << ',' << i << ',' << r.diversity.global[i] << ','
                << r.diversity.constrained[i] << ',' << r.diversity.inlier_flags[i] << '\n';
    write_text(dir / "diversity.csv", div.str());
    bundle.files.emplace_back("diversity.csv");

    std::ostringstream curves;
    curves << std::setprecision(10);
    curves << "label,sample_index,global_mean,global_std,constrained_mean,constrained_std\n";
    for (const auto& c : bundle.curves)
        for (std::size_t i = 0; i < c.global_mean.size(); ++i)
            curves << c.label << ',' << i << ',' << c.global_mean[i] << ',' << c.global_std[i] << ','
                   << c.constrained_mean[i] << ',' << c.constrained_std[i] << '\n';
    write_text(dir / "diversity_curves.csv", curves.str());
    bundle.files.emplace_back("diversity_curves.csv");

    std::ostringstream acc;
    acc << std::setprecision(10);
    acc << "label,method,balance_prob,seed,acceptance_rate,post_init_samples,post_init_inliers,"
           "final_global_diversity,final_constrained_diversity,failed\n";
    for (const auto& r : bundle.runs) {
        const auto m = explorer::running_metrics(r.history, plan.n_init);
        acc << r.arm.label << ',' << explorer::to_string(r.arm.method) << ',' << r.arm.balance_prob << ',' << r.seed
            << ',' << r.acceptance_rate << ',' << m.post_init_samples << ',' << m.post_init_inliers << ','
            << (r.diversity.global.empty() ? 0 : r.diversity.global.back()) << ','
            << (r.diversity.constrained.empty() ? 0 : r.diversity.constrained.back()) << ',' << (r.failed ? 1 : 0)
            << '\n';
    }
    write_text(dir / "acceptance.csv", acc.str());
    bundle.files.emplace_back("acceptance.csv");

    std::ostringstream timing;
    timing << std::setprecision(10);
    timing << "label,seed,samples,mean_ms_per_sample,wall_s\n";
    for (const auto& r : bundle.runs)
        timing << r.arm.label << ',' << r.seed << ',' << r.history.size() << ',' << r.mean_ms_per_sample << ','
               << r.wall_ms / 1000.0 << '\n';
    write_text(dir / "timing.csv", timing.str());
    bundle.files.emplace_back("timing.csv");

    std::ostringstream summary;
    write_summary_csv(summary, summarize(bundle));
    write_text(dir / "summary.csv", summary.str());
    bundle.files.emplace_back("summary.csv");

    json manifest;
    manifest["plan"] = plan_to_json(plan);
    json arms_json = json::array();
    for (const auto& a : arms)
        arms_json.push_back({{"label", a.label}, {"method", explorer::to_string(a.method)}, {"balance_prob", a.balance_prob}});
    manifest["arms"] = arms_json;
    json runs = json::array();
    json failures = json::array();
    for (const auto& r : bundle.runs) {
        json jr = {{"label", r.arm.label},
                   {"seed", r.seed},
                   {"file", (fs::path("runs") / (run_stem(r.arm, r.seed) + ".jsonl")).generic_string()},
                   {"samples", r.history.size()},
                   {"failed", r.failed}};
        if (r.failed) {
            jr["error"] = r.error;
            failures.push_back({{"label", r.arm.label}, {"seed", r.seed}, {"error", r.error}});
        }
        runs.push_back(jr);
    }
    manifest["runs"] = runs;
    manifest["failures"] = failures;
    if (have_space) {
        json ev;
        ev["explained_variance"] = std::vector<double>(bundle.eval_space.explained_variance.data(),
                                                       bundle.eval_space.explained_variance.data() +
                                                           bundle.eval_space.explained_variance.size());
        ev["rank"] = bundle.eval_space.rank;
        ev["pooled_samples"] = bundle.pooled_samples;
        manifest["eval_space"] = ev;
        auto spec_json = [](const metrics::BinningSpec& s) {
            return json{{"n_bins_target", s.n_bins_target},
                        {"bins_per_dim", s.bins_per_dim},
                        {"lo", s.lo},
                        {"hi", s.hi}};
        };
        manifest["binning"] = {{"global", spec_json(bundle.global_spec)},
                               {"constrained", spec_json(bundle.constrained_spec)}};
    } else {
        manifest["eval_space"] = nullptr;
    }
    json files = json::array();
    for (const auto& f : bundle.files) {
        const fs::path full = dir / f;
        files.push_back({{"path", f.generic_string()}, {"sha256", sha256_file(full)}, {"bytes", fs::file_size(full)}});
    }
    manifest["files"] = files;
    write_text(dir / "manifest.json", manifest.dump(2) + "\n");
}

ResultBundle run_arms(const ExperimentPlan& plan, const std::vector<Arm>& arms, const ProgressFn& progress) {
    ResultBundle bundle = analyze(plan, arms, execute_runs(plan, arms, progress));
    if (!plan.output_dir.empty()) write_outputs(bundle);
    return bundle;
}

ResultBundle run_plan(const ExperimentPlan& plan, const ProgressFn& progress) {
    return run_arms(plan, plan.method_arms(), progress);
}

ResultBundle sweep_balance(const ExperimentPlan& plan, const ProgressFn& progress) {
    if (plan.balance_sweep.empty()) throw ValidationError("plan.balance_sweep", "must not be empty");
    return run_arms(plan, plan.sweep_arms(), progress);
}

double seconds_per_inlier(double ms_per_sample, double acceptance_rate) {
    if (!(acceptance_rate > 0.0)) return std::numeric_limits<double>::infinity();
    return ms_per_sample / 1000.0 / acceptance_rate;
}

std::vector<SummaryRow> summarize(const ResultBundle& bundle) {
    std::vector<SummaryRow> rows;
    for (const Arm& a : bundle.arms) {
        SummaryRow row;
        row.label = a.label;
        std::vector<double> acc, ms, g, c;
        for (const auto& r : bundle.runs) {
            if (r.arm.label != a.label || r.failed) continue;
            acc.push_back(r.acceptance_rate);
            ms.push_back(r.mean_ms_per_sample);
            if (!r.diversity.global.empty()) {
                g.push_back(static_cast<double>(r.diversity.global.back()));
                c.push_back(static_cast<double>(r.diversity.constrained.back()));
            }
        }
        row.runs = acc.size();
        row.acceptance_rate = mean_of(acc);
        row.acceptance_std = std_of(acc);
        row.ms_per_sample = mean_of(ms);
        row.s_per_inlier = seconds_per_inlier(row.ms_per_sample, row.acceptance_rate);
        row.final_global_mean = mean_of(g);
        row.final_constrained_mean = mean_of(c);
        rows.push_back(row);
    }
    return rows;
}

std::vector<SummaryRow> summarize(const fs::path& dir) {
    std::ifstream mf(dir / "manifest.json");
    if (!mf) throw std::runtime_error("no manifest.json in " + dir.string());
    const json manifest = json::parse(mf);
    const int n_init = manifest.at("plan").at("n_init").get<int>();

    std::map<std::string, std::map<std::uint64_t, double>> ms_by_run;
    {
        std::ifstream in(dir / "timing.csv");
        std::string line;
        std::getline(in, line);
        while (std::getline(in, line)) {
            const auto cells = split_csv(line);
            if (cells.size() < 4) continue;
            ms_by_run[cells[0]][std::stoull(cells[1])] = std::stod(cells[3]);
        }
    }
    std::map<std::string, std::map<std::uint64_t, std::pair<double, double>>> final_div;
    {
        std::ifstream in(dir / "acceptance.csv");
        std::string line;
        std::getline(in, line);
        while (std::getline(in, line)) {
            const auto cells = split_csv(line);
            if (cells.size() < 9) continue;
            final_div[cells[0]][std::stoull(cells[3])] = {std::stod(cells[7]), std::stod(cells[8])};
        }
    }

    std::vector<SummaryRow> rows;
    for (const auto& arm : manifest.at("arms")) {
        const std::string label = arm.at("label").get<std::string>();
        SummaryRow row;
        row.label = label;
        std::vector<double> acc, ms, g, c;
        for (const auto& run : manifest.at("runs")) {
            if (run.at("label").get<std::string>() != label || run.at("failed").get<bool>()) continue;
            const auto seed = run.at("seed").get<std::uint64_t>();
            const auto records = history_io::read_jsonl(dir / run.at("file").get<std::string>());
            std::vector<int> cls;
            for (const auto& rec : records) cls.push_back(rec.classification);
            acc.push_back(cls.size() > static_cast<std::size_t>(n_init) ? metrics::acceptance_rate(cls, n_init) : 0.0);
            ms.push_back(ms_by_run[label][seed]);
            if (auto it = final_div[label].find(seed); it != final_div[label].end()) {
                g.push_back(it->second.first);
                c.push_back(it->second.second);
            }
        }
        row.runs = acc.size();
        row.acceptance_rate = mean_of(acc);
        row.acceptance_std = std_of(acc);
        row.ms_per_sample = mean_of(ms);
        row.s_per_inlier = seconds_per_inlier(row.ms_per_sample, row.acceptance_rate);
        row.final_global_mean = mean_of(g);
        row.final_constrained_mean = mean_of(c);
        rows.push_back(row);
    }
    return rows;
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
    const auto old = out.precision(10);
    out << "label,runs,acceptance_rate,acceptance_std,ms_per_sample,s_per_inlier,final_global_diversity,"
           "final_constrained_diversity\n";
    for (const auto& r : rows)
        out << r.label << ',' << r.runs << ',' << r.acceptance_rate << ',' << r.acceptance_std << ',' << r.ms_per_sample
            << ',' << r.s_per_inlier << ',' << r.final_global_mean << ',' << r.final_constrained_mean << '\n';
    out.precision(old);
}

std::string format_summary(const std::vector<SummaryRow>& rows) {
    std::ostringstream out;
    char line[256];
    std::snprintf(line, sizeof line, "%-12s %5s %12s %10s %12s %12s %12s\n", "method", "runs", "acceptance", "ms/sample",
                  "s/inlier", "global_div", "constr_div");
    out << line;
    for (const auto& r : rows) {
        std::snprintf(line, sizeof line, "%-12s %5zu %11.2f%% %10.1f %12.3f %12.1f %12.1f\n", r.label.c_str(), r.runs,
                      100.0 * r.acceptance_rate, r.ms_per_sample, r.s_per_inlier, r.final_global_mean,
                      r.final_constrained_mean);
        out << line;
    }
    return out.str();
}

std::string sha256_hex(const std::string& bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("sha256 failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 15];
    }
    return out;
}

std::string sha256_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return sha256_hex(ss.str());
}

}  // namespace imgep::experiments
