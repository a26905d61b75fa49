// Acceptance suite: one PASS/FAIL line per benchmark criterion.
//
//   imgep_acceptance --unit-tests path/to/imgep_tests [--seeds 10] [--budget 1000] ...
//
// Defaults are the full benchmark scale (about an hour of Gray-Scott plus Lenia on
// one core). Smaller --seeds / --budget give a quick smoke run; the verdicts are
// then not meaningful. Exit status is 0 whenever the suite ran to the end.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "imgep/experiments.hpp"

using namespace imgep;
using namespace imgep::experiments;
using explorer::Method;

namespace {

struct Options {
    int seeds = 10;
    int sweep_seeds = 5;
    int budget = 1000;
    int n_init = 250;
    int threads = 0;
    std::vector<std::string> systems{"gray_scott", "lenia"};
    std::string unit_tests;
    std::string out;
};

int g_failures = 0;

void verdict(bool pass, const std::string& name, const std::string& detail) {
    std::printf("%s  %-34s %s\n", pass ? "PASS" : "FAIL", name.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

std::string pct(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f%%", 100.0 * v);
    return buf;
}

std::string num(double v, int prec = 1) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.*f", prec, v);
    return buf;
}

ExperimentPlan base_plan(const Options& o, SystemKind kind) {
    ExperimentPlan p;
    p.system.kind = kind;
    for (int s = 0; s < o.seeds; ++s) p.seeds.push_back(static_cast<std::uint64_t>(s));
    p.budget = o.budget;
    p.n_init = o.n_init;
    p.roi = explorer::volume_roi(0.6, 0.7);
    p.threads = o.threads;
    return p;
}

void progress(const RunResult& r) {
    std::fprintf(stderr, "  %-12s seed %-3llu acceptance %6.2f%%  %6.1f ms/sample%s\n", r.arm.label.c_str(),
                 static_cast<unsigned long long>(r.seed), 100.0 * r.acceptance_rate, r.mean_ms_per_sample,
                 r.failed ? "  FAILED" : "");
}

struct ArmStats {
    double acceptance = 0.0;
    double final_global = 0.0;
    double final_constrained = 0.0;
    double ms_per_sample = 0.0;
    std::size_t runs = 0;
};

std::map<std::string, ArmStats> arm_stats(const ResultBundle& b) {
    std::map<std::string, ArmStats> out;
    for (const auto& r : b.runs) {
        if (r.failed) continue;
        ArmStats& s = out[r.arm.label];
        s.acceptance += r.acceptance_rate;
        s.final_global += r.diversity.global.empty() ? 0.0 : static_cast<double>(r.diversity.global.back());
        s.final_constrained +=
            r.diversity.constrained.empty() ? 0.0 : static_cast<double>(r.diversity.constrained.back());
        s.ms_per_sample += r.mean_ms_per_sample;
        ++s.runs;
    }
    for (auto& [label, s] : out) {
        if (s.runs == 0) continue;
        const double n = static_cast<double>(s.runs);
        s.acceptance /= n;
        s.final_global /= n;
        s.final_constrained /= n;
        s.ms_per_sample /= n;
    }
    return out;
}

std::size_t failed_runs(const std::vector<RunResult>& runs) {
    return static_cast<std::size_t>(std::count_if(runs.begin(), runs.end(), [](const auto& r) { return r.failed; }));
}

struct SystemOutcome {
    bool ran = false;
    ResultBundle bundle;
    std::map<std::string, ArmStats> stats;
    double wall_s = 0.0;
    double homogeneous_fraction = 0.0;
    std::size_t random_samples = 0;
};

SystemOutcome run_methods(const Options& o, SystemKind kind) {
    SystemOutcome out;
    out.ran = true;
    ExperimentPlan plan = base_plan(o, kind);
    if (!o.out.empty()) plan.output_dir = std::filesystem::path(o.out) / to_string(kind);
    std::fprintf(stderr, "%s: %zu methods x %zu seeds, budget %d\n", to_string(kind).c_str(), plan.methods.size(),
                 plan.seeds.size(), plan.budget);
    const auto start = std::chrono::steady_clock::now();
    out.bundle = run_plan(plan, progress);
    out.wall_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out.stats = arm_stats(out.bundle);

    // Every sample of method R is a uniform draw.
    std::size_t hom = 0;
    for (const auto& r : out.bundle.runs) {
        if (r.arm.method != Method::R) continue;
        for (const auto& e : r.history) {
            hom += e.homogeneous;
            ++out.random_samples;
        }
    }
    out.homogeneous_fraction = out.random_samples ? static_cast<double>(hom) / static_cast<double>(out.random_samples) : 0.0;
    return out;
}

std::string rates(const std::map<std::string, ArmStats>& s) {
    std::ostringstream o;
    bool first = true;
    for (const char* m : {"NRAB", "NRA", "N", "R"}) {
        o << (first ? "" : " ") << m << "=" << pct(s.count(m) ? s.at(m).acceptance : 0.0);
        first = false;
    }
    return o.str();
}

std::string constrained_div(const std::map<std::string, ArmStats>& s) {
    std::ostringstream o;
    bool first = true;
    for (const char* m : {"NRAB", "NRA", "N", "R"}) {
        o << (first ? "" : " ") << m << "=" << num(s.count(m) ? s.at(m).final_constrained : 0.0);
        first = false;
    }
    return o.str();
}

}  // namespace

int main(int argc, char** argv) {
    Options o;
    CLI::App app{"Benchmark acceptance criteria"};
    app.add_option("--seeds", o.seeds, "Seeds per method");
    app.add_option("--sweep-seeds", o.sweep_seeds, "Seeds per balance value");
    app.add_option("--budget", o.budget, "Samples per run");
    app.add_option("--n-init", o.n_init, "Random bootstrap samples");
    app.add_option("--threads", o.threads, "Parallel runs (0: all cores)");
    app.add_option("--systems", o.systems, "Systems to benchmark")->delimiter(',');
    app.add_option("--unit-tests", o.unit_tests, "Unit-test executable for the property-suite criterion");
    app.add_option("--out", o.out, "Keep all run outputs under this directory");
    CLI11_PARSE(app, argc, argv);

    const bool full_scale = o.seeds >= 10 && o.sweep_seeds >= 5 && o.budget >= 1000 && o.n_init == 250;
    std::printf("acceptance suite: %d seeds, %d sweep seeds, budget %d, n_init %d%s\n", o.seeds, o.sweep_seeds,
                o.budget, o.n_init, full_scale ? "" : " (reduced scale)");
    std::fflush(stdout);

    auto wants = [&](const std::string& s) { return std::find(o.systems.begin(), o.systems.end(), s) != o.systems.end(); };

    // Property suites first: cheap, and independent of the benchmarks.
    if (!o.unit_tests.empty()) {
        const std::string cmd = "\"" + o.unit_tests + "\" --minimal > /dev/null 2>&1";
        const int rc = std::system(cmd.c_str());
        verdict(rc == 0, "property_suites", "unit-test executable exit status " + std::to_string(rc));
    } else {
        verdict(false, "property_suites", "no --unit-tests executable given");
    }

    SystemOutcome gs, lenia;
    auto run_system = [&](SystemKind kind, SystemOutcome& out) {
        try {
            out = run_methods(o, kind);
        } catch (const std::exception& e) {
            out.ran = false;
            verdict(false, to_string(kind) + "_acceptance_ordering", std::string("error: ") + e.what());
        }
    };
    if (wants("gray_scott")) run_system(SystemKind::gray_scott, gs);
    if (wants("lenia")) run_system(SystemKind::lenia, lenia);

    if (gs.ran) {
        const auto& s = gs.stats;
        const double nrab = s.at("NRAB").acceptance, nra = s.at("NRA").acceptance, n = s.at("N").acceptance,
                     r = s.at("R").acceptance;
        const bool order = nrab > nra && n > r && nrab >= 2.0 * std::max(n, nra) && nrab >= 5.0 * r;
        const bool time_ok = gs.wall_s <= 3600.0;
        verdict(order && time_ok && failed_runs(gs.bundle.runs) == 0, "gray_scott_acceptance_ordering",
                rates(s) + " (reference 13.66/5.60/5.35/0.68%), need NRAB>NRA, N>R, NRAB>=2x max(N,NRA), NRAB>=5x R; " +
                    num(gs.wall_s / 60.0) + " min");
    }
    if (lenia.ran) {
        const auto& s = lenia.stats;
        const double nrab = s.at("NRAB").acceptance, nra = s.at("NRA").acceptance, n = s.at("N").acceptance,
                     r = s.at("R").acceptance;
        const bool order = nrab > std::max({nra, n, r}) && r <= std::min(n, nra) && nrab >= 1.3 * std::max(n, nra);
        const bool time_ok = lenia.wall_s <= 3.0 * 3600.0;
        verdict(order && time_ok && failed_runs(lenia.bundle.runs) == 0, "lenia_acceptance_ordering",
                rates(s) + " (reference NRAB 19.46%, R 8.33%), need NRAB highest, R lowest, NRAB>=1.3x max(N,NRA); " +
                    num(lenia.wall_s / 60.0) + " min");
    }

    if (gs.ran || lenia.ran) {
        bool pass = true;
        std::string detail;
        if (gs.ran) {
            const bool ok = gs.random_samples >= 1000 && std::abs(gs.homogeneous_fraction - 0.908) <= 0.05;
            pass = pass && ok;
            detail += "gray_scott " + pct(gs.homogeneous_fraction) + " of " + std::to_string(gs.random_samples) +
                      " (need 90.8 +/- 5 pp, >= 1000 samples)";
        }
        if (lenia.ran) {
            const bool ok = lenia.random_samples > 0 && lenia.homogeneous_fraction < 0.40;
            pass = pass && ok;
            detail += std::string(detail.empty() ? "" : "; ") + "lenia " + pct(lenia.homogeneous_fraction) + " of " +
                      std::to_string(lenia.random_samples) + " (need < 40%, reference 19.0%)";
        }
        verdict(pass, "homogeneity_statistics", detail);
    }

    // Balance sweep on Gray-Scott. Balance 0 is NRA and balance 0.5 is the plan's NRAB,
    // so those seeds are reused; the other values get fresh runs.
    if (gs.ran) try {
        ExperimentPlan plan = base_plan(o, SystemKind::gray_scott);
        plan.seeds.clear();
        for (int s = 0; s < o.sweep_seeds; ++s) plan.seeds.push_back(static_cast<std::uint64_t>(s));
        if (!o.out.empty()) plan.output_dir = std::filesystem::path(o.out) / "gray_scott_sweep";
        const std::vector<Arm> arms = plan.sweep_arms();

        std::vector<RunResult> runs;
        std::vector<Arm> fresh;
        for (const Arm& a : arms) {
            const char* reuse = a.balance_prob == 0.0 ? "NRA" : a.balance_prob == plan.balance_prob ? "NRAB" : nullptr;
            if (!reuse) {
                fresh.push_back(a);
                continue;
            }
            for (const auto& r : gs.bundle.runs)
                if (r.arm.label == reuse && std::find(plan.seeds.begin(), plan.seeds.end(), r.seed) != plan.seeds.end()) {
                    RunResult copy = r;
                    copy.arm = a;
                    runs.push_back(std::move(copy));
                }
        }
        std::fprintf(stderr, "gray_scott balance sweep: %zu new arms x %zu seeds\n", fresh.size(), plan.seeds.size());
        for (auto& r : execute_runs(plan, fresh, progress)) runs.push_back(std::move(r));
        ResultBundle sweep = analyze(plan, arms, std::move(runs));
        if (!plan.output_dir.empty()) write_outputs(sweep);
        const auto s = arm_stats(sweep);

        auto at = [&](double b) -> const ArmStats& {
            for (const Arm& a : arms)
                if (a.balance_prob == b) return s.at(a.label);
            throw std::logic_error("missing sweep arm");
        };
        double best_constrained = 0.0;
        std::ostringstream detail;
        for (const Arm& a : arms) {
            best_constrained = std::max(best_constrained, s.at(a.label).final_constrained);
            detail << "b" << a.balance_prob << "=(" << num(s.at(a.label).final_global) << ", "
                   << num(s.at(a.label).final_constrained) << ") ";
        }
        const bool c_trend = at(1.0).final_constrained >= at(0.0).final_constrained;
        const bool g_trend = at(0.0).final_global >= at(1.0).final_global;
        const bool compromise = at(0.5).final_constrained >= 0.8 * best_constrained;
        detail << "(global, constrained); need C(1)>=C(0), G(0)>=G(1), C(0.5)>=0.8 max C";
        verdict(c_trend && g_trend && compromise && failed_runs(sweep.runs) == 0, "balance_sweep_trends", detail.str());
    } catch (const std::exception& e) {
        verdict(false, "balance_sweep_trends", std::string("error: ") + e.what());
    }

    if (gs.ran || lenia.ran) {
        bool pass = true;
        std::ostringstream detail;
        if (gs.ran) {
            const auto& s = gs.stats;
            const bool order = s.at("NRAB").final_constrained > s.at("NRA").final_constrained &&
                               s.at("NRA").final_constrained >= s.at("N").final_constrained &&
                               s.at("N").final_constrained > s.at("R").final_constrained;
            const double g_ratio = s.at("NRAB").final_global / std::max(1.0, s.at("NRA").final_global);
            const bool global_ok = std::abs(g_ratio - 1.0) <= 0.10;
            pass = pass && order && global_ok;
            detail << "gray_scott constrained " << constrained_div(s) << ", global NRAB/NRA " << num(g_ratio, 3);
        }
        if (lenia.ran) {
            const auto& s = lenia.stats;
            const double nrab = s.at("NRAB").final_constrained;
            const bool highest = nrab > std::max({s.at("NRA").final_constrained, s.at("N").final_constrained,
                                                  s.at("R").final_constrained});
            const double g_ratio = s.at("NRAB").final_global / std::max(1.0, s.at("NRA").final_global);
            const bool global_ok = std::abs(g_ratio - 1.0) <= 0.10;
            pass = pass && highest && global_ok;
            detail << (gs.ran ? "; " : "") << "lenia constrained " << constrained_div(s) << ", global NRAB/NRA "
                   << num(g_ratio, 3);
        }
        detail << "; need GS NRAB>NRA>=N>R, lenia NRAB highest, global NRAB within 10% of NRA";
        verdict(pass, "diversity_ordering", detail.str());
    }

    if (gs.ran || lenia.ran) {
        bool pass = true;
        std::string detail;
        auto mean_ms = [](const SystemOutcome& so) {
            double sum = 0.0;
            std::size_t n = 0;
            for (const auto& r : so.bundle.runs)
                for (const auto& e : r.history) {
                    sum += e.elapsed_ms;
                    ++n;
                }
            return n ? sum / static_cast<double>(n) : 0.0;
        };
        if (gs.ran) {
            const double ms = mean_ms(gs);
            pass = pass && ms <= 500.0;
            detail += "gray_scott " + num(ms) + " ms/sample (<= 500)";
        }
        if (lenia.ran) {
            const double ms = mean_ms(lenia);
            pass = pass && ms <= 1000.0;
            detail += std::string(detail.empty() ? "" : ", ") + "lenia " + num(ms) + " ms/sample (<= 1000)";
        }
        verdict(pass, "interactivity_bound", detail);
    }

    std::printf("%d criteria failed\n", g_failures);
    return 0;
}
