// explore: command-line front end for the exploration engine.
//
//   explore run --plan plan.json [--out DIR] [--threads N]
//   explore sweep-balance --plan plan.json [--out DIR]
//   explore summarize DIR
//   explore serve [--host H] [--port P]
//   explore rollout --system gray_scott --params 0.035,0.065 --out pattern.png

#include <csignal>
#include <cstdio>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "imgep/errors.hpp"
#include "imgep/experiments.hpp"
#include "imgep/explorer.hpp"
#include "imgep/png_io.hpp"
#include "imgep/service.hpp"

using namespace imgep;

namespace {

service::Server* g_server = nullptr;

void on_signal(int) {
    if (g_server) g_server->stop();
}

experiments::ExperimentPlan load(const std::string& path, const std::string& out, int threads) {
    experiments::ExperimentPlan plan = experiments::load_plan(path);
    if (!out.empty()) plan.output_dir = out;
    if (threads > 0) plan.threads = threads;
    if (plan.output_dir.empty()) plan.output_dir = "explore_out";
    return plan;
}

void print_progress(const experiments::RunResult& r) {
    std::fprintf(stderr, "%-12s seed %-6llu %s acceptance %6.2f%%  %.1f ms/sample  (%.1f s)\n", r.arm.label.c_str(),
                 static_cast<unsigned long long>(r.seed), r.failed ? "FAILED" : "done  ", 100.0 * r.acceptance_rate,
                 r.mean_ms_per_sample, r.wall_ms / 1000.0);
    if (r.failed) std::fprintf(stderr, "  error: %s\n", r.error.c_str());
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(std::stod(cell));
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Constrained diversity search over Gray-Scott and Lenia parameter spaces"};
    app.require_subcommand(1);

    std::string plan_path, out_dir;
    int threads = 0;
    bool quiet = false;

    auto* run = app.add_subcommand("run", "Run every method x seed of an experiment plan");
    run->add_option("--plan", plan_path, "Plan file (JSON)")->required()->check(CLI::ExistingFile);
    run->add_option("--out", out_dir, "Output directory (overrides the plan)");
    run->add_option("--threads", threads, "Parallel runs (0: all cores)");
    run->add_flag("--quiet", quiet, "No per-run progress");

    auto* sweep = app.add_subcommand("sweep-balance", "Run NRAB at each balance value of the plan");
    sweep->add_option("--plan", plan_path, "Plan file (JSON)")->required()->check(CLI::ExistingFile);
    sweep->add_option("--out", out_dir, "Output directory (overrides the plan)");
    sweep->add_option("--threads", threads, "Parallel runs (0: all cores)");
    sweep->add_flag("--quiet", quiet, "No per-run progress");

    std::string summary_dir;
    bool csv = false;
    auto* summarize = app.add_subcommand("summarize", "Acceptance / timing table of a finished run directory");
    summarize->add_option("dir", summary_dir, "Directory written by run or sweep-balance")
        ->required()
        ->check(CLI::ExistingDirectory);
    summarize->add_flag("--csv", csv, "Print CSV instead of a table");

    std::string host = "127.0.0.1";
    int port = 8080;
    auto* serve = app.add_subcommand("serve", "Start the session service");
    serve->add_option("--host", host, "Bind address");
    serve->add_option("--port", port, "Port (0: any free port)");

    std::string system_name = "gray_scott", params_text, png_out;
    std::uint64_t seed = 0;
    auto* rollout = app.add_subcommand("rollout", "Simulate one parameter vector and write the observation as PNG");
    rollout->add_option("--system", system_name, "gray_scott or lenia");
    rollout->add_option("--params", params_text, "Comma-separated parameter values")->required();
    rollout->add_option("--seed", seed, "Master seed (selects the initial state)");
    rollout->add_option("--out", png_out, "PNG path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run || *sweep) {
            auto plan = load(plan_path, out_dir, threads);
            experiments::ProgressFn progress;
            if (!quiet) progress = print_progress;
            const auto bundle = *run ? experiments::run_plan(plan, progress) : experiments::sweep_balance(plan, progress);
            std::cout << experiments::format_summary(experiments::summarize(bundle));
            std::cout << "wrote " << plan.output_dir.string() << "\n";
            for (const auto& r : bundle.runs)
                if (r.failed) return 2;
            return 0;
        }
        if (*summarize) {
            const auto rows = experiments::summarize(summary_dir);
            if (csv) experiments::write_summary_csv(std::cout, rows);
            else std::cout << experiments::format_summary(rows);
            return 0;
        }
        if (*serve) {
            service::SessionManager sessions;
            service::Server server(sessions);
            int bound = port;
            if (port == 0) {
                bound = server.bind_any_port(host);
            } else if (!server.bind(host, port)) {
                std::cerr << "cannot bind " << host << ":" << port << "\n";
                return 1;
            }
            g_server = &server;
            std::signal(SIGINT, on_signal);
            std::signal(SIGTERM, on_signal);
            std::cout << "listening on http://" << host << ":" << bound << std::endl;
            server.listen();
            g_server = nullptr;
            sessions.clear();
            return 0;
        }
        if (*rollout) {
            SystemSpec spec;
            spec.kind = parse_system_kind(system_name);
            auto system = make_system(spec, explorer::initial_state_seed(seed));
            const auto values = parse_list(params_text);
            const ParamVector p(system->space(), values);
            const auto result = system->rollout(p.values());
            write_png(png_out, result.observation);
            std::cout << "homogeneous " << (is_homogeneous(result.observation) ? "yes" : "no") << ", invalid "
                      << (result.invalid ? "yes" : "no") << "\n";
            return 0;
        }
    } catch (const ValidationError& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
