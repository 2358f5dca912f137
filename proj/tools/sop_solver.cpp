// Command-line front end: runs replicated experiments and exports results.
#include <glob.h>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sop/sop.hpp"

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitInstance = 2;

std::vector<std::filesystem::path> expand(const std::vector<std::string>& patterns) {
    std::vector<std::filesystem::path> out;
    for (const auto& p : patterns) {
        glob_t g{};
        if (::glob(p.c_str(), 0, nullptr, &g) == 0) {
            for (std::size_t k = 0; k < g.gl_pathc; ++k) out.emplace_back(g.gl_pathv[k]);
        } else {
            out.emplace_back(p);  // let the loader report it
        }
        ::globfree(&g);
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sequential ordering problem solver (ACS, ACS-SA, EACS, EACS-SA)"};

    sop::ExperimentSpec spec;
    auto& cfg = spec.config;
    std::vector<std::string> instance_patterns;
    std::string algorithm = "eacs";
    std::string local_search = "sop3";
    std::string format = "csv";
    std::size_t iterations = 0;
    double time_limit = 0.0;
    double q0 = -1.0;
    double t0 = -1.0;

    app.add_option("--instance", instance_patterns, "Instance file(s); glob patterns allowed")->required();
    app.add_option("--algorithm", algorithm, "acs | acs-sa | eacs | eacs-sa")->capture_default_str();
    app.add_option("--local-search", local_search, "none | sop3 | sop3-sa")->capture_default_str();
    app.add_option("--time-limit", time_limit, "Wall-clock budget per run in seconds");
    app.add_option("--iterations", iterations, "Iteration budget per run");
    app.add_option("--runs", spec.runs, "Replications per instance")->capture_default_str();
    app.add_option("--seed", cfg.seed, "Seed of the first replication")->capture_default_str();
    app.add_option("--jobs", spec.jobs, "Concurrent replications")->capture_default_str();
    app.add_option("--ants", cfg.colony.ants, "Number of ants")->capture_default_str();
    app.add_option("--beta", cfg.colony.beta, "Heuristic exponent")->capture_default_str();
    app.add_option("--rho", cfg.colony.rho, "Global evaporation")->capture_default_str();
    app.add_option("--psi", cfg.colony.psi, "Local evaporation")->capture_default_str();
    app.add_option("--q0", q0, "Exploitation threshold (default (n-20)/n)");
    app.add_option("--lambda", cfg.lambda, "Colony cooling factor")->capture_default_str();
    app.add_option("--gamma", cfg.gamma, "Colony initial worse-acceptance probability")->capture_default_str();
    app.add_option("--lambda-ls", cfg.lambda_ls, "Local-search cooling factor")->capture_default_str();
    app.add_option("--gamma-ls", cfg.gamma_ls, "Local-search initial worse-acceptance probability")
        ->capture_default_str();
    app.add_option("--ls-gate", cfg.ls_gate, "EACS local-search gate (relative to best)")->capture_default_str();
    app.add_option("--greedy-update-prob", cfg.greedy_update_prob, "SA variants: global-best update probability")
        ->capture_default_str();
    app.add_option("--initial-temperature", t0, "Force the colony-level T0 instead of calibrating");
    app.add_option("--candidate-size", cfg.colony.candidate_size, "Candidate list length")->capture_default_str();
    app.add_option("--or-limit", cfg.ls.or_limit, "Max left-block length in the local search (0 = unbounded)")
        ->capture_default_str();
    app.add_option("--output", spec.output_dir, "Output directory");
    app.add_option("--format", format, "csv | json")->capture_default_str();
    app.add_option("--trace-every", cfg.trace_every, "Trace decimation factor")->capture_default_str();
    app.add_flag("--trace", spec.trace, "Write one trace file per run");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfig;
    }

    const auto alg = sop::parse_algorithm(algorithm);
    const auto ls = sop::parse_local_search(local_search);
    if (!alg || !ls || (format != "csv" && format != "json")) {
        std::cerr << "error: unknown --algorithm, --local-search or --format value\n";
        return kExitConfig;
    }
    cfg.algorithm = *alg;
    cfg.local_search = *ls;
    if (iterations > 0) cfg.max_iterations = iterations;
    if (time_limit > 0.0) cfg.time_limit_s = time_limit;
    if (q0 >= 0.0) cfg.q0 = q0;
    if (t0 >= 0.0) cfg.initial_temperature = t0;
    spec.format = format == "csv" ? sop::ExportFormat::csv : sop::ExportFormat::json;
    spec.instances = expand(instance_patterns);

    try {
        const auto result = sop::run_experiment(spec);
        std::printf("%-20s %-16s %12s %10s %10s %12s %5s\n", "instance", "algorithm", "mean", "std", "best",
                    "iterations", "runs");
        for (const auto& row : result.summary) {
            std::printf("%-20s %-16s %12.1f %10.1f %10lld %12.1f %5zu\n", row.instance.c_str(), row.algorithm.c_str(),
                        row.mean_cost, row.std_cost, static_cast<long long>(row.best_cost), row.mean_iterations,
                        row.samples);
        }
        if (spec.output_dir.empty() && result.records.size() == 1 && result.reports.front().best)
            std::printf("route: %s\n", result.reports.front().best->to_string().c_str());
    } catch (const sop::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const sop::InstanceError& e) {
        std::cerr << "instance error: " << e.what() << "\n";
        return kExitInstance;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    return 0;
}
