#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "sop/driver.hpp"
#include "sop/instance.hpp"

namespace sop {

enum class ExportFormat { csv, json };

struct ExperimentSpec {
    std::vector<std::filesystem::path> instances;
    RunConfig config;  // seed of replication r is config.seed + r
    std::size_t runs = 1;
    std::size_t jobs = 1;
    std::filesystem::path output_dir;  // empty: nothing is written
    ExportFormat format = ExportFormat::csv;
    bool trace = false;
};

/// One line of the raw results file.
struct RawRecord {
    std::string instance;
    std::string algorithm;
    std::string local_search;
    std::uint64_t seed = 0;
    Cost best_cost = 0;
    std::size_t iterations = 0;
    std::int64_t wall_ms = 0;

    friend bool operator==(const RawRecord&, const RawRecord&) = default;
};

struct SummaryRow {
    std::string instance;
    std::string algorithm;  // "<algorithm>+<local search>"
    double mean_cost = 0.0;
    double std_cost = 0.0;  // n-1 denominator; 0 for a single sample
    Cost best_cost = 0;
    double mean_iterations = 0.0;
    double mean_wall_ms = 0.0;
    std::size_t samples = 0;

    bool single_sample() const noexcept { return samples == 1; }
};

inline std::string algorithm_label(const RawRecord& r) { return r.algorithm + "+" + r.local_search; }

/// Mean, sample standard deviation and minimum per (instance, algorithm),
/// in order of first appearance.
inline std::vector<SummaryRow> summarize(const std::vector<RawRecord>& records) {
    std::vector<SummaryRow> rows;
    std::vector<std::vector<const RawRecord*>> groups;
    std::map<std::pair<std::string, std::string>, std::size_t> index;
    for (const auto& r : records) {
        const auto key = std::make_pair(r.instance, algorithm_label(r));
        auto [it, fresh] = index.emplace(key, groups.size());
        if (fresh) {
            groups.emplace_back();
            rows.push_back(SummaryRow{r.instance, key.second});
        }
        groups[it->second].push_back(&r);
    }
    for (std::size_t g = 0; g < groups.size(); ++g) {
        auto& row = rows[g];
        const auto& grp = groups[g];
        const auto k = static_cast<double>(grp.size());
        row.samples = grp.size();
        row.best_cost = grp.front()->best_cost;
        double sum = 0.0, iters = 0.0, wall = 0.0;
        for (const auto* r : grp) {
            sum += static_cast<double>(r->best_cost);
            iters += static_cast<double>(r->iterations);
            wall += static_cast<double>(r->wall_ms);
            row.best_cost = std::min(row.best_cost, r->best_cost);
        }
        row.mean_cost = sum / k;
        row.mean_iterations = iters / k;
        row.mean_wall_ms = wall / k;
        if (grp.size() > 1) {
            double ss = 0.0;
            for (const auto* r : grp) {
                const double d = static_cast<double>(r->best_cost) - row.mean_cost;
                ss += d * d;
            }
            row.std_cost = std::sqrt(ss / (k - 1.0));
        }
    }
    return rows;
}

inline constexpr const char* kRawCsvHeader = "instance,algorithm,local_search,seed,best_cost,iterations,wall_ms";

inline std::string raw_records_csv(const std::vector<RawRecord>& records) {
    std::ostringstream out;
    out << kRawCsvHeader << "\n";
    for (const auto& r : records) {
        out << r.instance << ',' << r.algorithm << ',' << r.local_search << ',' << r.seed << ',' << r.best_cost << ','
            << r.iterations << ',' << r.wall_ms << "\n";
    }
    return out.str();
}

inline std::vector<RawRecord> parse_raw_records_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != kRawCsvHeader) throw std::invalid_argument("raw CSV: bad header");
    std::vector<RawRecord> out;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) f.push_back(cell);
        if (f.size() != 7) throw std::invalid_argument("raw CSV line " + std::to_string(line_no) + ": expected 7 fields");
        try {
            out.push_back(RawRecord{f[0], f[1], f[2], std::stoull(f[3]), std::stoll(f[4]),
                                    static_cast<std::size_t>(std::stoull(f[5])), std::stoll(f[6])});
        } catch (const std::logic_error&) {
            throw std::invalid_argument("raw CSV line " + std::to_string(line_no) + ": malformed number");
        }
    }
    return out;
}

inline std::string summary_csv(const std::vector<SummaryRow>& rows) {
    std::ostringstream out;
    out << "instance,algorithm,mean_cost,std_cost,best_cost,mean_iterations,mean_wall_ms,runs,single_sample\n";
    out.precision(10);
    for (const auto& r : rows) {
        out << r.instance << ',' << r.algorithm << ',' << r.mean_cost << ',' << r.std_cost << ',' << r.best_cost << ','
            << r.mean_iterations << ',' << r.mean_wall_ms << ',' << r.samples << ',' << (r.single_sample() ? 1 : 0)
            << "\n";
    }
    return out.str();
}

inline std::string trace_csv(const std::vector<TraceRow>& trace) {
    std::ostringstream out;
    out.precision(17);
    out << "iteration,best_cost,active_cost,temperature\n";
    for (const auto& t : trace)
        out << t.iteration << ',' << t.best_cost << ',' << t.active_cost << ',' << t.temperature << "\n";
    return out.str();
}

inline nlohmann::json to_json(const std::vector<RawRecord>& records, const std::vector<SummaryRow>& rows) {
    nlohmann::json j;
    j["runs"] = nlohmann::json::array();
    for (const auto& r : records) {
        j["runs"].push_back({{"instance", r.instance},
                             {"algorithm", r.algorithm},
                             {"local_search", r.local_search},
                             {"seed", r.seed},
                             {"best_cost", r.best_cost},
                             {"iterations", r.iterations},
                             {"wall_ms", r.wall_ms}});
    }
    j["summary"] = nlohmann::json::array();
    for (const auto& s : rows) {
        j["summary"].push_back({{"instance", s.instance},
                                {"algorithm", s.algorithm},
                                {"mean_cost", s.mean_cost},
                                {"std_cost", s.std_cost},
                                {"best_cost", s.best_cost},
                                {"mean_iterations", s.mean_iterations},
                                {"mean_wall_ms", s.mean_wall_ms},
                                {"runs", s.samples},
                                {"single_sample", s.single_sample()}});
    }
    return j;
}

struct ExperimentResult {
    std::vector<RawRecord> records;  // ordered by (instance, replication)
    std::vector<SummaryRow> summary;
    std::vector<RunReport> reports;  // parallel to records
};

namespace detail {

inline void write_file(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    out << text;
    if (!out) throw std::runtime_error("cannot write " + p.string());
}

}  // namespace detail

/// Runs every replication of every instance, then writes raw records,
/// the summary and (optionally) one trace file per run.
/// Throws InstanceError for unreadable or infeasible instances and
/// std::runtime_error when the output directory cannot be written.
inline ExperimentResult run_experiment(const ExperimentSpec& spec) {
    if (spec.runs < 1) throw ConfigError("replication count must be at least 1");
    spec.config.check();

    std::vector<Instance> instances;
    for (const auto& path : spec.instances) {
        auto inst = load_instance(path);
        const auto report = validate(inst);
        if (!report.feasible()) throw InstanceError(0, path.string() + ": " + report.violations.front().message);
        instances.push_back(std::move(inst));
    }
    if (!spec.output_dir.empty()) {
        std::error_code ec;
        std::filesystem::create_directories(spec.output_dir, ec);
        if (ec || !std::filesystem::is_directory(spec.output_dir))
            throw std::runtime_error("cannot create output directory " + spec.output_dir.string());
    }

    const auto total = instances.size() * spec.runs;
    ExperimentResult result;
    result.records.resize(total);
    result.reports.resize(total);

    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr error;
    auto worker = [&] {
        for (auto task = next++; task < total; task = next++) {
            const auto& inst = instances[task / spec.runs];
            const auto rep = task % spec.runs;
            auto cfg = spec.config;
            cfg.seed = spec.config.seed + rep;
            if (!spec.trace) cfg.trace_every = 0;
            try {
                auto report = run(cfg, inst);
                result.records[task] = RawRecord{inst.name(),
                                                 std::string(to_string(cfg.algorithm)),
                                                 std::string(to_string(cfg.local_search)),
                                                 cfg.seed,
                                                 report.best_cost(),
                                                 report.iterations,
                                                 static_cast<std::int64_t>(std::llround(report.wall_ms))};
                result.reports[task] = std::move(report);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        }
    };
    const auto jobs = std::max<std::size_t>(1, std::min(spec.jobs, total));
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t k = 0; k < jobs; ++k) pool.emplace_back(worker);
    }
    if (error) std::rethrow_exception(error);

    result.summary = summarize(result.records);

    if (!spec.output_dir.empty()) {
        if (spec.format == ExportFormat::csv) {
            detail::write_file(spec.output_dir / "runs.csv", raw_records_csv(result.records));
            detail::write_file(spec.output_dir / "summary.csv", summary_csv(result.summary));
        } else {
            detail::write_file(spec.output_dir / "results.json", to_json(result.records, result.summary).dump(2));
        }
        if (spec.trace) {
            for (std::size_t k = 0; k < total; ++k) {
                const auto& r = result.records[k];
                const auto name = "trace_" + r.instance + "_" + algorithm_label(r) + "_" + std::to_string(r.seed) + ".csv";
                detail::write_file(spec.output_dir / name, trace_csv(result.reports[k].trace));
            }
        }
    }
    return result;
}

}  // namespace sop
