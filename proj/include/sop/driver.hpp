#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sop/annealing.hpp"
#include "sop/colony.hpp"
#include "sop/instance.hpp"
#include "sop/local_search.hpp"
#include "sop/random.hpp"
#include "sop/route.hpp"

namespace sop {

enum class Algorithm { acs, acs_sa, eacs, eacs_sa };
enum class LocalSearchKind { none, sop3, sop3_sa };

inline std::string_view to_string(Algorithm a) {
    switch (a) {
        case Algorithm::acs: return "acs";
        case Algorithm::acs_sa: return "acs-sa";
        case Algorithm::eacs: return "eacs";
        case Algorithm::eacs_sa: return "eacs-sa";
    }
    return "?";
}

inline std::string_view to_string(LocalSearchKind k) {
    switch (k) {
        case LocalSearchKind::none: return "none";
        case LocalSearchKind::sop3: return "sop3";
        case LocalSearchKind::sop3_sa: return "sop3-sa";
    }
    return "?";
}

inline std::optional<Algorithm> parse_algorithm(std::string_view s) {
    for (auto a : {Algorithm::acs, Algorithm::acs_sa, Algorithm::eacs, Algorithm::eacs_sa})
        if (to_string(a) == s) return a;
    return std::nullopt;
}

inline std::optional<LocalSearchKind> parse_local_search(std::string_view s) {
    for (auto k : {LocalSearchKind::none, LocalSearchKind::sop3, LocalSearchKind::sop3_sa})
        if (to_string(k) == s) return k;
    return std::nullopt;
}

inline bool uses_annealing(Algorithm a) { return a == Algorithm::acs_sa || a == Algorithm::eacs_sa; }
inline bool uses_eacs_rule(Algorithm a) { return a == Algorithm::eacs || a == Algorithm::eacs_sa; }

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct RunConfig {
    Algorithm algorithm = Algorithm::eacs;
    LocalSearchKind local_search = LocalSearchKind::sop3;
    std::optional<std::size_t> max_iterations;
    std::optional<double> time_limit_s;
    std::uint64_t seed = 1;

    ColonyParams colony;              // colony.q0 is ignored unless `q0` is set
    std::optional<double> q0;         // defaults to (n - 20) / n

    double lambda = 0.9999;
    double gamma = 0.1;
    double lambda_ls = 0.99;
    double gamma_ls = 0.1;
    std::size_t temperature_sample = 1000;
    std::size_t ls_temperature_sample = 100000;
    std::optional<double> initial_temperature;  // overrides colony-level calibration

    double ls_gate = 0.2;
    double greedy_update_prob = 0.1;
    LocalSearchOptions ls;
    std::size_t trace_every = 1;  // 0 disables the trace

    void check() const {
        if (!max_iterations && !time_limit_s) throw ConfigError("a run needs an iteration or time budget");
        if (time_limit_s && *time_limit_s < 0.0) throw ConfigError("time limit must be non-negative");
        auto colony_check = colony;
        if (q0) colony_check.q0 = *q0;
        try {
            colony_check.check();
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
        auto unit_open = [](double v) { return v > 0.0 && v < 1.0; };
        if (!unit_open(lambda) || !unit_open(lambda_ls)) throw ConfigError("cooling factors must lie in (0, 1)");
        if (!unit_open(gamma) || !unit_open(gamma_ls)) throw ConfigError("gamma values must lie in (0, 1)");
        if (!(greedy_update_prob >= 0.0 && greedy_update_prob <= 1.0))
            throw ConfigError("greedy update probability must lie in [0, 1]");
        if (!(ls_gate >= 0.0)) throw ConfigError("ls gate must be non-negative");
        if (temperature_sample < 2 || ls_temperature_sample < 1) throw ConfigError("temperature samples too small");
        if (initial_temperature && *initial_temperature < 0.0) throw ConfigError("initial temperature must be >= 0");
    }
};

struct TraceRow {
    std::size_t iteration;
    Cost best_cost;
    Cost active_cost;
    double temperature;

    friend bool operator==(const TraceRow&, const TraceRow&) = default;
};

struct RunReport {
    std::optional<Route> best;
    std::size_t iterations = 0;
    std::vector<TraceRow> trace;
    double wall_ms = 0.0;
    double initial_temperature = 0.0;   // colony-level T0 (SA variants)
    std::size_t worse_acceptances = 0;  // worse ant solutions taken as active

    Cost best_cost() const { return best ? best->cost() : Cost{-1}; }
};

/// EACS local-search gate: candidate <= (1 + gate) * best.
inline bool ls_gate_check(Cost candidate_cost, Cost best_cost, double gate) {
    return static_cast<double>(candidate_cost) <= (1.0 + gate) * static_cast<double>(best_cost);
}

/// Colony-level T0 from `count` random feasible routes: absolute cost
/// differences between consecutive samples.
template <std::uniform_random_bit_generator G>
std::vector<double> random_route_cost_differences(const Instance& inst, std::size_t count, G& rng) {
    std::vector<double> deltas;
    deltas.reserve(count);
    Cost prev = random_feasible(inst, rng).cost();
    for (std::size_t k = 1; k < count; ++k) {
        const Cost c = random_feasible(inst, rng).cost();
        deltas.push_back(static_cast<double>(c > prev ? c - prev : prev - c));
        prev = c;
    }
    return deltas;
}

/// Runs one metaheuristic to its budget.
///
/// Draw order from the single per-run stream: colony T0 sample (SA
/// variants without a forced T0); then per iteration: ant constructions in
/// ant order, local searches in ant order, active-solution Metropolis
/// tests, and the greedy-update coin. Draws whose probability is exactly
/// 0 or 1 are skipped.
inline RunReport run(const RunConfig& config, const Instance& inst) {
    config.check();
    const auto clock_start = std::chrono::steady_clock::now();
    auto elapsed_s = [&] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - clock_start).count();
    };

    RunReport report;
    if ((config.max_iterations && *config.max_iterations == 0) || (config.time_limit_s && *config.time_limit_s == 0.0))
        return report;

    const auto n = inst.size();
    Rng rng(config.seed);
    ColonyParams params = config.colony;
    params.q0 = config.q0.value_or(default_q0(n));

    const bool annealing = uses_annealing(config.algorithm);
    const auto rule = uses_eacs_rule(config.algorithm) ? ConstructionRule::eacs : ConstructionRule::acs;

    Route global_best = greedy_nearest_feasible(inst);
    PheromoneModel model(inst, params.beta, params.candidate_size,
                         1.0 / (static_cast<double>(n) * static_cast<double>(std::max<Cost>(global_best.cost(), 1))));

    AnnealerState colony_temp(config.lambda, config.gamma, config.temperature_sample);
    if (annealing) {
        if (config.initial_temperature) {
            colony_temp.force_initial_temperature(*config.initial_temperature);
        } else {
            colony_temp.calibrate(random_route_cost_differences(inst, config.temperature_sample, rng));
        }
        report.initial_temperature = colony_temp.t0;
    }
    AnnealerState ls_temp(config.lambda_ls, config.gamma_ls, config.ls_temperature_sample);
    GreedyAcceptance greedy;
    AnnealingAcceptance<Rng> annealed(ls_temp, rng);
    SearchContext ctx;
    LocalSearchOptions ls_opt = config.ls;
    ls_opt.stack = rule == ConstructionRule::eacs ? StackInit::out_of_order : StackInit::all;

    Route active = global_best;
    AntState ant(inst);
    std::vector<Route> routes(params.ants);
    std::vector<Cost> costs(params.ants);

    while (global_best.cost() > 0) {
        for (std::size_t k = 0; k < params.ants; ++k)
            routes[k] = construct_solution(rule, model, params, inst, &global_best, rng, ant);

        for (std::size_t k = 0; k < params.ants; ++k) {
            auto& r = routes[k];
            if (config.local_search != LocalSearchKind::none &&
                (rule == ConstructionRule::acs || ls_gate_check(r.cost(), global_best.cost(), config.ls_gate))) {
                r = config.local_search == LocalSearchKind::sop3
                        ? run_local_search(std::move(r), global_best, inst, greedy, ls_opt, ctx)
                        : run_local_search(std::move(r), global_best, inst, annealed, ls_opt, ctx);
            }
            if (r.cost() < global_best.cost()) global_best = r;
            costs[k] = r.cost();
        }

        const Route* target = &global_best;
        double temperature = 0.0;
        if (annealing) {
            temperature = colony_temp.temperature;
            const auto sel = select_active_index(active.cost(), costs, temperature, rng);
            if (sel.index != ActiveSelection::npos) active = routes[sel.index];
            report.worse_acceptances += sel.worse_accepted;
            const double p = config.greedy_update_prob;
            const bool greedy_update = p >= 1.0 ? true : p <= 0.0 ? false : uniform01(rng) < p;
            if (!greedy_update) target = &active;
        }
        global_pheromone_update(model, *target, params.rho);
        if (annealing) cool(colony_temp);

        ++report.iterations;
        if (config.trace_every && report.iterations % config.trace_every == 0) {
            report.trace.push_back({report.iterations, global_best.cost(),
                                    annealing ? active.cost() : global_best.cost(), temperature});
        }
        if (config.max_iterations && report.iterations >= *config.max_iterations) break;
        if (config.time_limit_s && elapsed_s() >= *config.time_limit_s) break;
    }

    report.best = std::move(global_best);
    report.wall_ms = elapsed_s() * 1000.0;
    return report;
}

/// Exact optimum by precedence-pruned depth-first enumeration with a
/// partial-cost bound. Intended as a test oracle for small instances.
inline std::pair<Cost, Route> brute_force_optimum(const Instance& inst, std::size_t limit_n = 10) {
    const auto n = inst.size();
    if (n > limit_n) throw std::invalid_argument("instance too large for enumeration");
    std::vector<int> pending(n);
    for (std::size_t v = 0; v < n; ++v) pending[v] = inst.direct_predecessor_count(static_cast<Node>(v));
    std::vector<char> used(n, 0);
    std::vector<Node> path{inst.start()};
    std::vector<Node> best_path;
    Cost best = -1;

    auto place = [&](Node v, int d) {
        used[static_cast<std::size_t>(v)] = d > 0 ? 0 : 1;
        for (auto w : inst.direct_successors(v)) pending[static_cast<std::size_t>(w)] += d;
    };
    auto dfs = [&](auto&& self, Cost partial) -> void {
        if (best >= 0 && partial >= best) return;
        if (path.size() == n) {
            best = partial;
            best_path = path;
            return;
        }
        const auto cur = path.back();
        for (std::size_t v = 0; v < n; ++v) {
            if (used[v] || pending[v] != 0) continue;
            const auto c = inst.cost(cur, static_cast<Node>(v));
            if (c == kForbidden) continue;
            path.push_back(static_cast<Node>(v));
            place(static_cast<Node>(v), -1);
            self(self, partial + c);
            place(static_cast<Node>(v), +1);
            path.pop_back();
        }
    };
    place(inst.start(), -1);
    dfs(dfs, 0);
    if (best < 0) throw std::logic_error("instance has no feasible route");
    return {best, Route(std::move(best_path), inst)};
}

}  // namespace sop
