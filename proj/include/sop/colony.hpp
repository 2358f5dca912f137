#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "sop/instance.hpp"
#include "sop/random.hpp"
#include "sop/route.hpp"

namespace sop {

/// q0 = (n - 20) / n, clamped to 0 for n <= 20.
inline double default_q0(std::size_t n) {
    if (n <= 20) return 0.0;
    return static_cast<double>(n - 20) / static_cast<double>(n);
}

struct ColonyParams {
    std::size_t ants = 10;
    double beta = 0.5;
    double psi = 0.01;
    double rho = 0.1;
    double q0 = 0.9;
    std::size_t candidate_size = 25;

    void check() const {
        if (ants < 1) throw std::invalid_argument("ant count must be at least 1");
        if (!(psi > 0.0 && psi < 1.0)) throw std::invalid_argument("psi must lie in (0, 1)");
        if (!(rho > 0.0 && rho < 1.0)) throw std::invalid_argument("rho must lie in (0, 1)");
        if (!(q0 >= 0.0 && q0 <= 1.0)) throw std::invalid_argument("q0 must lie in [0, 1]");
        if (candidate_size < 1) throw std::invalid_argument("candidate list size must be at least 1");
    }
};

/// Pheromone trails, heuristic values and static candidate lists for one run.
class PheromoneModel {
public:
    PheromoneModel(const Instance& inst, double beta, std::size_t candidate_size, double tau0)
        : n_(inst.size()), tau0_(tau0), tau_(n_ * n_, tau0), eta_(n_ * n_, 0.0), eta_pow_(n_ * n_, 0.0),
          candidates_(n_) {
        if (!(tau0 > 0.0)) throw std::invalid_argument("tau0 must be positive");
        for (std::size_t i = 0; i < n_; ++i) {
            for (std::size_t j = 0; j < n_; ++j) {
                const auto c = inst.cost(static_cast<Node>(i), static_cast<Node>(j));
                if (i == j || c == kForbidden) continue;
                const double e = 1.0 / static_cast<double>(std::max<Cost>(c, 1));
                eta_[i * n_ + j] = e;
                eta_pow_[i * n_ + j] = std::pow(e, beta);
            }
            auto& cand = candidates_[i];
            for (std::size_t j = 0; j < n_; ++j)
                if (eta_[i * n_ + j] > 0.0) cand.push_back(static_cast<Node>(j));
            std::stable_sort(cand.begin(), cand.end(), [&](Node a, Node b) {
                return inst.cost(static_cast<Node>(i), a) < inst.cost(static_cast<Node>(i), b);
            });
            if (cand.size() > candidate_size) cand.resize(candidate_size);
        }
    }

    /// 1 / (n * C_nn) with C_nn the nearest-neighbour route cost (at least 1).
    static double default_tau0(const Instance& inst) {
        const auto cnn = std::max<Cost>(greedy_nearest_feasible(inst).cost(), 1);
        return 1.0 / (static_cast<double>(inst.size()) * static_cast<double>(cnn));
    }

    std::size_t size() const noexcept { return n_; }
    double tau0() const noexcept { return tau0_; }
    double tau(Node a, Node b) const noexcept { return tau_[at(a, b)]; }
    void set_tau(Node a, Node b, double v) noexcept { tau_[at(a, b)] = v; }
    double eta(Node a, Node b) const noexcept { return eta_[at(a, b)]; }
    /// tau(a, b) * eta(a, b)^beta
    double attractiveness(Node a, Node b) const noexcept { return tau_[at(a, b)] * eta_pow_[at(a, b)]; }
    const std::vector<Node>& candidates(Node u) const noexcept { return candidates_[static_cast<std::size_t>(u)]; }
    double min_tau() const { return *std::min_element(tau_.begin(), tau_.end()); }

private:
    std::size_t at(Node a, Node b) const noexcept {
        return static_cast<std::size_t>(a) * n_ + static_cast<std::size_t>(b);
    }

    std::size_t n_;
    double tau0_;
    std::vector<double> tau_;
    std::vector<double> eta_;
    std::vector<double> eta_pow_;
    std::vector<std::vector<Node>> candidates_;
};

/// tau(a,b) <- (1 - psi) tau(a,b) + psi tau0
inline void local_pheromone_update(PheromoneModel& model, Node a, Node b, double psi) {
    model.set_tau(a, b, (1.0 - psi) * model.tau(a, b) + psi * model.tau0());
}

/// tau(u,v) <- (1 - rho) tau(u,v) + rho / L for every arc of `route`.
inline void global_pheromone_update(PheromoneModel& model, const Route& route, double rho) {
    if (route.cost() <= 0) throw std::invalid_argument("global update needs a route of positive cost");
    const double deposit = rho / static_cast<double>(route.cost());
    for (std::size_t k = 0; k + 1 < route.size(); ++k) {
        const auto a = route[k], b = route[k + 1];
        model.set_tau(a, b, (1.0 - rho) * model.tau(a, b) + deposit);
    }
}

/// Partial route of one ant plus the set of nodes it may append next.
class AntState {
public:
    explicit AntState(const Instance& inst) : inst_(&inst), n_(inst.size()) { reset(); }

    void reset() {
        route_.clear();
        route_.reserve(n_);
        visited_.assign(n_, 0);
        pending_.resize(n_);
        for (std::size_t v = 0; v < n_; ++v) pending_[v] = inst_->direct_predecessor_count(static_cast<Node>(v));
        frontier_.clear();
        slot_.assign(n_, -1);
        append(inst_->start());
    }

    Node current() const noexcept { return route_.back(); }
    bool complete() const noexcept { return route_.size() == n_; }
    bool visited(Node v) const noexcept { return visited_[static_cast<std::size_t>(v)] != 0; }
    bool in_frontier(Node v) const noexcept { return slot_[static_cast<std::size_t>(v)] >= 0; }
    const std::vector<Node>& frontier() const noexcept { return frontier_; }
    const std::vector<Node>& route() const noexcept { return route_; }

    void move_to(Node v) {
        if (!in_frontier(v)) throw std::logic_error("move_to: node is not available");
        const auto s = static_cast<std::size_t>(slot_[static_cast<std::size_t>(v)]);
        frontier_[s] = frontier_.back();
        slot_[static_cast<std::size_t>(frontier_[s])] = static_cast<int>(s);
        frontier_.pop_back();
        slot_[static_cast<std::size_t>(v)] = -1;
        append(v);
    }

    /// Scratch buffers reused by the selection rules.
    std::vector<Node> choice;
    std::vector<double> weight;

private:
    void append(Node v) {
        route_.push_back(v);
        visited_[static_cast<std::size_t>(v)] = 1;
        for (auto w : inst_->direct_successors(v)) {
            if (--pending_[static_cast<std::size_t>(w)] == 0) {
                slot_[static_cast<std::size_t>(w)] = static_cast<int>(frontier_.size());
                frontier_.push_back(w);
            }
        }
    }

    const Instance* inst_;
    std::size_t n_;
    std::vector<Node> route_;
    std::vector<char> visited_;
    std::vector<int> pending_;
    std::vector<Node> frontier_;
    std::vector<int> slot_;
};

namespace detail {

// Candidate list filtered by the frontier, or the whole frontier when the
// filter leaves nothing.
inline void gather_choices(AntState& ant, const PheromoneModel& model) {
    ant.choice.clear();
    for (auto v : model.candidates(ant.current()))
        if (ant.in_frontier(v)) ant.choice.push_back(v);
    if (ant.choice.empty()) ant.choice.assign(ant.frontier().begin(), ant.frontier().end());
}

inline Node argmax_choice(const AntState& ant, const PheromoneModel& model) {
    const auto cur = ant.current();
    Node best = -1;
    double best_w = -1.0;
    for (auto v : ant.choice) {
        const auto w = model.attractiveness(cur, v);
        if (w > best_w || (w == best_w && v < best)) {
            best = v;
            best_w = w;
        }
    }
    return best;
}

template <std::uniform_random_bit_generator G>
Node roulette_choice(AntState& ant, const PheromoneModel& model, G& rng) {
    const auto cur = ant.current();
    ant.weight.resize(ant.choice.size());
    double total = 0.0;
    for (std::size_t k = 0; k < ant.choice.size(); ++k) {
        ant.weight[k] = model.attractiveness(cur, ant.choice[k]);
        total += ant.weight[k];
    }
    const double r = uniform01(rng) * total;
    double acc = 0.0;
    for (std::size_t k = 0; k < ant.choice.size(); ++k) {
        acc += ant.weight[k];
        if (r < acc) return ant.choice[k];
    }
    return ant.choice.back();
}

}  // namespace detail

/// Probability of each node being picked by the proportional branch.
inline std::vector<std::pair<Node, double>> selection_probabilities(AntState& ant, const PheromoneModel& model) {
    detail::gather_choices(ant, model);
    std::vector<std::pair<Node, double>> out;
    double total = 0.0;
    for (auto v : ant.choice) total += model.attractiveness(ant.current(), v);
    for (auto v : ant.choice) out.emplace_back(v, model.attractiveness(ant.current(), v) / total);
    return out;
}

/// ACS pseudo-random proportional rule. Draws q (unless only one node is
/// available); q <= q0 takes the argmax of tau * eta^beta, otherwise a
/// proportional draw follows.
template <std::uniform_random_bit_generator G>
Node select_next_acs(AntState& ant, const PheromoneModel& model, const ColonyParams& params, G& rng) {
    const auto& frontier = ant.frontier();
    if (frontier.empty()) throw std::logic_error("select_next: empty frontier");
    if (frontier.size() == 1) return frontier.front();
    const double q = uniform01(rng);
    detail::gather_choices(ant, model);
    return q <= params.q0 ? detail::argmax_choice(ant, model) : detail::roulette_choice(ant, model, rng);
}

/// EACS rule: on the exploitation branch prefer the successor of the
/// current node in `best`; otherwise identical to the ACS rule.
template <std::uniform_random_bit_generator G>
Node select_next_eacs(AntState& ant, const PheromoneModel& model, const ColonyParams& params, const Route& best,
                      G& rng) {
    const auto& frontier = ant.frontier();
    if (frontier.empty()) throw std::logic_error("select_next: empty frontier");
    if (frontier.size() == 1) return frontier.front();
    const double q = uniform01(rng);
    if (q <= params.q0) {
        const auto w = best.successor(ant.current());
        if (w >= 0 && ant.in_frontier(w)) return w;
        detail::gather_choices(ant, model);
        return detail::argmax_choice(ant, model);
    }
    detail::gather_choices(ant, model);
    return detail::roulette_choice(ant, model, rng);
}

enum class ConstructionRule { acs, eacs };

/// Builds one complete route, applying the local pheromone update after
/// each step. `best` is required for the EACS rule.
template <std::uniform_random_bit_generator G>
Route construct_solution(ConstructionRule rule, PheromoneModel& model, const ColonyParams& params,
                         const Instance& inst, const Route* best, G& rng, AntState& ant) {
    if (rule == ConstructionRule::eacs && (best == nullptr || best->empty()))
        throw std::invalid_argument("EACS construction needs a best route");
    ant.reset();
    while (!ant.complete()) {
        const auto from = ant.current();
        const auto to = rule == ConstructionRule::acs ? select_next_acs(ant, model, params, rng)
                                                      : select_next_eacs(ant, model, params, *best, rng);
        ant.move_to(to);
        local_pheromone_update(model, from, to, params.psi);
    }
    return Route(ant.route(), inst);
}

template <std::uniform_random_bit_generator G>
Route construct_solution(ConstructionRule rule, PheromoneModel& model, const ColonyParams& params,
                         const Instance& inst, const Route* best, G& rng) {
    AntState ant(inst);
    return construct_solution(rule, model, params, inst, best, rng, ant);
}

}  // namespace sop
