#pragma once

#include <algorithm>
#include <limits>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "sop/instance.hpp"
#include "sop/random.hpp"

namespace sop {

/// Thrown when a route traverses a forbidden (precedence-sentinel) arc.
class InfeasibleArc : public std::domain_error {
public:
    InfeasibleArc(Node from, Node to)
        : std::domain_error("arc " + std::to_string(from) + "->" + std::to_string(to) + " is forbidden"),
          from_(from), to_(to) {}
    Node from() const noexcept { return from_; }
    Node to() const noexcept { return to_; }

private:
    Node from_, to_;
};

/// Sum of consecutive arc costs along `order` (open path, no closing arc).
inline Cost evaluate_cost(std::span<const Node> order, const Instance& inst) {
    Cost total = 0;
    for (std::size_t k = 0; k + 1 < order.size(); ++k) {
        const auto c = inst.cost(order[k], order[k + 1]);
        if (c == kForbidden) throw InfeasibleArc(order[k], order[k + 1]);
        total += c;
    }
    return total;
}

/// A complete solution: node order, position index and cached cost.
class Route {
public:
    Route() = default;

    Route(std::vector<Node> order, const Instance& inst) : order_(std::move(order)) {
        rebuild_positions(inst.size());
        cost_ = evaluate_cost(order_, inst);
    }

    std::size_t size() const noexcept { return order_.size(); }
    bool empty() const noexcept { return order_.empty(); }
    Cost cost() const noexcept { return cost_; }
    Node operator[](std::size_t k) const noexcept { return order_[k]; }
    std::size_t position(Node v) const noexcept { return pos_[static_cast<std::size_t>(v)]; }
    std::span<const Node> order() const noexcept { return order_; }

    /// Node following `v`, or -1 when `v` is last.
    Node successor(Node v) const noexcept {
        const auto p = position(v);
        return p + 1 < order_.size() ? order_[p + 1] : Node{-1};
    }

    /// Moves the block [first, last) so that `middle` becomes its first
    /// element, adjusting the cached cost by `-decrease`.
    void rotate_block(std::size_t first, std::size_t middle, std::size_t last, Cost decrease) {
        std::rotate(order_.begin() + static_cast<std::ptrdiff_t>(first),
                    order_.begin() + static_cast<std::ptrdiff_t>(middle),
                    order_.begin() + static_cast<std::ptrdiff_t>(last));
        for (auto k = first; k < last; ++k) pos_[static_cast<std::size_t>(order_[k])] = k;
        cost_ -= decrease;
    }

    std::string to_string() const {
        std::string out;
        for (std::size_t k = 0; k < order_.size(); ++k) {
            if (k) out += ' ';
            out += std::to_string(order_[k]);
        }
        return out;
    }

    friend bool operator==(const Route& a, const Route& b) { return a.order_ == b.order_ && a.cost_ == b.cost_; }

private:
    void rebuild_positions(std::size_t n) {
        if (order_.size() != n) throw std::invalid_argument("route length differs from instance size");
        pos_.assign(n, std::numeric_limits<std::size_t>::max());
        for (std::size_t k = 0; k < n; ++k) {
            const auto v = order_[k];
            if (v < 0 || static_cast<std::size_t>(v) >= n || pos_[static_cast<std::size_t>(v)] != std::numeric_limits<std::size_t>::max())
                throw std::invalid_argument("route is not a permutation");
            pos_[static_cast<std::size_t>(v)] = k;
        }
    }

    std::vector<Node> order_;
    std::vector<std::size_t> pos_;
    Cost cost_ = 0;
};

/// Parses the one-line whitespace-separated node list written by Route::to_string.
inline Route parse_route(const std::string& line, const Instance& inst) {
    std::istringstream in(line);
    std::vector<Node> order;
    long long v;
    while (in >> v) order.push_back(static_cast<Node>(v));
    if (!in.eof()) throw std::invalid_argument("malformed route line");
    return Route(std::move(order), inst);
}

/// True iff `order` is a permutation anchored at start/final that respects
/// every precedence pair.
inline bool is_feasible(std::span<const Node> order, const Instance& inst) {
    const auto n = inst.size();
    if (order.size() != n) return false;
    std::vector<std::size_t> pos(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        const auto v = order[k];
        if (v < 0 || static_cast<std::size_t>(v) >= n || pos[static_cast<std::size_t>(v)] != n) return false;
        pos[static_cast<std::size_t>(v)] = k;
    }
    if (order.front() != inst.start() || order.back() != inst.final_node()) return false;
    return std::all_of(inst.precedences().begin(), inst.precedences().end(), [&](const auto& p) {
        return pos[static_cast<std::size_t>(p.first)] < pos[static_cast<std::size_t>(p.second)];
    });
}

inline bool is_feasible(const Route& route, const Instance& inst) { return is_feasible(route.order(), inst); }

/// Builds a feasible route by repeatedly choosing uniformly among the
/// nodes whose predecessors have all been placed. Draws one value per
/// step with more than one choice.
template <std::uniform_random_bit_generator G>
Route random_feasible(const Instance& inst, G& rng) {
    const auto n = inst.size();
    std::vector<int> pending(n);
    for (std::size_t v = 0; v < n; ++v) pending[v] = inst.direct_predecessor_count(static_cast<Node>(v));
    std::vector<Node> ready{inst.start()};
    std::vector<Node> order;
    order.reserve(n);
    while (!ready.empty()) {
        std::size_t pick = 0;
        if (ready.size() > 1) pick = static_cast<std::size_t>(uniform_below(rng, ready.size()));
        const auto u = ready[pick];
        ready[pick] = ready.back();
        ready.pop_back();
        order.push_back(u);
        for (auto v : inst.direct_successors(u))
            if (--pending[static_cast<std::size_t>(v)] == 0) ready.push_back(v);
    }
    return Route(std::move(order), inst);
}

/// Nearest-neighbour construction: from start, move to the cheapest
/// available node, ties to the lowest index.
inline Route greedy_nearest_feasible(const Instance& inst) {
    const auto n = inst.size();
    std::vector<int> pending(n);
    for (std::size_t v = 0; v < n; ++v) pending[v] = inst.direct_predecessor_count(static_cast<Node>(v));
    std::vector<char> ready(n, 0);
    std::vector<Node> order{inst.start()};
    order.reserve(n);
    auto release = [&](Node u) {
        for (auto v : inst.direct_successors(u))
            if (--pending[static_cast<std::size_t>(v)] == 0) ready[static_cast<std::size_t>(v)] = 1;
    };
    release(inst.start());
    while (order.size() < n) {
        const auto cur = order.back();
        Node best = -1;
        Cost best_cost = 0;
        for (std::size_t v = 0; v < n; ++v) {
            if (!ready[v]) continue;
            const auto c = inst.cost(cur, static_cast<Node>(v));
            if (c == kForbidden) continue;
            if (best < 0 || c < best_cost) {
                best = static_cast<Node>(v);
                best_cost = c;
            }
        }
        if (best < 0) throw std::logic_error("no feasible continuation; precedence relation is cyclic");
        ready[static_cast<std::size_t>(best)] = 0;
        order.push_back(best);
        release(best);
    }
    return Route(std::move(order), inst);
}

}  // namespace sop
