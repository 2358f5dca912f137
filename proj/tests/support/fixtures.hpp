#pragma once
// Test-only fixtures and independent oracles. Nothing here calls into the
// search code it is used to check.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <set>
#include <tuple>
#include <vector>

#include "sop/instance.hpp"
#include "sop/route.hpp"

namespace sop::testing {

/// 4-node fixture: rows [0,2,9,14], [-1,0,3,7], [-1,-1,0,1], [-1,-1,-1,0].
inline Instance t4() {
    return Instance("T4", 4, {0, 2, 9, 14, -1, 0, 3, 7, -1, -1, 0, 1, -1, -1, -1, 0});
}

/// Builder over a cost matrix; precedences are written as -1 entries.
struct MatrixBuilder {
    std::size_t n;
    std::vector<Cost> m;

    explicit MatrixBuilder(std::size_t n_, Cost fill = 1) : n(n_), m(n_ * n_, fill) {
        for (std::size_t i = 0; i < n; ++i) m[i * n + i] = 0;
    }
    Cost& at(std::size_t i, std::size_t j) { return m[i * n + j]; }
    /// u must precede v
    void precede(std::size_t u, std::size_t v) { at(v, u) = kForbidden; }
    void anchor() {
        for (std::size_t v = 1; v < n; ++v) precede(0, v);
        for (std::size_t u = 0; u + 1 < n; ++u) precede(u, n - 1);
    }
    Instance build(std::string name = "fixture") const { return Instance(std::move(name), n, m); }
};

/// Total order 0 -> 1 -> ... -> n-1 with unit costs.
inline Instance chain(std::size_t n) {
    MatrixBuilder b(n);
    for (std::size_t u = 0; u + 1 < n; ++u)
        for (std::size_t v = u + 1; v < n; ++v) b.precede(u, v);
    return b.build("chain");
}

/// Random instance: costs uniform in [min_cost, max_cost]; each pair of
/// interior nodes, taken in a hidden random order, is constrained with
/// probability `density`. Start/final conventions are encoded in the matrix.
inline Instance random_instance(std::size_t n, double density, Cost max_cost, std::uint64_t seed, Cost min_cost = 1) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<Cost> cost(min_cost, max_cost);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    MatrixBuilder b(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j) b.at(i, j) = cost(rng);
    std::vector<std::size_t> hidden(n > 2 ? n - 2 : 0);
    std::iota(hidden.begin(), hidden.end(), std::size_t{1});
    std::shuffle(hidden.begin(), hidden.end(), rng);
    for (std::size_t a = 0; a < hidden.size(); ++a)
        for (std::size_t c = a + 1; c < hidden.size(); ++c)
            if (coin(rng) < density) b.precede(hidden[a], hidden[c]);
    if (n > 1) b.anchor();
    return b.build("random-" + std::to_string(n) + "-" + std::to_string(seed));
}

/// Pairwise check straight from the matrix: position a before b is illegal
/// when cost(order[a], order[b]) is the sentinel.
inline bool naive_feasible(std::span<const Node> order, const Instance& inst) {
    const auto n = inst.size();
    if (order.size() != n || order.front() != 0 || order.back() != static_cast<Node>(n - 1)) return false;
    std::vector<Node> sorted(order.begin(), order.end());
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t k = 0; k < n; ++k)
        if (sorted[k] != static_cast<Node>(k)) return false;
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b)
            if (inst.cost(order[a], order[b]) == kForbidden) return false;
    return true;
}

inline Cost naive_cost(std::span<const Node> order, const Instance& inst) {
    Cost c = 0;
    for (std::size_t k = 0; k + 1 < order.size(); ++k) c += inst.cost(order[k], order[k + 1]);
    return c;
}

/// Optimum by enumerating every permutation of the interior nodes
/// (no pruning; keep n <= 10). Returns -1 when nothing is feasible.
inline Cost naive_optimum(const Instance& inst) {
    const auto n = inst.size();
    std::vector<Node> order(n);
    std::iota(order.begin(), order.end(), Node{0});
    Cost best = -1;
    do {
        if (!naive_feasible(order, inst)) continue;
        const auto c = naive_cost(order, inst);
        if (best < 0 || c < best) best = c;
    } while (std::next_permutation(order.begin() + 1, order.end() - 1));
    return best;
}

/// Successors of u by repeated breadth-first traversal over the sentinel
/// pairs plus the start/final conventions.
inline std::set<Node> bfs_successors(const Instance& inst, Node u) {
    const auto n = static_cast<Node>(inst.size());
    auto direct = [&](Node a, Node b) {
        if (a == b) return false;
        if (a == 0 || b == n - 1) return true;
        return inst.cost(b, a) == kForbidden;
    };
    std::set<Node> seen;
    std::vector<Node> queue{u};
    for (std::size_t k = 0; k < queue.size(); ++k) {
        for (Node v = 0; v < n; ++v) {
            if (direct(queue[k], v) && !seen.count(v)) {
                seen.insert(v);
                queue.push_back(v);
            }
        }
    }
    return seen;
}

/// Route after swapping blocks (h+1..i) and (i+1..j).
inline std::vector<Node> swapped(std::span<const Node> order, std::size_t h, std::size_t i, std::size_t j) {
    std::vector<Node> out(order.begin(), order.end());
    std::rotate(out.begin() + static_cast<std::ptrdiff_t>(h + 1), out.begin() + static_cast<std::ptrdiff_t>(i + 1),
                out.begin() + static_cast<std::ptrdiff_t>(j + 1));
    return out;
}

using Triple = std::tuple<std::size_t, std::size_t, std::size_t>;

/// Every feasible exchange (h, i, j) with 0 <= h < i < j <= n-2 whose left
/// block (forward) or right block (backward) is at most `limit` long
/// (0 = no limit), checked by applying the swap and testing pairwise.
inline std::set<Triple> naive_moves(const Route& route, const Instance& inst, std::size_t limit, bool forward) {
    std::set<Triple> out;
    const auto n = route.size();
    for (std::size_t h = 0; h + 3 <= n; ++h)
        for (std::size_t i = h + 1; i + 2 < n; ++i)
            for (std::size_t j = i + 1; j + 2 <= n; ++j) {
                const auto len = forward ? i - h : j - i;
                if (limit && len > limit) continue;
                if (naive_feasible(swapped(route.order(), h, i, j), inst)) out.emplace(h, i, j);
            }
    return out;
}

/// Generator that replays a fixed list of 64-bit outputs (cycling).
struct ScriptedRng {
    using result_type = std::uint64_t;
    std::vector<std::uint64_t> values;
    std::size_t next = 0;

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~result_type{0}; }
    result_type operator()() { return values[next++ % values.size()]; }

    /// Raw output that uniform01 maps exactly to `u` (u a multiple of 2^-53).
    static result_type for_uniform(double u) {
        return static_cast<result_type>(u * 0x1.0p53) << 11;
    }
};

}  // namespace sop::testing
