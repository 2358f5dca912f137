#pragma once

#include <algorithm>
#include <array>
#include <concepts>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "sop/annealing.hpp"
#include "sop/instance.hpp"
#include "sop/random.hpp"
#include "sop/route.hpp"

namespace sop {

/// Path-preserving 3-exchange in forward notation: the blocks at positions
/// (h+1..i) and (i+1..j) swap places. `delta` is the cost decrease.
struct ExchangeMove {
    std::size_t h, i, j;
    Cost delta;

    friend bool operator==(const ExchangeMove&, const ExchangeMove&) = default;
};

namespace detail {

inline Cost exchange_delta_unchecked(const Route& route, std::size_t h, std::size_t i, std::size_t j,
                                     const Instance& inst) noexcept {
    const auto a = route[h], a1 = route[h + 1];
    const auto b = route[i], b1 = route[i + 1];
    const auto c = route[j], c1 = route[j + 1];
    return inst.cost(a, a1) + inst.cost(b, b1) + inst.cost(c, c1) -
           (inst.cost(a, b1) + inst.cost(c, a1) + inst.cost(b, c1));
}

}  // namespace detail

/// Removed-minus-added arc cost of the exchange (h, i, j);
/// requires 0 <= h < i < j <= n-2.
inline Cost exchange_delta(const Route& route, std::size_t h, std::size_t i, std::size_t j, const Instance& inst) {
    if (!(h < i && i < j && j + 2 <= route.size())) throw std::out_of_range("exchange_delta: invalid positions");
    return detail::exchange_delta_unchecked(route, h, i, j, inst);
}

/// Swaps the two blocks of `move` in place and decrements the cached cost.
inline Route& apply_exchange(Route& route, const ExchangeMove& move) {
    route.rotate_block(move.h + 1, move.i + 1, move.j + 1, move.delta);
    return route;
}

/// Per-run scratch state of the local search.
class SearchContext {
public:
    void resize(std::size_t n) {
        if (mark_.size() == n) return;
        mark_.assign(n, 0);
        count_ = 0;
        in_stack_.assign(n, 0);
        dont_look_.assign(n, 0);
        stack_.clear();
    }

    /// Starts a new labeling epoch; marks from earlier epochs become stale.
    void new_epoch() {
        if (++count_ == 0) {
            std::fill(mark_.begin(), mark_.end(), 0u);
            count_ = 1;
        }
    }
    void label(Node v) noexcept { mark_[static_cast<std::size_t>(v)] = count_; }
    bool labeled(Node v) const noexcept { return mark_[static_cast<std::size_t>(v)] == count_; }

    void push(Node v) {
        if (in_stack_[static_cast<std::size_t>(v)]) return;
        in_stack_[static_cast<std::size_t>(v)] = 1;
        stack_.push_back(v);
    }
    Node pop() {
        const auto v = stack_.back();
        stack_.pop_back();
        in_stack_[static_cast<std::size_t>(v)] = 0;
        return v;
    }
    bool stack_empty() const noexcept { return stack_.empty(); }
    const std::vector<Node>& stack() const noexcept { return stack_; }
    void clear_stack() {
        for (auto v : stack_) in_stack_[static_cast<std::size_t>(v)] = 0;
        stack_.clear();
    }

    bool dont_look(Node v) const noexcept { return dont_look_[static_cast<std::size_t>(v)] != 0; }
    void set_dont_look(Node v, bool on) noexcept { dont_look_[static_cast<std::size_t>(v)] = on ? 1 : 0; }
    void clear_dont_look() { std::fill(dont_look_.begin(), dont_look_.end(), 0); }

private:
    std::vector<std::uint32_t> mark_;
    std::uint32_t count_ = 0;
    std::vector<Node> stack_;
    std::vector<char> in_stack_;
    std::vector<char> dont_look_;
};

enum class StackInit { all, out_of_order };

/// Initial don't-push stack contents, bottom to top. `all` takes every node;
/// `out_of_order` only nodes whose successor in `route` differs from their
/// successor in `best`. Popping yields nodes in route order.
inline std::vector<Node> init_dont_push_stack(const Route& route, const Route& best, StackInit mode) {
    std::vector<Node> out;
    for (std::size_t k = route.size(); k-- > 0;) {
        const auto u = route[k];
        if (mode == StackInit::all || route.successor(u) != best.successor(u)) out.push_back(u);
    }
    return out;
}

/// Anything that can judge a candidate decrease against the best one seen
/// during the current scan.
template <typename P>
concept MovePolicy = requires(P p, Cost d) {
    { p.accept(d, d) } -> std::convertible_to<bool>;
};

/// Plain SOP-3-exchange: strict improvement over the best move so far.
struct GreedyAcceptance {
    static constexpr bool may_worsen = false;
    bool accept(Cost delta, Cost best_delta) const noexcept { return delta > best_delta; }
};

/// SOP-3-exchange-SA acceptance. A better move is always taken, an equal
/// one with probability 0.1, a worse one by the Metropolis test against the
/// LS-level temperature (cooled after every such test). Before calibration
/// worse moves only feed the temperature sample.
template <std::uniform_random_bit_generator G>
class AnnealingAcceptance {
public:
    static constexpr bool may_worsen = true;
    static constexpr double kTieProbability = 0.1;

    AnnealingAcceptance(AnnealerState& state, G& rng) : state_(&state), rng_(&rng) {}

    bool accept(Cost delta, Cost best_delta) {
        const Cost diff = delta - best_delta;
        if (diff > 0) return true;
        if (diff == 0) return uniform01(*rng_) < kTieProbability;
        const double magnitude = static_cast<double>(-diff);
        if (!state_->calibrated) {
            calibration_push(*state_, magnitude);
            return false;
        }
        const bool ok = metropolis_accept(magnitude, state_->temperature, *rng_);
        cool(*state_);
        return ok;
    }

    void begin_invocation() { state_->reset(); }
    const AnnealerState& state() const noexcept { return *state_; }

private:
    AnnealerState* state_;
    G* rng_;
};

template <MovePolicy P>
bool accept_move(P& policy, Cost delta, Cost best_delta) {
    return policy.accept(delta, best_delta);
}

namespace detail {

template <typename P>
void observe(P& policy, const ExchangeMove& m) {
    if constexpr (requires { policy.observe(m); }) policy.observe(m);
}

template <typename P>
constexpr bool may_worsen() {
    if constexpr (requires { P::may_worsen; })
        return P::may_worsen;
    else
        return false;
}

// Scans for the move forward_search would apply, without applying it.
template <MovePolicy P>
std::optional<ExchangeMove> forward_scan(std::size_t h, const Route& route, const Instance& inst, SearchContext& ctx,
                                         P& policy, std::size_t or_limit) {
    const auto n = route.size();
    if (n < 4 || h + 3 > n) return std::nullopt;
    const auto last_i = or_limit ? std::min(h + or_limit, n - 3) : n - 3;
    ctx.new_epoch();
    for (auto i = h + 1; i <= last_i; ++i) {
        for (auto v : inst.successors_closure(route[i])) ctx.label(v);
        Cost best_delta = 0;
        std::optional<ExchangeMove> best;
        for (auto j = i + 1; j + 2 <= n && !ctx.labeled(route[j]); ++j) {
            const auto delta = exchange_delta_unchecked(route, h, i, j, inst);
            observe(policy, ExchangeMove{h, i, j, delta});
            if (policy.accept(delta, best_delta)) {
                best = ExchangeMove{h, i, j, delta};
                best_delta = delta;
            }
        }
        if (best) return best;
    }
    return std::nullopt;
}

template <MovePolicy P>
std::optional<ExchangeMove> backward_scan(std::size_t h, const Route& route, const Instance& inst, SearchContext& ctx,
                                          P& policy, std::size_t or_limit) {
    const auto n = route.size();
    if (n < 4 || h < 3 || h >= n) return std::nullopt;
    const auto first_i = or_limit ? std::max<std::size_t>(h > or_limit ? h - or_limit : 0, 2) : 2;
    ctx.new_epoch();
    for (auto i = h - 1; i >= first_i; --i) {
        for (auto v : inst.predecessors_closure(route[i])) ctx.label(v);
        Cost best_delta = 0;
        std::optional<ExchangeMove> best;
        for (auto j = i - 1; j >= 1 && !ctx.labeled(route[j]); --j) {
            const auto delta = exchange_delta_unchecked(route, j - 1, i - 1, h - 1, inst);
            observe(policy, ExchangeMove{j - 1, i - 1, h - 1, delta});
            if (policy.accept(delta, best_delta)) {
                best = ExchangeMove{j - 1, i - 1, h - 1, delta};
                best_delta = delta;
            }
        }
        if (best) return best;
    }
    return std::nullopt;
}

}  // namespace detail

/// Forward search from position h: the left block (h+1..i) grows by one
/// node per outer step, at most `or_limit` nodes (0 = unbounded); for each
/// left block the right block (i+1..j) grows until it would contain a node
/// that must follow the left block. Applies the accepted move of the first
/// i that yields one.
template <MovePolicy P>
std::optional<ExchangeMove> forward_search(std::size_t h, Route& route, const Instance& inst, SearchContext& ctx,
                                           P& policy, std::size_t or_limit = 3) {
    auto move = detail::forward_scan(h, route, inst, ctx, policy, or_limit);
    if (move) apply_exchange(route, *move);
    return move;
}

/// Mirror of forward_search: node h stays, the block (i..h-1) next to it
/// grows leftwards, and (j..i-1) is the block it jumps over. The returned
/// move is in forward notation (j-1, i-1, h-1).
template <MovePolicy P>
std::optional<ExchangeMove> backward_search(std::size_t h, Route& route, const Instance& inst, SearchContext& ctx,
                                            P& policy, std::size_t or_limit = 3) {
    auto move = detail::backward_scan(h, route, inst, ctx, policy, or_limit);
    if (move) apply_exchange(route, *move);
    return move;
}

struct LocalSearchOptions {
    StackInit stack = StackInit::all;
    std::size_t or_limit = 3;        // 0 searches left blocks of any length
    std::size_t moves_per_node = 50; // cap = moves_per_node * n, for policies that may worsen
};

/// SOP-3-exchange driver loop over the don't-push stack. Returns the
/// improved route; for policies that may worsen, the cheapest route seen
/// during the invocation.
template <MovePolicy P>
Route run_local_search(Route route, const Route& best, const Instance& inst, P& policy,
                       const LocalSearchOptions& opt, SearchContext& ctx) {
    const auto n = route.size();
    ctx.resize(n);
    ctx.clear_stack();
    ctx.clear_dont_look();
    for (auto v : init_dont_push_stack(route, best, opt.stack)) ctx.push(v);
    if constexpr (requires { policy.begin_invocation(); }) policy.begin_invocation();

    constexpr bool worsening = detail::may_worsen<P>();
    const auto cap = opt.moves_per_node * n;
    std::size_t applied = 0;
    std::optional<Route> best_seen;
    if constexpr (worsening) best_seen = route;

    while (!ctx.stack_empty()) {
        const auto u = ctx.pop();
        if (ctx.dont_look(u)) continue;
        const auto h = route.position(u);
        auto move = detail::forward_scan(h, route, inst, ctx, policy, opt.or_limit);
        if (!move) move = detail::backward_scan(h, route, inst, ctx, policy, opt.or_limit);
        if (!move) {
            ctx.set_dont_look(u, true);
            continue;
        }
        const std::array<Node, 6> pivots{route[move->h], route[move->h + 1], route[move->i],
                                         route[move->i + 1], route[move->j], route[move->j + 1]};
        apply_exchange(route, *move);
        for (auto v : pivots) {
            ctx.set_dont_look(v, false);
            ctx.push(v);
        }
        ++applied;
        if constexpr (worsening) {
            if (route.cost() < best_seen->cost()) best_seen = route;
            if (applied >= cap) break;
        }
    }
    if constexpr (worsening) return std::move(*best_seen);
    return route;
}

}  // namespace sop
