#pragma once

#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "sop/random.hpp"
#include "sop/route.hpp"

namespace sop {

struct InitialTemperature {
    double value;
    bool degenerate;  // every sampled difference was zero
};

/// T0 = (mean + 3 * sample std) / ln(1 / gamma).
inline InitialTemperature initial_temperature(std::span<const double> deltas, double gamma) {
    if (deltas.empty()) throw std::invalid_argument("initial_temperature: empty sample");
    if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("initial_temperature: gamma must lie in (0, 1)");
    const auto n = static_cast<double>(deltas.size());
    const double mean = std::accumulate(deltas.begin(), deltas.end(), 0.0) / n;
    double ss = 0.0;
    for (auto d : deltas) ss += (d - mean) * (d - mean);
    const double sd = deltas.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    const double t0 = (mean + 3.0 * sd) / std::log(1.0 / gamma);
    if (!(t0 > 0.0)) return {std::numeric_limits<double>::min(), true};
    return {t0, false};
}

/// Metropolis test for a worsening of magnitude `delta` (>= 0). Consumes
/// one draw only when the probability lies strictly between 0 and 1.
template <std::uniform_random_bit_generator G>
bool metropolis_accept(double delta, double temperature, G& rng) {
    if (delta <= 0.0) return true;
    if (!(temperature > 0.0)) return false;
    const double p = std::exp(-delta / temperature);
    if (p <= 0.0) return false;
    return uniform01(rng) < p;
}

/// Temperature state for one SA component (colony- or LS-level).
struct AnnealerState {
    double temperature = 0.0;
    double t0 = 0.0;
    double lambda = 0.9999;
    double gamma = 0.1;
    bool calibrated = false;
    bool degenerate = false;
    std::size_t sample_target = 100000;
    std::vector<double> sample;

    AnnealerState() = default;
    AnnealerState(double lambda_, double gamma_, std::size_t sample_target_ = 100000)
        : lambda(lambda_), gamma(gamma_), sample_target(sample_target_) {}

    /// Calibrates directly from a full sample of cost differences.
    void calibrate(std::span<const double> deltas) {
        const auto t = initial_temperature(deltas, gamma);
        force_initial_temperature(t.value);
        degenerate = t.degenerate;
    }

    /// Skips calibration; T0 may be 0 to switch the Metropolis test off.
    void force_initial_temperature(double value) {
        t0 = value;
        temperature = value;
        calibrated = true;
        sample.clear();
        sample.shrink_to_fit();
    }

    /// Restores T to T0 without recomputation.
    void reset() {
        if (calibrated) temperature = t0;
    }
};

/// T <- lambda * T.
inline void cool(AnnealerState& state) {
    if (!state.calibrated) throw std::logic_error("cool: annealer is not calibrated");
    state.temperature *= state.lambda;
}

/// Adds |delta| to the calibration sample; once `sample_target` values are
/// collected computes T0 and marks the state calibrated. Returns the flag.
inline bool calibration_push(AnnealerState& state, double delta) {
    if (state.calibrated) return true;
    state.sample.push_back(std::abs(delta));
    if (state.sample.size() >= state.sample_target) {
        const auto values = std::move(state.sample);
        state.calibrate(values);
    }
    return state.calibrated;
}

struct ActiveSelection {
    std::size_t index;             // winning candidate, or npos if `active` was kept
    std::size_t worse_accepted;    // strictly worse candidates taken via Metropolis
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
};

/// Scans `candidates` in order; a cheaper candidate always replaces the
/// active cost, a worse one with probability exp(-(C(cand) - C(active)) / T).
/// Works on costs so callers can keep the routes where they are.
template <std::uniform_random_bit_generator G>
ActiveSelection select_active_index(Cost active_cost, std::span<const Cost> candidates, double temperature, G& rng) {
    ActiveSelection sel{ActiveSelection::npos, 0};
    for (std::size_t k = 0; k < candidates.size(); ++k) {
        const auto c = candidates[k];
        if (c < active_cost) {
            sel.index = k;
            active_cost = c;
        } else if (metropolis_accept(static_cast<double>(c - active_cost), temperature, rng)) {
            if (c > active_cost) ++sel.worse_accepted;
            sel.index = k;
            active_cost = c;
        }
    }
    return sel;
}

template <std::uniform_random_bit_generator G>
Route select_active_solution(const Route& active, std::span<const Route> candidates, const AnnealerState& state,
                             G& rng) {
    std::vector<Cost> costs;
    costs.reserve(candidates.size());
    for (const auto& r : candidates) costs.push_back(r.cost());
    const auto sel = select_active_index(active.cost(), costs, state.temperature, rng);
    return sel.index == ActiveSelection::npos ? active : candidates[sel.index];
}

}  // namespace sop
