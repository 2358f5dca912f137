#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "sop/annealing.hpp"
#include "support/fixtures.hpp"

using namespace sop;

namespace {

// Two-point sample with the requested mean and sample standard deviation.
std::vector<double> sample_with(double mean, double sd, std::size_t half) {
    // for 2k values at mean +- a, the sample sd is a * sqrt(2k / (2k - 1))
    const double k2 = 2.0 * static_cast<double>(half);
    const double a = sd * std::sqrt((k2 - 1.0) / k2);
    std::vector<double> out;
    for (std::size_t k = 0; k < half; ++k) {
        out.push_back(mean - a);
        out.push_back(mean + a);
    }
    return out;
}

}  // namespace

TEST(InitialTemperature, FormulaSpotCheck) {
    const auto deltas = sample_with(100.0, 10.0, 50);
    const auto t = initial_temperature(deltas, 0.1);
    EXPECT_FALSE(t.degenerate);
    const double expect = 130.0 / std::log(10.0);
    EXPECT_NEAR(t.value, expect, 1e-9 * expect);
    EXPECT_NEAR(t.value, 56.46, 0.01);
}

TEST(InitialTemperature, ConstantSample) {
    const std::vector<double> deltas(40, 50.0);
    const auto t = initial_temperature(deltas, 1.0 / std::exp(1.0));
    EXPECT_NEAR(t.value, 50.0, 1e-12);
}

TEST(InitialTemperature, DegenerateSample) {
    const std::vector<double> zeros(10, 0.0);
    const auto t = initial_temperature(zeros, 0.5);
    EXPECT_TRUE(t.degenerate);
    EXPECT_GT(t.value, 0.0);
    EXPECT_EQ(t.value, std::numeric_limits<double>::min());
}

TEST(InitialTemperature, InvalidInput) {
    const std::vector<double> one{1.0};
    EXPECT_THROW(initial_temperature(std::span<const double>{}, 0.1), std::invalid_argument);
    EXPECT_THROW(initial_temperature(one, 1.0), std::invalid_argument);
    EXPECT_THROW(initial_temperature(one, 0.0), std::invalid_argument);
}

TEST(InitialTemperature, ScaleCovariant) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> d(0.0, 500.0);
    std::vector<double> deltas(300);
    for (auto& x : deltas) x = d(rng);
    const auto base = initial_temperature(deltas, 0.1).value;
    // power-of-two scaling is exact in binary floating point
    for (double c : {0.25, 2.0, 1024.0}) {
        auto scaled = deltas;
        for (auto& x : scaled) x *= c;
        EXPECT_EQ(initial_temperature(scaled, 0.1).value, c * base);
    }
    for (double c : {3.0, 0.7}) {
        auto scaled = deltas;
        for (auto& x : scaled) x *= c;
        EXPECT_NEAR(initial_temperature(scaled, 0.1).value, c * base, 1e-12 * c * base);
    }
}

TEST(Metropolis, Boundaries) {
    sop::testing::ScriptedRng rng{{0}};
    EXPECT_TRUE(metropolis_accept(0.0, 5.0, rng));
    EXPECT_TRUE(metropolis_accept(0.0, 0.0, rng));
    EXPECT_FALSE(metropolis_accept(1.0, 0.0, rng));
    EXPECT_FALSE(metropolis_accept(1e6, 1e-6, rng));
    EXPECT_EQ(rng.next, 0u);
}

TEST(Metropolis, FrequencyAtDeltaEqualsT) {
    Rng rng(42);
    constexpr int kTrials = 100000;
    int hits = 0;
    for (int k = 0; k < kTrials; ++k) hits += metropolis_accept(7.5, 7.5, rng);
    const double p = std::exp(-1.0);
    EXPECT_NEAR(hits, kTrials * p, 3 * std::sqrt(kTrials * p * (1 - p)));
}

TEST(Metropolis, NegligibleProbabilityNeverAccepts) {
    Rng rng(1);
    int hits = 0;
    for (int k = 0; k < 100000; ++k) hits += metropolis_accept(100.0, 1.0, rng);
    EXPECT_EQ(hits, 0);
}

TEST(Cooling, Steps) {
    AnnealerState s(0.999, 0.1);
    EXPECT_THROW(cool(s), std::logic_error);
    s.force_initial_temperature(100.0);
    cool(s);
    EXPECT_NEAR(s.temperature, 99.9, 1e-12);

    AnnealerState long_run(0.9999, 0.1);
    long_run.force_initial_temperature(1.0);
    double prev = long_run.temperature;
    for (int k = 0; k < 100000; ++k) {
        cool(long_run);
        ASSERT_LE(long_run.temperature, prev);
        prev = long_run.temperature;
    }
    EXPECT_NEAR(long_run.temperature, 4.54e-5, 0.01e-5);
    EXPECT_NEAR(long_run.temperature, std::pow(0.9999, 100000), 1e-9 * long_run.temperature);
}

TEST(Calibration, ThresholdSemantics) {
    AnnealerState s(0.99, 0.1, 100000);
    for (int k = 0; k < 99999; ++k) ASSERT_FALSE(calibration_push(s, -(k % 7) - 1.0));
    EXPECT_FALSE(s.calibrated);
    EXPECT_TRUE(calibration_push(s, 3.0));
    EXPECT_TRUE(s.calibrated);
    EXPECT_GT(s.t0, 0.0);
    EXPECT_EQ(s.temperature, s.t0);
    EXPECT_TRUE(s.sample.empty());
}

TEST(Calibration, UsesAbsoluteValues) {
    AnnealerState neg(0.99, 0.1, 4), pos(0.99, 0.1, 4);
    for (double d : {-1.0, -2.0, -3.0, -4.0}) calibration_push(neg, d);
    for (double d : {1.0, 2.0, 3.0, 4.0}) calibration_push(pos, d);
    EXPECT_EQ(neg.t0, pos.t0);
}

TEST(Calibration, ResetRestoresT0) {
    AnnealerState s(0.5, 0.1);
    s.force_initial_temperature(8.0);
    cool(s);
    cool(s);
    EXPECT_EQ(s.temperature, 2.0);
    s.reset();
    EXPECT_EQ(s.temperature, 8.0);
}

TEST(ActiveSelection, CheaperCandidateWins) {
    Rng rng(1);
    const std::vector<Cost> costs{120, 90, 95};
    const auto sel = select_active_index(100, costs, 0.0, rng);
    EXPECT_EQ(sel.index, 1u);
    EXPECT_EQ(sel.worse_accepted, 0u);
}

TEST(ActiveSelection, EqualCostIsAccepted) {
    sop::testing::ScriptedRng rng{{0}};
    const std::vector<Cost> costs{100};
    EXPECT_EQ(select_active_index(100, costs, 0.0, rng).index, 0u);
    EXPECT_EQ(rng.next, 0u);
}

TEST(ActiveSelection, ColdLimitKeepsTheMinimum) {
    Rng rng(7);
    std::uniform_int_distribution<Cost> c(50, 150);
    const double cold = 100.0 * 1e-9 * 0.5;
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<Cost> costs(10);
        for (auto& x : costs) x = c(rng);
        const Cost active = c(rng);
        const auto sel = select_active_index(active, costs, cold, rng);
        const Cost lowest = std::min(active, *std::min_element(costs.begin(), costs.end()));
        const Cost chosen = sel.index == ActiveSelection::npos ? active : costs[sel.index];
        ASSERT_EQ(chosen, lowest);
        ASSERT_EQ(sel.worse_accepted, 0u);
    }
}

TEST(ActiveSelection, HotTemperatureAcceptsWorse) {
    Rng rng(2);
    const std::vector<Cost> costs{101, 102, 103};
    const auto sel = select_active_index(100, costs, 1e9, rng);
    EXPECT_EQ(sel.index, 2u);
    EXPECT_EQ(sel.worse_accepted, 3u);
}

TEST(ActiveSelection, RouteOverload) {
    const auto inst = sop::testing::t4();
    const Route r({0, 1, 2, 3}, inst);
    AnnealerState s(0.9, 0.1);
    s.force_initial_temperature(1.0);
    Rng rng(1);
    const std::vector<Route> candidates{r};
    EXPECT_EQ(select_active_solution(r, candidates, s, rng), r);
}
