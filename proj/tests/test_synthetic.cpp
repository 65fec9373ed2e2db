// Apache License, Version 2.0, refer to LICENSE.txt

#include <doctest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "accrual/error.hpp"
#include "accrual/model.hpp"
#include "accrual/synthetic.hpp"

using namespace accrual;

TEST_CASE("expected first participation") {
    CHECK(expected_first_participation(1.0, 10, 2) == 0.0);
    CHECK(expected_first_participation(1.0, 10, 1) == 10.0);
    // 0.25 * 0.5 * 8
    CHECK(expected_first_participation(0.5, 8, 3) == doctest::Approx(1.0));
    CHECK_THROWS_AS(expected_first_participation(0.0, 8, 3), DomainError);
    CHECK_THROWS_AS(expected_first_participation(0.5, 8, 0), DomainError);
}

TEST_CASE("discrete population validation") {
    CHECK_THROWS_AS(DiscretePopulation({{0.5, 1}, {0.5, 2}}), DomainError);
    CHECK_THROWS_AS(DiscretePopulation({{1.5, 1}}), DomainError);
    CHECK_THROWS_AS(DiscretePopulation({{0.5, -1}}), DomainError);
    const auto grid = DiscretePopulation::percent_grid(3);
    CHECK(grid.groups().size() == 100);
    CHECK(grid.size() == 300);
    CHECK(grid.groups().front().pi == doctest::Approx(0.01));
    CHECK(grid.groups().back().pi == 1.0);
}

TEST_CASE("simulate discrete populations") {
    CHECK(simulate_discrete(DiscretePopulation({{1.0, 5}}), 3, 1) == std::vector<std::int64_t>{5, 0, 0});
    CHECK(simulate_discrete(DiscretePopulation({}), 4, 1) == std::vector<std::int64_t>(4, 0));
    const DiscretePopulation pop({{0.3, 100}});
    CHECK(simulate_discrete(pop, 5, 9) == simulate_discrete(pop, 5, 9));
}

TEST_CASE("discrete simulation matches expected daily counts") {
    const DiscretePopulation pop({{0.3, 100}});
    const int reps = 10000, days = 6;
    std::vector<double> mean(days, 0.0);
    for (int r = 0; r < reps; ++r) {
        const auto c = simulate_discrete(pop, days, static_cast<std::uint64_t>(r));
        for (int k = 0; k < days; ++k) mean[static_cast<std::size_t>(k)] += static_cast<double>(c[static_cast<std::size_t>(k)]);
    }
    for (int k = 1; k <= days; ++k) {
        const double expected = expected_first_participation(0.3, 100, k);
        const double p = expected / 100.0;
        const double se = std::sqrt(100 * p * (1 - p) / reps);
        CHECK(std::abs(mean[static_cast<std::size_t>(k - 1)] / reps - expected) < 3 * se);
    }
}

TEST_CASE("single-group day-1 frequency") {
    const auto c = simulate_discrete(DiscretePopulation({{0.2, 200000}}), 1, 3);
    const double se = std::sqrt(0.2 * 0.8 / 200000);
    CHECK(std::abs(static_cast<double>(c[0]) / 200000 - 0.2) < 3 * se);
}

TEST_CASE("beta-geometric simulation basics") {
    const auto sim = simulate_beta_geometric(100, {1e6, 1.0}, 7, 7, 4);
    CHECK(sim.first_period.on_day(1) >= 99);
    CHECK(sim.future_daily.empty());
    CHECK(sim.first_period.total_participants() + sim.n0_true == 100);

    const auto a = simulate_beta_geometric(5000, {2, 50}, 7, 35, 8);
    const auto b = simulate_beta_geometric(5000, {2, 50}, 7, 35, 8);
    CHECK(a.first_period == b.first_period);
    CHECK(a.future_daily == b.future_daily);
    CHECK(a.future_daily.size() == 28);
    const auto future = std::accumulate(a.future_daily.begin(), a.future_daily.end(), std::int64_t{0});
    CHECK(future <= a.n0_true);
    CHECK_THROWS_AS(simulate_beta_geometric(10, {1, 1}, 7, 6, 1), DomainError);
}

TEST_CASE("uniform population censoring") {
    const std::int64_t n = 100000;
    const auto sim = simulate_beta_geometric(n, {1, 1}, 7, 7, 21);
    CHECK(sim.first_period.total_participants() + sim.n0_true == n);
    const double p = 1.0 / 8.0;
    CHECK(std::abs(static_cast<double>(sim.n0_true) - n * p) < 3 * std::sqrt(n * p * (1 - p)));
}

TEST_CASE("realized q0 converges to the analytic value") {
    const HyperParams hp(2, 50);
    const std::int64_t n = 1000000;
    const auto sim = simulate_beta_geometric(n, hp, 7, 14, 33);
    const auto later = std::accumulate(sim.future_daily.begin(), sim.future_daily.end(), std::int64_t{0});
    const double n0 = static_cast<double>(sim.n0_true);
    const double realized = (n0 - static_cast<double>(later)) / n0;
    const double q = q0(hp, 7, 7);
    CHECK(std::abs(realized - q) < 3 * std::sqrt(q * (1 - q) / n0));
}

TEST_CASE("weekly totals") {
    const std::vector<std::int64_t> d{1, 1, 1, 1, 1, 1, 1, 2, 2};
    CHECK(weekly_totals(d) == std::vector<std::int64_t>{7, 4});
    CHECK(weekly_totals(std::vector<std::int64_t>{}).empty());
}
