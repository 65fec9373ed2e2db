// Apache License, Version 2.0, refer to LICENSE.txt

#include "accrual/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <string>

#include "accrual/error.hpp"

namespace accrual {

namespace {

void check_pi(double pi) {
    if (!(pi > 0.0 && pi <= 1.0))
        throw DomainError("pi must lie in (0, 1], got " + std::to_string(pi));
}

// pi ~ Beta(a, b) as a ratio of gamma variates.
double sample_beta(double a, double b, Rng& rng) {
    std::gamma_distribution<double> ga(a, 1.0), gb(b, 1.0);
    const double x = ga(rng);
    const double y = gb(rng);
    if (x + y == 0.0) return a >= b ? 1.0 : 0.0;
    return x / (x + y);
}

}  // namespace

DiscretePopulation::DiscretePopulation(std::vector<PopulationGroup> groups)
    : groups_(std::move(groups)) {
    std::set<double> seen;
    for (const auto& g : groups_) {
        check_pi(g.pi);
        if (g.count < 0) throw DomainError("group size must be >= 0");
        if (!seen.insert(g.pi).second)
            throw DomainError("duplicate group probability " + std::to_string(g.pi));
    }
}

DiscretePopulation DiscretePopulation::percent_grid(std::int64_t per_group) {
    std::vector<std::int64_t> counts(100, per_group);
    return percent_grid(counts);
}

DiscretePopulation DiscretePopulation::percent_grid(std::span<const std::int64_t> counts) {
    if (counts.size() != 100) throw DomainError("percent grid needs exactly 100 group sizes");
    std::vector<PopulationGroup> groups;
    for (std::size_t k = 0; k < counts.size(); ++k)
        groups.push_back({static_cast<double>(k + 1) / 100.0, counts[k]});
    return DiscretePopulation(std::move(groups));
}

std::int64_t DiscretePopulation::size() const noexcept {
    std::int64_t total = 0;
    for (const auto& g : groups_) total += g.count;
    return total;
}

double expected_first_participation(double pi, std::int64_t n, int k) {
    check_pi(pi);
    if (n < 0) throw DomainError("N must be >= 0");
    if (k < 1) throw DomainError("day k must be >= 1");
    return std::pow(1.0 - pi, k - 1) * pi * static_cast<double>(n);
}

std::int64_t sample_first_day(double pi, Rng& rng) {
    if (pi >= 1.0) return 1;
    if (!(pi > 0.0)) return kNeverParticipates;
    const double days = std::ceil(std::log(uniform_open(rng)) / std::log1p(-pi));
    if (!(days < 9e18)) return kNeverParticipates;
    return std::max<std::int64_t>(1, static_cast<std::int64_t>(days));
}

std::vector<std::int64_t> simulate_discrete(const DiscretePopulation& pop, int total_days,
                                            std::uint64_t seed) {
    if (total_days < 1) throw DomainError("total_days must be >= 1");
    Rng rng(derive_seed(seed, {kSimulationStream, 0}));
    std::vector<std::int64_t> counts(static_cast<std::size_t>(total_days), 0);
    for (const auto& g : pop.groups()) {
        for (std::int64_t i = 0; i < g.count; ++i) {
            const auto day = sample_first_day(g.pi, rng);
            if (day <= total_days) ++counts[static_cast<std::size_t>(day - 1)];
        }
    }
    return counts;
}

SimulatedExperiment simulate_beta_geometric(std::int64_t n, const HyperParams& hp,
                                            int first_period_d, int total_days,
                                            std::uint64_t seed) {
    if (n < 1) throw DomainError("population size must be >= 1");
    if (first_period_d < 1) throw DomainError("first period must be >= 1 day");
    if (total_days < first_period_d) throw DomainError("total_days must be >= first_period_d");

    Rng rng(derive_seed(seed, {kSimulationStream, 1}));
    std::vector<std::int64_t> first(static_cast<std::size_t>(first_period_d), 0);
    std::vector<std::int64_t> future(static_cast<std::size_t>(total_days - first_period_d), 0);
    std::int64_t participants = 0;
    for (std::int64_t i = 0; i < n; ++i) {
        const double pi = sample_beta(hp.alpha(), hp.beta(), rng);
        const auto day = sample_first_day(pi, rng);
        if (day <= first_period_d) {
            ++first[static_cast<std::size_t>(day - 1)];
            ++participants;
        } else if (day <= total_days) {
            ++future[static_cast<std::size_t>(day - first_period_d - 1)];
        }
    }
    return {DailyCounts(std::move(first)), n - participants, std::move(future), seed};
}

std::vector<std::int64_t> weekly_totals(std::span<const std::int64_t> daily) {
    std::vector<std::int64_t> weeks((daily.size() + 6) / 7, 0);
    for (std::size_t i = 0; i < daily.size(); ++i) weeks[i / 7] += daily[i];
    return weeks;
}

}  // namespace accrual
