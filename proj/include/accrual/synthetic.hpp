// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "accrual/rng.hpp"
#include "accrual/types.hpp"

namespace accrual {

struct PopulationGroup {
    double pi = 1.0;
    std::int64_t count = 0;
};

/// Population made of groups sharing a daily participation probability.
class DiscretePopulation {
public:
    /// Throws DomainError on pi outside (0, 1], duplicate pi or negative count.
    explicit DiscretePopulation(std::vector<PopulationGroup> groups);

    /// The hundred groups pi = 0.01, 0.02, ..., 1.00, each of `per_group` people.
    static DiscretePopulation percent_grid(std::int64_t per_group);
    /// Same grid with explicit group sizes (counts[k] for pi = (k+1)/100).
    static DiscretePopulation percent_grid(std::span<const std::int64_t> counts);

    const std::vector<PopulationGroup>& groups() const noexcept { return groups_; }
    std::int64_t size() const noexcept;

private:
    std::vector<PopulationGroup> groups_;
};

struct SimulatedExperiment {
    DailyCounts first_period;
    std::int64_t n0_true = 0;
    /// New participants on days d+1 .. total_days.
    std::vector<std::int64_t> future_daily;
    std::uint64_t seed = 0;
};

inline constexpr std::int64_t kNeverParticipates = std::numeric_limits<std::int64_t>::max();

/// Expected number out of N with probability pi whose first participation is
/// on day k: (1 - pi)^(k - 1) pi N.
double expected_first_participation(double pi, std::int64_t n, int k);

/// First participation day for probability pi, by inverse CDF. Returns
/// kNeverParticipates for pi = 0.
std::int64_t sample_first_day(double pi, Rng& rng);

/// New participants on each of days 1..total_days.
std::vector<std::int64_t> simulate_discrete(const DiscretePopulation& pop, int total_days,
                                            std::uint64_t seed);

/// Draws n individuals with pi ~ Beta(alpha, beta) and geometric first days.
/// Days 1..first_period_d form the observed period; later days up to
/// total_days are the realized future.
SimulatedExperiment simulate_beta_geometric(std::int64_t n, const HyperParams& hp,
                                            int first_period_d, int total_days, std::uint64_t seed);

/// Sums of consecutive 7-day blocks of `daily` (the last block may be short).
std::vector<std::int64_t> weekly_totals(std::span<const std::int64_t> daily);

}  // namespace accrual
