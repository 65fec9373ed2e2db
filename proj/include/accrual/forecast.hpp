// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "accrual/rng.hpp"
#include "accrual/sampler.hpp"
#include "accrual/types.hpp"

namespace accrual {

inline constexpr int kDaysPerWeek = 7;
inline constexpr std::array<double, 5> kQuantileLevels{0.025, 0.25, 0.5, 0.75, 0.975};

struct ForecastRequest {
    DailyCounts data;
    PopulationSpec population;
    /// Days beyond the first period, strictly increasing, each >= 1.
    std::vector<std::int64_t> horizons;
    SamplerConfig sampler;
};

/// Empirical summary of a set of Monte-Carlo samples.
struct SampleSummary {
    /// At kQuantileLevels, linear interpolation between order statistics.
    std::array<double, kQuantileLevels.size()> quantiles{};
    double mean = 0.0;
    /// The median.
    double point_estimate = 0.0;
};

struct HorizonForecast {
    std::int64_t horizon_days = 0;
    /// resolved_n0 - n00 for each posterior draw.
    std::vector<std::int64_t> new_participants;
    SampleSummary summary;
};

/// New participants within one week after the first period. Week 2 is the
/// first week after a 7-day first period.
struct WeekForecast {
    int week = 0;
    /// Days after the first period covered by this week, inclusive.
    std::int64_t first_day = 0;
    std::int64_t last_day = 0;
    SampleSummary summary;
};

struct ForecastDistribution {
    std::int64_t resolved_n0 = 0;
    std::vector<HorizonForecast> horizons;
    std::vector<WeekForecast> weeks;
    /// weekly_curve_samples[k][w]: draw k, week index w (weeks[w]).
    std::vector<std::vector<std::int64_t>> weekly_curve_samples;
    PosteriorDraws posterior;
};

/// n0 to use: the known count, or round(lambda * total participants) with
/// ties away from zero. Throws DataError for a multiplier with no participants.
std::int64_t resolve_n0(const PopulationSpec& population, const DailyCounts& data);

/// One draw of n00 ~ Binomial(n0, q0(hp, d, d_star)).
std::int64_t simulate_n00(const HyperParams& hp, std::int64_t n0, int d, std::int64_t d_star, Rng& rng);

/// Sequential binomial thinning: given q0 at increasing horizons, returns n00
/// at each horizon. Survivors at one horizon are thinned to the next with
/// probability q0(next) / q0(current), so each entry is marginally
/// Binomial(n0, q0) and the path is non-increasing.
std::vector<std::int64_t> nested_thinning(std::int64_t n0, std::span<const double> log_q0_path, Rng& rng);

/// Horizons at which n00 must be simulated: the requested horizons plus every
/// week boundary before the last one, ascending and unique.
std::vector<std::int64_t> checkpoint_days(std::span<const std::int64_t> horizons);

/// Per-week new participants from n00 at each checkpoint day (n00(0) = n0).
/// Entry w is n00(7 w) - n00(min(7 (w + 1), last checkpoint)).
std::vector<std::int64_t> weekly_new_participants(std::int64_t n0,
                                                  std::span<const std::int64_t> checkpoints,
                                                  std::span<const std::int64_t> n00);

/// Type-7 quantile of ascending-sorted data.
double sorted_quantile(std::span<const double> sorted, double p);

SampleSummary summarize(std::span<const std::int64_t> samples);

/// The predictive step alone: for each posterior draw, simulate the n00 path
/// over the checkpoint days and assemble horizon and weekly forecasts.
/// Draw k uses an RNG stream derived from (seed, k), so results do not depend
/// on `workers`.
ForecastDistribution forecast_from_draws(const PosteriorDraws& posterior, std::int64_t n0, int d,
                                         std::span<const std::int64_t> horizons, std::uint64_t seed,
                                         int workers = 1);

/// Full two-step scheme: sample the hyper-posterior, then simulate n00.
ForecastDistribution forecast(const ForecastRequest& req);

/// Throws RequestError unless horizons are non-empty, >= 1 and strictly increasing.
void validate_horizons(std::span<const std::int64_t> horizons);

}  // namespace accrual
