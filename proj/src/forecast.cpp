// Apache License, Version 2.0, refer to LICENSE.txt

#include "accrual/forecast.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <string>

#include "accrual/error.hpp"
#include "accrual/model.hpp"
#include "accrual/parallel.hpp"

namespace accrual {

namespace {

std::int64_t binomial(std::int64_t trials, double p, Rng& rng) {
    if (trials == 0 || p <= 0.0) return 0;
    if (p >= 1.0) return trials;
    std::binomial_distribution<std::int64_t> dist(trials, p);
    return dist(rng);
}

}  // namespace

void validate_horizons(std::span<const std::int64_t> horizons) {
    if (horizons.empty()) throw RequestError("at least one horizon is required");
    for (std::size_t i = 0; i < horizons.size(); ++i) {
        if (horizons[i] < 1) throw RequestError("horizons must be >= 1 day");
        if (i > 0 && horizons[i] <= horizons[i - 1])
            throw RequestError("horizons must be strictly increasing");
    }
}

std::int64_t resolve_n0(const PopulationSpec& population, const DailyCounts& data) {
    if (const auto* known = std::get_if<KnownN0>(&population.value())) return known->n0;
    const double lambda = std::get<PlugInMultiplier>(population.value()).lambda;
    const auto total = data.total_participants();
    if (total == 0)
        throw DataError("no participants in the first period; a plug-in multiplier has nothing to scale");
    return std::llround(lambda * static_cast<double>(total));
}

std::int64_t simulate_n00(const HyperParams& hp, std::int64_t n0, int d, std::int64_t d_star,
                          Rng& rng) {
    if (n0 < 0) throw DomainError("n0 must be >= 0");
    return binomial(n0, q0(hp, d, d_star), rng);
}

std::vector<std::int64_t> nested_thinning(std::int64_t n0, std::span<const double> log_q0_path,
                                          Rng& rng) {
    std::vector<std::int64_t> n00(log_q0_path.size());
    std::int64_t survivors = n0;
    double previous = 0.0;
    for (std::size_t j = 0; j < log_q0_path.size(); ++j) {
        const double keep = std::min(1.0, std::exp(log_q0_path[j] - previous));
        survivors = binomial(survivors, keep, rng);
        n00[j] = survivors;
        previous = log_q0_path[j];
    }
    return n00;
}

std::vector<std::int64_t> checkpoint_days(std::span<const std::int64_t> horizons) {
    validate_horizons(horizons);
    std::set<std::int64_t> days(horizons.begin(), horizons.end());
    for (std::int64_t day = kDaysPerWeek; day < horizons.back(); day += kDaysPerWeek) days.insert(day);
    return {days.begin(), days.end()};
}

std::vector<std::int64_t> weekly_new_participants(std::int64_t n0,
                                                  std::span<const std::int64_t> checkpoints,
                                                  std::span<const std::int64_t> n00) {
    if (checkpoints.size() != n00.size() || checkpoints.empty())
        throw DomainError("checkpoints and n00 must be non-empty and the same length");
    auto at = [&](std::int64_t day) {
        if (day == 0) return n0;
        const auto it = std::lower_bound(checkpoints.begin(), checkpoints.end(), day);
        if (it == checkpoints.end() || *it != day)
            throw DomainError("no n00 value for day " + std::to_string(day));
        return n00[static_cast<std::size_t>(it - checkpoints.begin())];
    };
    const std::int64_t last = checkpoints.back();
    std::vector<std::int64_t> weeks;
    for (std::int64_t start = 0; start < last; start += kDaysPerWeek)
        weeks.push_back(at(start) - at(std::min(start + kDaysPerWeek, last)));
    return weeks;
}

double sorted_quantile(std::span<const double> sorted, double p) {
    if (sorted.empty()) throw DomainError("quantile of an empty sample");
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("quantile level must lie in [0, 1]");
    const double h = p * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

SampleSummary summarize(std::span<const std::int64_t> samples) {
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    SampleSummary out;
    for (std::size_t i = 0; i < kQuantileLevels.size(); ++i)
        out.quantiles[i] = sorted_quantile(sorted, kQuantileLevels[i]);
    double sum = 0.0;
    for (double v : sorted) sum += v;
    out.mean = sum / static_cast<double>(sorted.size());
    out.point_estimate = sorted_quantile(sorted, 0.5);
    return out;
}

ForecastDistribution forecast_from_draws(const PosteriorDraws& posterior, std::int64_t n0, int d,
                                         std::span<const std::int64_t> horizons,
                                         std::uint64_t seed, int workers) {
    if (n0 < 0) throw DomainError("n0 must be >= 0");
    if (posterior.draws.empty()) throw DomainError("no posterior draws");
    const auto checkpoints = checkpoint_days(horizons);
    const std::size_t n_draws = posterior.draws.size();

    std::vector<std::vector<std::int64_t>> paths(n_draws);
    std::vector<std::vector<std::int64_t>> curves(n_draws);
    parallel_for(n_draws, workers, [&](std::size_t k) {
        const auto& hp = posterior.draws[k];
        std::vector<double> log_q(checkpoints.size());
        for (std::size_t j = 0; j < checkpoints.size(); ++j) log_q[j] = log_q0(hp, d, checkpoints[j]);
        Rng rng(derive_seed(seed, {kForecastStream, k}));
        paths[k] = nested_thinning(n0, log_q, rng);
        curves[k] = weekly_new_participants(n0, checkpoints, paths[k]);
    });

    ForecastDistribution out;
    out.resolved_n0 = n0;
    for (const auto h : horizons) {
        const auto j = static_cast<std::size_t>(
            std::lower_bound(checkpoints.begin(), checkpoints.end(), h) - checkpoints.begin());
        HorizonForecast hf;
        hf.horizon_days = h;
        hf.new_participants.reserve(n_draws);
        for (const auto& path : paths) hf.new_participants.push_back(n0 - path[j]);
        hf.summary = summarize(hf.new_participants);
        out.horizons.push_back(std::move(hf));
    }

    const std::size_t n_weeks = curves.front().size();
    const std::int64_t last = checkpoints.back();
    std::vector<std::int64_t> column(n_draws);
    for (std::size_t w = 0; w < n_weeks; ++w) {
        for (std::size_t k = 0; k < n_draws; ++k) column[k] = curves[k][w];
        WeekForecast wf;
        wf.week = static_cast<int>(w) + 2;
        wf.first_day = static_cast<std::int64_t>(w) * kDaysPerWeek + 1;
        wf.last_day = std::min<std::int64_t>(static_cast<std::int64_t>(w + 1) * kDaysPerWeek, last);
        wf.summary = summarize(column);
        out.weeks.push_back(wf);
    }
    out.weekly_curve_samples = std::move(curves);
    out.posterior = posterior;
    return out;
}

ForecastDistribution forecast(const ForecastRequest& req) {
    validate_horizons(req.horizons);
    req.sampler.validate();
    const auto n0 = resolve_n0(req.population, req.data);
    auto posterior = sample_hyper_posterior(req.data, n0, req.sampler);
    return forecast_from_draws(posterior, n0, req.data.days(), req.horizons, req.sampler.seed,
                               req.sampler.workers);
}

}  // namespace accrual
