// Apache License, Version 2.0, refer to LICENSE.txt

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "accrual/error.hpp"
#include "accrual/forecast.hpp"
#include "accrual/model.hpp"

using namespace accrual;

namespace {

const DailyCounts kData({29, 34, 20, 24, 30, 25, 17});

PosteriorDraws single_draw(const HyperParams& hp) {
    PosteriorDraws p;
    p.draws = {hp};
    p.acceptance_rate = 1.0;
    p.mode = hp;
    return p;
}

}  // namespace

TEST_CASE("resolve n0") {
    std::vector<std::int64_t> counts(7, 0);
    counts[0] = 123;
    CHECK(resolve_n0(PopulationSpec::plug_in(10), DailyCounts(counts)) == 1230);
    CHECK(resolve_n0(PopulationSpec::known(5000), DailyCounts(counts)) == 5000);
    counts[0] = 10;
    CHECK(resolve_n0(PopulationSpec::plug_in(2.5), DailyCounts(counts)) == 25);
    counts[0] = 1;
    CHECK(resolve_n0(PopulationSpec::plug_in(2.5), DailyCounts(counts)) == 3);
    CHECK(resolve_n0(PopulationSpec::known(0), DailyCounts({0, 0})) == 0);
    CHECK_THROWS_AS(resolve_n0(PopulationSpec::plug_in(10), DailyCounts({0, 0})), DataError);
}

TEST_CASE("simulate n00 edge cases") {
    Rng rng(1);
    CHECK(simulate_n00({2, 3}, 100, 7, 0, rng) == 100);
    CHECK(simulate_n00({2, 3}, 0, 7, 14, rng) == 0);
    for (int i = 0; i < 1000; ++i) {
        const auto x = simulate_n00({0.5, 4}, 50, 7, 7, rng);
        REQUIRE(x >= 0);
        REQUIRE(x <= 50);
    }
}

TEST_CASE("simulate n00 mean") {
    Rng rng(2);
    const int reps = 100000;
    double sum = 0.0;
    for (int i = 0; i < reps; ++i) sum += static_cast<double>(simulate_n00({1, 1}, 1000, 7, 7, rng));
    const double q = 8.0 / 15.0;
    const double se = std::sqrt(1000 * q * (1 - q) / reps);
    CHECK(std::abs(sum / reps - 1000 * q) < 3 * se);
}

TEST_CASE("nested thinning keeps each marginal") {
    const HyperParams hp(1.5, 6.0);
    const std::vector<std::int64_t> days{7, 14, 28};
    std::vector<double> log_q;
    for (auto d : days) log_q.push_back(log_q0(hp, 7, d));
    Rng rng(3);
    const int reps = 40000;
    const std::int64_t n0 = 500;
    std::vector<double> sums(days.size(), 0.0);
    for (int r = 0; r < reps; ++r) {
        const auto path = nested_thinning(n0, log_q, rng);
        for (std::size_t j = 0; j < path.size(); ++j) {
            if (j > 0) REQUIRE(path[j] <= path[j - 1]);
            sums[j] += static_cast<double>(path[j]);
        }
    }
    for (std::size_t j = 0; j < days.size(); ++j) {
        const double q = std::exp(log_q[j]);
        const double se = std::sqrt(n0 * q * (1 - q) / reps);
        CHECK(std::abs(sums[j] / reps - n0 * q) < 3.5 * se);
    }
}

TEST_CASE("checkpoint days") {
    const std::vector<std::int64_t> h{7, 14, 21, 28};
    CHECK(checkpoint_days(h) == h);
    const std::vector<std::int64_t> odd{3, 20};
    CHECK(checkpoint_days(odd) == std::vector<std::int64_t>{3, 7, 14, 20});
    CHECK_THROWS_AS(checkpoint_days(std::vector<std::int64_t>{}), RequestError);
    CHECK_THROWS_AS(checkpoint_days(std::vector<std::int64_t>{7, 7}), RequestError);
    CHECK_THROWS_AS(checkpoint_days(std::vector<std::int64_t>{0, 7}), RequestError);
}

TEST_CASE("weekly differences") {
    const std::vector<std::int64_t> days{7, 14};
    const std::vector<std::int64_t> n00{800, 700};
    CHECK(weekly_new_participants(1000, days, n00) == std::vector<std::int64_t>{200, 100});
    const std::vector<std::int64_t> days2{3, 7, 10};
    const std::vector<std::int64_t> n00_2{90, 80, 75};
    CHECK(weekly_new_participants(100, days2, n00_2) == std::vector<std::int64_t>{20, 5});
}

TEST_CASE("type-7 quantiles") {
    const std::vector<double> x{1, 2, 3, 4};
    CHECK(sorted_quantile(x, 0.0) == 1.0);
    CHECK(sorted_quantile(x, 1.0) == 4.0);
    CHECK(sorted_quantile(x, 0.5) == 2.5);
    CHECK(sorted_quantile(x, 0.25) == doctest::Approx(1.75));
    const std::vector<std::int64_t> s{5, 1, 3};
    const auto sum = summarize(s);
    CHECK(sum.point_estimate == 3.0);
    CHECK(sum.mean == 3.0);
    CHECK(sum.quantiles[0] == doctest::Approx(1.1));
}

TEST_CASE("forecast invariants per draw") {
    ForecastRequest req{kData, PopulationSpec::plug_in(10), {3, 7, 14, 21, 30}, {}};
    req.sampler.n_draws = 400;
    req.sampler.seed = 8;
    const auto fc = forecast(req);
    CHECK(fc.resolved_n0 == 1790);
    REQUIRE(fc.horizons.size() == 5);
    REQUIRE(fc.weeks.size() == 5);
    CHECK(fc.weeks.front().week == 2);
    CHECK(fc.weeks.back().first_day == 29);
    CHECK(fc.weeks.back().last_day == 30);
    for (std::size_t k = 0; k < 400; ++k) {
        for (std::size_t h = 0; h < fc.horizons.size(); ++h) {
            const auto v = fc.horizons[h].new_participants[k];
            REQUIRE(v >= 0);
            REQUIRE(v <= fc.resolved_n0);
            if (h > 0) REQUIRE(fc.horizons[h - 1].new_participants[k] <= v);
        }
        const auto& curve = fc.weekly_curve_samples[k];
        for (auto w : curve) REQUIRE(w >= 0);
        REQUIRE(std::accumulate(curve.begin(), curve.end(), std::int64_t{0}) ==
                fc.horizons.back().new_participants[k]);
    }
    for (const auto& h : fc.horizons)
        CHECK(h.summary.point_estimate == doctest::Approx(sorted_quantile(
                                              [&] {
                                                  std::vector<double> v(h.new_participants.begin(),
                                                                        h.new_participants.end());
                                                  std::sort(v.begin(), v.end());
                                                  return v;
                                              }(),
                                              0.5)));
}

TEST_CASE("forecast determinism and worker independence") {
    ForecastRequest req{kData, PopulationSpec::plug_in(10), {7, 14}, {}};
    req.sampler.n_draws = 200;
    req.sampler.seed = 99;
    const auto a = forecast(req);
    const auto b = forecast(req);
    CHECK(a.weekly_curve_samples == b.weekly_curve_samples);
    CHECK(a.horizons[1].new_participants == b.horizons[1].new_participants);
    const auto c1 = forecast_from_draws(a.posterior, 1790, 7, req.horizons, 5, 1);
    const auto c4 = forecast_from_draws(a.posterior, 1790, 7, req.horizons, 5, 4);
    CHECK(c1.weekly_curve_samples == c4.weekly_curve_samples);
}

TEST_CASE("zero population forecasts zero") {
    ForecastRequest req{kData, PopulationSpec::known(0), {7, 14, 21, 28}, {}};
    req.sampler.n_draws = 100;
    const auto fc = forecast(req);
    for (const auto& h : fc.horizons) {
        for (auto v : h.new_participants) CHECK(v == 0);
        CHECK(h.summary.point_estimate == 0.0);
    }
}

TEST_CASE("doubling n0 doubles the predictive mean") {
    const auto post = single_draw({1.5, 20});
    std::vector<double> means;
    std::vector<double> ses;
    for (std::int64_t n0 : {2000, 4000}) {
        PosteriorDraws many = post;
        many.draws.assign(20000, HyperParams(1.5, 20));
        const std::vector<std::int64_t> h{7};
        const auto fc = forecast_from_draws(many, n0, 7, h, 17);
        const double q = q0({1.5, 20}, 7, 7);
        double sum = 0.0;
        for (auto v : fc.horizons[0].new_participants) sum += static_cast<double>(n0 - v);
        means.push_back(sum / 20000);
        ses.push_back(std::sqrt(static_cast<double>(n0) * q * (1 - q) / 20000));
    }
    CHECK(std::abs(means[1] - 2 * means[0]) < 3 * std::sqrt(ses[1] * ses[1] + 4 * ses[0] * ses[0]));
}

TEST_CASE("forecast request errors") {
    ForecastRequest req{kData, PopulationSpec::plug_in(10), {}, {}};
    CHECK_THROWS_AS(forecast(req), RequestError);
    req.horizons = {14, 7};
    CHECK_THROWS_AS(forecast(req), RequestError);
    req.horizons = {7};
    req.data = DailyCounts({0, 0, 0, 0, 0, 0, 5});
    CHECK_THROWS_AS(forecast(req), ModelError);
}
