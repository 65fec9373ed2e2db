// Apache License, Version 2.0, refer to LICENSE.txt

#include "accrual/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "accrual/error.hpp"

namespace accrual {

LogLinearFit fit_log_linear(std::span<const double> counts) {
    const std::size_t d = counts.size();
    if (d < 2) throw DataError("log-linear fit needs at least 2 days, got " + std::to_string(d));
    double t_mean = 0.0;
    double y_mean = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        if (!(counts[i] > -1.0)) throw DataError("log-linear fit needs counts > -1");
        t_mean += static_cast<double>(i + 1);
        y_mean += std::log1p(counts[i]);
    }
    t_mean /= static_cast<double>(d);
    y_mean /= static_cast<double>(d);
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        const double dt = static_cast<double>(i + 1) - t_mean;
        sxy += dt * (std::log1p(counts[i]) - y_mean);
        sxx += dt * dt;
    }
    const double beta1 = sxy / sxx;
    return {y_mean - beta1 * t_mean, beta1};
}

LogLinearFit fit_log_linear(const DailyCounts& data) {
    std::vector<double> counts(data.counts().begin(), data.counts().end());
    return fit_log_linear(counts);
}

double predict_log_linear(const LogLinearFit& fit, int week, int first_period_d) {
    if (week < 2) throw DomainError("week must be >= 2");
    if (first_period_d < 1) throw DomainError("first_period_d must be >= 1");
    const int first = first_period_d + 7 * (week - 2) + 1;
    double total = 0.0;
    for (int t = first; t < first + 7; ++t)
        total += std::max(0.0, std::expm1(fit.beta0 + fit.beta1 * static_cast<double>(t)));
    return total;
}

double rmse(std::span<const PredictionPair> pairs) {
    if (pairs.empty()) throw DataError("rmse of an empty set of pairs");
    double sum = 0.0;
    for (const auto& p : pairs) sum += (p.predicted - p.actual) * (p.predicted - p.actual);
    return std::sqrt(sum / static_cast<double>(pairs.size()));
}

std::int64_t mape_exclusions(std::span<const PredictionPair> pairs) noexcept {
    std::int64_t excluded = 0;
    for (const auto& p : pairs) excluded += p.actual == 0.0;
    return excluded;
}

double mape(std::span<const PredictionPair> pairs) {
    double sum = 0.0;
    std::int64_t used = 0;
    for (const auto& p : pairs) {
        if (p.actual == 0.0) continue;
        sum += std::abs(p.predicted - p.actual) / std::abs(p.actual);
        ++used;
    }
    if (used == 0) throw DataError("mape is undefined: every actual is zero");
    return 100.0 * sum / static_cast<double>(used);
}

MetricReport score(std::span<const PredictionPair> pairs) {
    MetricReport r;
    r.rmse = rmse(pairs);
    r.n = static_cast<std::int64_t>(pairs.size());
    r.mape_excluded = mape_exclusions(pairs);
    r.mape = r.mape_excluded == r.n ? std::numeric_limits<double>::quiet_NaN() : mape(pairs);
    return r;
}

}  // namespace accrual
