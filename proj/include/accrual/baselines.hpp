// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <cstdint>
#include <span>

#include "accrual/types.hpp"

namespace accrual {

/// log(S_t + 1) = beta0 + beta1 * t + error.
struct LogLinearFit {
    double beta0 = 0.0;
    double beta1 = 0.0;
};

struct PredictionPair {
    double predicted = 0.0;
    double actual = 0.0;
};

struct MetricReport {
    double rmse = 0.0;
    /// Percent. Pairs with actual == 0 are left out of the mean.
    double mape = 0.0;
    std::int64_t n = 0;
    std::int64_t mape_excluded = 0;
};

/// Closed-form OLS over days 1..d. Throws DataError when d < 2.
LogLinearFit fit_log_linear(const DailyCounts& data);
/// Same fit on real-valued daily counts.
LogLinearFit fit_log_linear(std::span<const double> counts);

/// Predicted new participants in week k (k >= 2) after a first period of
/// first_period_d days: the sum of exp(beta0 + beta1 t) - 1 over the seven
/// days of that week, each day clamped at zero.
double predict_log_linear(const LogLinearFit& fit, int week, int first_period_d);

/// Throws DataError on empty input.
double rmse(std::span<const PredictionPair> pairs);

/// Throws DataError when no pair has a nonzero actual.
double mape(std::span<const PredictionPair> pairs);

/// Number of pairs mape() leaves out.
std::int64_t mape_exclusions(std::span<const PredictionPair> pairs) noexcept;

/// rmse and mape together. When every actual is zero mape is NaN rather
/// than an error, so a report can still be produced.
MetricReport score(std::span<const PredictionPair> pairs);

}  // namespace accrual
