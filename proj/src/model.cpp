// Apache License, Version 2.0, refer to LICENSE.txt

#include "accrual/model.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <string>

#include "accrual/error.hpp"

namespace accrual {

namespace {

// Above this many terms the rising factorial switches to a difference of
// log-gamma values.
constexpr std::int64_t kMaxDirectRisingTerms = 256;

void check_day_count(int d) {
    if (d < 1) throw DomainError("period length d must be >= 1, got " + std::to_string(d));
}

}  // namespace

double log_gamma(double x) {
    if (!(x > 0.0) || !std::isfinite(x))
        throw DomainError("log_gamma requires a finite positive argument, got " + std::to_string(x));
    return boost::math::lgamma(x);
}

double log_rising(double a, std::int64_t k) {
    if (!(a > 0.0) || !std::isfinite(a)) throw DomainError("log_rising requires a > 0");
    if (k < 0) throw DomainError("log_rising requires k >= 0");
    if (k > kMaxDirectRisingTerms) return log_gamma(a + static_cast<double>(k)) - log_gamma(a);
    double sum = 0.0;
    for (std::int64_t j = 0; j < k; ++j) sum += std::log(a + static_cast<double>(j));
    return sum;
}

double censored_geometric_pmf(int x, double pi, int d) {
    check_day_count(d);
    if (x < 0 || x > d)
        throw DomainError("x must lie in 0.." + std::to_string(d) + ", got " + std::to_string(x));
    if (!(pi > 0.0 && pi <= 1.0))
        throw DomainError("pi must lie in (0, 1], got " + std::to_string(pi));
    if (x == 0) return std::pow(1.0 - pi, d);
    return std::pow(1.0 - pi, x - 1) * pi;
}

namespace detail {

double grouped_log_density(double a, double b, std::span<const std::int64_t> counts,
                           std::int64_t n0) noexcept {
    if (!(a > 0.0 && b > 0.0) || !std::isfinite(a) || !std::isfinite(b)) return -HUGE_VAL;
    const double s = a + b;
    const int d = static_cast<int>(counts.size());

    // A participant on day t contributes
    //   ln Gamma(a+1) + ln Gamma(b+t-1) - ln Gamma(s+t) + ln Gamma(s) - ln Gamma(a) - ln Gamma(b)
    // = ln a + [ln b^(t-1)] - [ln s^(t)]   (rising factorials),
    // so both running sums advance by one log per day.
    double value = -2.5 * std::log(s);
    const double log_a = std::log(a);
    double rising_b = 0.0;  // ln b^(t-1)
    double rising_s = 0.0;  // ln s^(t)
    for (int t = 1; t <= d; ++t) {
        if (t >= 2) rising_b += std::log(b + (t - 2));
        rising_s += std::log(s + (t - 1));
        const auto count = counts[static_cast<std::size_t>(t - 1)];
        if (count != 0) value += static_cast<double>(count) * (log_a + rising_b - rising_s);
    }
    if (n0 > 0) {
        // Censored: ln Gamma(b+d) - ln Gamma(b) - [ln Gamma(s+d) - ln Gamma(s)].
        const double censored = (rising_b + std::log(b + (d - 1))) - rising_s;
        value += static_cast<double>(n0) * censored;
    }
    return value;
}

}  // namespace detail

double log_hyper_posterior(const HyperParams& hp, const DailyCounts& data, std::int64_t n0) {
    if (n0 < 0) throw DomainError("n0 must be >= 0");
    const double value = detail::grouped_log_density(hp.alpha(), hp.beta(), data.counts(), n0);
    if (!std::isfinite(value))
        throw NumericalError("log_hyper_posterior is not finite at alpha=" +
                             std::to_string(hp.alpha()) + ", beta=" + std::to_string(hp.beta()));
    return value;
}

HyperParams conditional_posterior_pi(const HyperParams& hp, int x, int d) {
    check_day_count(d);
    if (x < 0 || x > d)
        throw DomainError("x must lie in 0.." + std::to_string(d) + ", got " + std::to_string(x));
    if (x == 0) return {hp.alpha(), hp.beta() + d};
    return {hp.alpha() + 1.0, hp.beta() + (x - 1)};
}

double log_q0(const HyperParams& hp, int d, std::int64_t d_star) {
    check_day_count(d);
    if (d_star < 0) throw DomainError("d_star must be >= 0");
    if (d_star == 0) return 0.0;
    // Gamma(b+d+d*) Gamma(s+d) / (Gamma(s+d+d*) Gamma(b+d)) = (b+d)^(d*) / (s+d)^(d*)
    const double b_d = hp.beta() + d;
    const double s_d = hp.alpha() + hp.beta() + d;
    return log_rising(b_d, d_star) - log_rising(s_d, d_star);
}

double q0(const HyperParams& hp, int d, std::int64_t d_star) {
    return std::exp(log_q0(hp, d, d_star));
}

double predictive_pmf_second_period(const HyperParams& hp, std::int64_t x_star, int d,
                                    std::int64_t d_star) {
    check_day_count(d);
    if (d_star < 0) throw DomainError("d_star must be >= 0");
    if (x_star < 0 || x_star > d_star)
        throw DomainError("x_star must lie in 0.." + std::to_string(d_star) + ", got " +
                          std::to_string(x_star));
    if (x_star == 0) return q0(hp, d, d_star);
    // Gamma(a+1) Gamma(b+d+x*-1) Gamma(s+d) / (Gamma(s+d+x*) Gamma(a) Gamma(b+d))
    const double b_d = hp.beta() + d;
    const double s_d = hp.alpha() + hp.beta() + d;
    return hp.alpha() * std::exp(log_rising(b_d, x_star - 1) - log_rising(s_d, x_star));
}

BetaSummary beta_summary(const HyperParams& hp) {
    const double s = hp.alpha() + hp.beta();
    const double mean = hp.alpha() / s;
    return {mean, std::sqrt(mean * (1.0 - mean) / (s + 1.0))};
}

bool posterior_is_proper(const DailyCounts& data) {
    const int d = data.days();
    bool before_last = false;
    bool after_first = false;
    for (int t = 1; t <= d; ++t) {
        if (data.on_day(t) == 0) continue;
        if (t <= d - 1) before_last = true;
        if (t >= 2) after_first = true;
    }
    return before_last && after_first;
}

void require_proper_posterior(const DailyCounts& data) {
    if (!posterior_is_proper(data))
        throw ModelError(
            "posterior may be improper: need a participant on some day in 1..d-1 and on some "
            "day in 2..d");
}

}  // namespace accrual
