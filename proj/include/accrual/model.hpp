// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <cstdint>
#include <span>

#include "accrual/types.hpp"

namespace accrual {

/// ln Gamma(x) for x > 0.
double log_gamma(double x);

/// ln Gamma(a + k) - ln Gamma(a), the log of the rising factorial a^(k).
/// Evaluated as a sum of logs for moderate k, which keeps integer-offset
/// gamma ratios exact to a few ulps even when a is huge.
double log_rising(double a, std::int64_t k);

/// P(X = x | pi) for the first-participation day censored at day d:
/// (1 - pi)^(x - 1) pi for x in 1..d and (1 - pi)^d for x = 0.
double censored_geometric_pmf(int x, double pi, int d);

/// Unnormalized log posterior density of (alpha, beta) with pi marginalized
/// out, under the (alpha + beta)^(-5/2) hyperprior. Uses the per-day counts
/// as sufficient statistics; `n0` individuals are censored (never
/// participated in the first period).
double log_hyper_posterior(const HyperParams& hp, const DailyCounts& data, std::int64_t n0);

namespace detail {

/// log_hyper_posterior() without validation: returns -inf for non-positive
/// parameters and never throws. For inner loops.
double grouped_log_density(double alpha, double beta, std::span<const std::int64_t> counts,
                           std::int64_t n0) noexcept;

}  // namespace detail

/// Beta parameters of an individual's pi given (alpha, beta) and its
/// observed first-participation day x (0 = censored).
HyperParams conditional_posterior_pi(const HyperParams& hp, int x, int d);

/// Probability that a first-period non-participant again does not
/// participate during the following `d_star` days.
double q0(const HyperParams& hp, int d, std::int64_t d_star);

/// ln q0, without the final exponentiation.
double log_q0(const HyperParams& hp, int d, std::int64_t d_star);

/// Predictive pmf of X*, the first participation day within a second period
/// of `d_star` days (0 = none), for an individual censored in the first
/// period. x_star = 0 returns q0() exactly.
double predictive_pmf_second_period(const HyperParams& hp, std::int64_t x_star, int d,
                                    std::int64_t d_star);

BetaSummary beta_summary(const HyperParams& hp);

/// True when the hyper-posterior is proper for `data`: some participant on a
/// day in 1..d-1 and some participant on a day in 2..d.
bool posterior_is_proper(const DailyCounts& data);

/// Throws ModelError("posterior may be improper ...") unless
/// posterior_is_proper(data).
void require_proper_posterior(const DailyCounts& data);

}  // namespace accrual
