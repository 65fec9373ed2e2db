// Apache License, Version 2.0, refer to LICENSE.txt

#include "accrual/rou.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <algorithm>
#include <sstream>

#include "accrual/error.hpp"
#include "accrual/optimize.hpp"

namespace accrual {

namespace {

constexpr double kInflation = 1.05;
constexpr int kPolarRays = 360;
constexpr std::size_t kPolishedStarts = 4;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
// Box searches that wander further than this (in whitened units) mean the
// target does not decay fast enough for a bounded region.
constexpr double kMaxWhitenedExtent = 1e6;

double finite_or_neg_inf(double v) { return std::isfinite(v) ? v : kNegInf; }

// Minimizes -log f from `start`, restarting from each optimum with a smaller
// simplex until the value stops improving.
NelderMeadResult polish_minimum(const std::function<double(std::span<const double>)>& objective,
                                std::vector<double> start, std::vector<double> step,
                                double tolerance) {
    NelderMeadOptions options{step, tolerance, 20000};
    NelderMeadResult best = nelder_mead(objective, std::move(start), options);
    for (int restart = 0; restart < 6; ++restart) {
        for (auto& s : options.initial_step) s *= 0.25;
        NelderMeadResult again = nelder_mead(objective, best.x, options);
        const bool improved = again.value < best.value - 1e-12 * (1.0 + std::abs(best.value));
        if (again.value <= best.value) best = std::move(again);
        if (!improved) break;
    }
    return best;
}

struct Curvature {
    double h00, h01, h11;
    bool ok;
};

// Central-difference Hessian of -log f at x with steps h.
Curvature negative_hessian(const RatioOfUniforms2D::LogDensity& log_f, const Point2& x,
                           const Point2& h) {
    auto f = [&](double dx, double dy) { return finite_or_neg_inf(log_f({x[0] + dx, x[1] + dy})); };
    const double f0 = f(0, 0);
    const double fpx = f(h[0], 0), fmx = f(-h[0], 0);
    const double fpy = f(0, h[1]), fmy = f(0, -h[1]);
    const double fpp = f(h[0], h[1]), fpm = f(h[0], -h[1]);
    const double fmp = f(-h[0], h[1]), fmm = f(-h[0], -h[1]);
    for (double v : {f0, fpx, fmx, fpy, fmy, fpp, fpm, fmp, fmm})
        if (!std::isfinite(v)) return {0, 0, 0, false};
    Curvature c{};
    c.h00 = -(fpx - 2 * f0 + fmx) / (h[0] * h[0]);
    c.h11 = -(fpy - 2 * f0 + fmy) / (h[1] * h[1]);
    c.h01 = -(fpp - fpm - fmp + fmm) / (4 * h[0] * h[1]);
    c.ok = c.h00 > 0 && c.h11 > 0 && c.h00 * c.h11 - c.h01 * c.h01 > 0 &&
           std::isfinite(c.h00 * c.h11);
    return c;
}

}  // namespace

RatioOfUniforms2D RatioOfUniforms2D::build(LogDensity log_density, Point2 start, Point2 scale,
                                           double tolerance) {
    if (!(scale[0] > 0 && scale[1] > 0)) throw DomainError("ratio-of-uniforms scale must be > 0");
    RatioOfUniforms2D rou;
    rou.log_density_ = std::move(log_density);
    const auto& log_f = rou.log_density_;

    if (!std::isfinite(log_f(start)))
        throw NumericalError("ratio-of-uniforms start point has zero density");

    // Mode in the original coordinates.
    auto neg_log_f = [&](std::span<const double> x) { return -log_f({x[0], x[1]}); };
    auto coarse = polish_minimum(neg_log_f, {start[0], start[1]}, {scale[0], scale[1]}, tolerance);
    if (!std::isfinite(coarse.value))
        throw NumericalError("ratio-of-uniforms mode search failed");
    rou.mode_ = {coarse.x[0], coarse.x[1]};

    // Whitening from the curvature at the mode; two passes so the finite
    // difference step tracks the local scale.
    Point2 h{1e-3 * scale[0], 1e-3 * scale[1]};
    Curvature c = negative_hessian(log_f, rou.mode_, h);
    if (c.ok) {
        h = {0.1 / std::sqrt(c.h00), 0.1 / std::sqrt(c.h11)};
        const Curvature refined = negative_hessian(log_f, rou.mode_, h);
        if (refined.ok) c = refined;
    }
    if (c.ok) {
        // L = chol(H^{-1}).
        const double det = c.h00 * c.h11 - c.h01 * c.h01;
        const double s00 = c.h11 / det, s01 = -c.h01 / det, s11 = c.h00 / det;
        rou.l00_ = std::sqrt(s00);
        rou.l10_ = s01 / rou.l00_;
        rou.l11_ = std::sqrt(s11 - rou.l10_ * rou.l10_);
    } else {
        rou.l00_ = scale[0];
        rou.l10_ = 0.0;
        rou.l11_ = scale[1];
    }

    // Re-polish the mode in whitened coordinates.
    const Point2 origin = rou.mode_;
    auto neg_log_f_z = [&](std::span<const double> z) {
        const Point2 x{origin[0] + rou.l00_ * z[0], origin[1] + rou.l10_ * z[0] + rou.l11_ * z[1]};
        return -log_f(x);
    };
    auto fine = polish_minimum(neg_log_f_z, {0.0, 0.0}, {0.5, 0.5}, tolerance);
    if (fine.value <= coarse.value)
        rou.mode_ = {origin[0] + rou.l00_ * fine.x[0],
                     origin[1] + rou.l10_ * fine.x[0] + rou.l11_ * fine.x[1]};
    rou.log_f_mode_ = log_f(rou.mode_);
    if (!std::isfinite(rou.log_f_mode_))
        throw NumericalError("ratio-of-uniforms mode has non-finite density");

    // u edge: sup g / 2 = 0 at the mode.
    rou.log_u_max_ = std::log(kInflation);

    // v edges: extremes of z_i * exp(g(z) / 4), optimized in log form. The
    // objective can be multimodal (a heavy tail cut off by a support boundary
    // sits far from the local optimum near the mode), so starts come from a
    // polar scan as well as a grid around each axis.
    std::vector<std::pair<Point2, double>> polar;
    for (int ray = 0; ray < kPolarRays; ++ray) {
        const double angle = 2.0 * std::numbers::pi * ray / kPolarRays;
        for (double radius = 1.0 / 64; radius <= 1024.0; radius *= 1.25) {
            const Point2 z{radius * std::cos(angle), radius * std::sin(angle)};
            const double g = rou.relative_log_density(z);
            if (g != kNegInf) polar.emplace_back(z, g);
        }
    }
    for (int axis = 0; axis < 2; ++axis) {
        for (double sign : {1.0, -1.0}) {
            auto objective = [&](std::span<const double> z) {
                const double along = sign * z[static_cast<std::size_t>(axis)];
                if (!(along > 0)) return std::numeric_limits<double>::infinity();
                return -(std::log(along) + rou.relative_log_density({z[0], z[1]}) / 4.0);
            };
            // Coarse scan for feasible starting points, then polish the best few.
            std::vector<std::pair<double, std::vector<double>>> starts;
            for (double reach : {0.125, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0}) {
                for (double across : {-8.0, -4.0, -2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0, 4.0, 8.0}) {
                    std::vector<double> z0(2);
                    z0[static_cast<std::size_t>(axis)] = sign * reach;
                    z0[static_cast<std::size_t>(1 - axis)] = across;
                    const double value = objective(z0);
                    if (std::isfinite(value)) starts.emplace_back(value, std::move(z0));
                }
            }
            // A mode against a support boundary leaves only a thin feasible
            // sliver on that side; look closer in.
            double scale_z = 1.0;
            for (int k = 4; starts.empty() && k <= 60; ++k) {
                scale_z = std::ldexp(1.0, -k);
                std::vector<double> z0(2, 0.0);
                z0[static_cast<std::size_t>(axis)] = sign * scale_z;
                const double value = objective(z0);
                if (std::isfinite(value)) starts.emplace_back(value, std::move(z0));
            }
            for (const auto& [z, g] : polar) {
                std::vector<double> z0{z[0], z[1]};
                const double value = objective(z0);
                if (std::isfinite(value)) starts.emplace_back(value, std::move(z0));
            }
            std::sort(starts.begin(), starts.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });
            // Best few starts that are not neighbours of one another.
            std::vector<std::vector<double>> chosen;
            for (const auto& [value, z0] : starts) {
                if (chosen.size() == kPolishedStarts) break;
                const bool near = std::any_of(chosen.begin(), chosen.end(), [&](const auto& c) {
                    return std::hypot(c[0] - z0[0], c[1] - z0[1]) < 0.5 * std::max(1.0, std::hypot(c[0], c[1]));
                });
                if (!near) chosen.push_back(z0);
            }
            NelderMeadResult best;
            best.value = std::numeric_limits<double>::infinity();
            const double step = 0.25 * scale_z;
            for (const auto& z0 : chosen) {
                auto r = polish_minimum(objective, z0, {step, step}, tolerance * scale_z);
                if (r.value < best.value) best = std::move(r);
            }
            const double extent = best.x.empty() ? 0.0 : std::hypot(best.x[0], best.x[1]);
            if (!std::isfinite(best.value) || !best.converged || extent > kMaxWhitenedExtent) {
                std::ostringstream msg;
                msg << "ratio-of-uniforms envelope is unbounded along axis " << axis
                    << (sign > 0 ? " (+)" : " (-)") << "; " << rou.describe();
                throw NumericalError(msg.str());
            }
            const double edge = sign * std::exp(-best.value) * kInflation;
            if (sign > 0)
                rou.v_upper_[static_cast<std::size_t>(axis)] = edge;
            else
                rou.v_lower_[static_cast<std::size_t>(axis)] = edge;
        }
    }
    return rou;
}

double RatioOfUniforms2D::relative_log_density(const Point2& z) const {
    return finite_or_neg_inf(log_density_(to_original(z)) - log_f_mode_);
}

std::optional<Point2> RatioOfUniforms2D::propose(Rng& rng) const {
    const double log_u = log_u_max_ + std::log(uniform_open(rng));
    const double shrink = std::exp(-0.5 * log_u);
    Point2 z{};
    for (std::size_t i = 0; i < 2; ++i)
        z[i] = (v_lower_[i] + (v_upper_[i] - v_lower_[i]) * uniform_open(rng)) * shrink;

    const double g = relative_log_density(z);
    if (g == kNegInf) return std::nullopt;

    // Envelope audit: the region must not poke out of the box at z.
    constexpr double slack = 1e-9;
    bool outside = g / 2.0 > log_u_max_ + slack;
    const double reach = std::exp(g / 4.0);
    for (std::size_t i = 0; i < 2; ++i) {
        const double v_extent = z[i] * reach;
        if (v_extent > v_upper_[i] * (1 + slack) || v_extent < v_lower_[i] * (1 + slack))
            outside = true;
    }
    if (outside) {
        std::ostringstream msg;
        msg << "ratio-of-uniforms envelope violated at z=(" << z[0] << ", " << z[1]
            << "), relative log density " << g << "; " << describe();
        throw NumericalError(msg.str());
    }

    if (log_u <= g / 2.0) return to_original(z);
    return std::nullopt;
}

std::string RatioOfUniforms2D::describe() const {
    std::ostringstream out;
    out << "mode=(" << mode_[0] << ", " << mode_[1] << "), u_max=" << std::exp(log_u_max_)
        << ", v1=[" << v_lower_[0] << ", " << v_upper_[0] << "], v2=[" << v_lower_[1] << ", "
        << v_upper_[1] << "]";
    return out.str();
}

}  // namespace accrual
