// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>

#include "accrual/rng.hpp"

namespace accrual {

using Point2 = std::array<double, 2>;

/// Generalized ratio-of-uniforms sampler (power r = 1/2) for an unnormalized
/// density on the plane, relocated to the mode and whitened by the local
/// curvature there.
///
/// With z = L^{-1}(x - mode) and g(z) = log f(x) - log f(mode), the region
///   C = {(u, v) : 0 < u <= exp(g(v / sqrt(u)) / 2)}
/// is enclosed in the box (0, u_max] x [v_lower, v_upper], whose edges are
/// found by numerically maximizing g / 2 and +/- z_i + g / 4 (in log form) and
/// then inflated by 5%. A uniform point of C maps to an exact draw from f.
class RatioOfUniforms2D {
public:
    /// Log of the unnormalized target density. May return -inf (or NaN)
    /// outside the support.
    using LogDensity = std::function<double(const Point2&)>;

    /// Locates the mode starting from `start`, whitens, and bounds the box.
    /// `scale` is a rough per-axis length scale used for the initial simplex.
    /// Throws NumericalError when the box cannot be bounded.
    static RatioOfUniforms2D build(LogDensity log_density, Point2 start, Point2 scale,
                                   double tolerance = 1e-8);

    /// One proposal. Returns the point in the original coordinates when it
    /// is accepted. Throws NumericalError if the proposal reveals that the
    /// target pokes outside the box.
    std::optional<Point2> propose(Rng& rng) const;

    const Point2& mode() const noexcept { return mode_; }
    double log_density_at_mode() const noexcept { return log_f_mode_; }
    double log_u_max() const noexcept { return log_u_max_; }
    const Point2& v_lower() const noexcept { return v_lower_; }
    const Point2& v_upper() const noexcept { return v_upper_; }
    /// Lower-triangular whitening factor, row-major {L00, L10, L11}.
    std::array<double, 3> whitening() const noexcept { return {l00_, l10_, l11_}; }

    std::string describe() const;

    Point2 to_original(const Point2& z) const noexcept {
        return {mode_[0] + l00_ * z[0], mode_[1] + l10_ * z[0] + l11_ * z[1]};
    }

private:
    RatioOfUniforms2D() = default;

    double relative_log_density(const Point2& z) const;

    LogDensity log_density_;
    Point2 mode_{};
    double log_f_mode_ = 0.0;
    double l00_ = 1.0, l10_ = 0.0, l11_ = 1.0;
    double log_u_max_ = 0.0;
    Point2 v_lower_{};
    Point2 v_upper_{};
};

}  // namespace accrual
