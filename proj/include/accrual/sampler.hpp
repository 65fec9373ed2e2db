// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "accrual/types.hpp"

namespace accrual {

struct SamplerConfig {
    std::int64_t n_draws = 1000;
    std::uint64_t seed = 0;
    std::int64_t max_rejections_per_draw = 10000;
    double mode_tolerance = 1e-8;
    /// Draws are split across this many independent RNG streams (and
    /// threads). Output is reproducible for a fixed (seed, workers).
    int workers = 1;

    /// Throws RequestError on an invalid configuration.
    void validate() const;
};

struct PosteriorDraws {
    std::vector<HyperParams> draws;
    double acceptance_rate = 0.0;
    HyperParams mode{1.0, 1.0};
    std::uint64_t seed = 0;
};

/// Coordinates the sampler works in: (logit of the Beta mean,
/// (alpha + beta)^(-1/2)). The hyperprior is flat in (mean, (alpha+beta)^(-1/2)).
std::array<double, 2> to_sampling_coordinates(const HyperParams& hp);

/// Inverse of to_sampling_coordinates(); empty when the point maps outside
/// alpha > 0, beta > 0 (including under/overflow).
std::optional<HyperParams> from_sampling_coordinates(double logit_mean, double inv_sqrt_concentration);

/// Log density of the hyper-posterior expressed in sampling coordinates
/// (log_hyper_posterior plus the log Jacobian); -inf outside the support.
double log_density_sampling_coordinates(const std::array<double, 2>& point, const DailyCounts& data,
                                        std::int64_t n0) noexcept;

/// Maximizer of log_hyper_posterior, searched with Nelder-Mead over
/// (log(alpha/beta), log(alpha+beta)). Throws ModelError when the posterior
/// may be improper and NumericalError when no finite mode is found.
HyperParams find_posterior_mode(const DailyCounts& data, std::int64_t n0, double tolerance = 1e-8);

/// Exact, independent draws of (alpha, beta) from the hyper-posterior by the
/// ratio-of-uniforms method.
PosteriorDraws sample_hyper_posterior(const DailyCounts& data, std::int64_t n0,
                                      const SamplerConfig& cfg);

enum class GridAxes {
    /// Cells are rectangles in (alpha, beta).
    alpha_beta,
    /// Cells are rectangles in (mean, (alpha + beta)^(-1/2)), where the
    /// hyperprior is flat; suits posteriors with long tails in alpha + beta.
    mean_dispersion,
};

/// Rectangular grid; cells are evaluated at their centres.
struct GridSpec {
    GridAxes axes = GridAxes::alpha_beta;
    double x_min = 0.0;
    double x_max = 0.0;
    double y_min = 0.0;
    double y_max = 0.0;
    int x_cells = 0;
    int y_cells = 0;
};

/// Grid coordinates of `hp` under `axes`.
std::array<double, 2> grid_coordinates(GridAxes axes, const HyperParams& hp);

/// Normalized cell masses of the hyper-posterior on a GridSpec.
class GridPosterior {
public:
    GridPosterior(GridSpec spec, std::vector<double> mass);

    const GridSpec& spec() const noexcept { return spec_; }
    double x_width() const noexcept;
    double y_width() const noexcept;
    double x_center(int i) const noexcept;
    double y_center(int j) const noexcept;
    /// Mass of cell (i, j), i indexing the first axis.
    double mass(int i, int j) const { return mass_.at(index(i, j)); }
    const std::vector<double>& masses() const noexcept { return mass_; }

    /// Cell containing the grid point (x, y), if inside the grid.
    std::optional<std::array<int, 2>> cell_of(double x, double y) const noexcept;
    std::optional<std::array<int, 2>> cell_of(const HyperParams& hp) const;
    std::array<int, 2> argmax() const;
    /// Marginal masses along the first axis.
    std::vector<double> x_marginal() const;

private:
    std::size_t index(int i, int j) const noexcept {
        return static_cast<std::size_t>(i) * static_cast<std::size_t>(spec_.y_cells) +
               static_cast<std::size_t>(j);
    }

    GridSpec spec_;
    std::vector<double> mass_;
};

GridPosterior grid_posterior(const DailyCounts& data, std::int64_t n0, const GridSpec& grid);

}  // namespace accrual
