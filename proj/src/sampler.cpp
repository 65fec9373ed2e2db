// Apache License, Version 2.0, refer to LICENSE.txt

#include "accrual/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "accrual/error.hpp"
#include "accrual/model.hpp"
#include "accrual/optimize.hpp"
#include "accrual/parallel.hpp"
#include "accrual/rng.hpp"
#include "accrual/rou.hpp"

namespace accrual {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log(alpha + beta) outside this range is treated as "no finite mode".
constexpr double kMinLogConcentration = -40.0;
constexpr double kMaxLogConcentration = 60.0;

// Sanity grid around the mode: 21 x 21 points spanning +/- 3 units.
constexpr int kSanityGridHalf = 10;
constexpr double kSanityGridReach = 3.0;

std::pair<double, double> split_concentration(double log_ratio, double concentration) {
    // alpha / beta = exp(log_ratio), alpha + beta = concentration.
    const double alpha = concentration / (1.0 + std::exp(-log_ratio));
    const double beta = concentration / (1.0 + std::exp(log_ratio));
    return {alpha, beta};
}

double mode_objective(std::span<const double> uv, const DailyCounts& data, std::int64_t n0) {
    if (uv[1] < kMinLogConcentration || uv[1] > kMaxLogConcentration)
        return std::numeric_limits<double>::infinity();
    const auto [alpha, beta] = split_concentration(uv[0], std::exp(uv[1]));
    return -detail::grouped_log_density(alpha, beta, data.counts(), n0);
}

}  // namespace

void SamplerConfig::validate() const {
    if (n_draws < 1) throw RequestError("n_draws must be >= 1");
    if (max_rejections_per_draw < 1) throw RequestError("max_rejections_per_draw must be >= 1");
    if (!(mode_tolerance > 0.0)) throw RequestError("mode_tolerance must be > 0");
    if (workers < 1) throw RequestError("workers must be >= 1");
}

std::array<double, 2> to_sampling_coordinates(const HyperParams& hp) {
    return {std::log(hp.alpha()) - std::log(hp.beta()), 1.0 / std::sqrt(hp.alpha() + hp.beta())};
}

std::optional<HyperParams> from_sampling_coordinates(double logit_mean,
                                                     double inv_sqrt_concentration) {
    if (!std::isfinite(logit_mean) || !std::isfinite(inv_sqrt_concentration) ||
        !(inv_sqrt_concentration > 0.0))
        return std::nullopt;
    const double concentration = 1.0 / (inv_sqrt_concentration * inv_sqrt_concentration);
    const auto [alpha, beta] = split_concentration(logit_mean, concentration);
    if (!(alpha > 0.0 && beta > 0.0) || !std::isfinite(alpha) || !std::isfinite(beta))
        return std::nullopt;
    return HyperParams{alpha, beta};
}

double log_density_sampling_coordinates(const std::array<double, 2>& point, const DailyCounts& data,
                                        std::int64_t n0) noexcept {
    if (!std::isfinite(point[0]) || !(point[1] > 0.0) || !std::isfinite(point[1])) return kNegInf;
    const double concentration = 1.0 / (point[1] * point[1]);
    const auto [alpha, beta] = split_concentration(point[0], concentration);
    if (!(alpha > 0.0 && beta > 0.0) || !std::isfinite(concentration)) return kNegInf;
    // d(alpha, beta) = 2 (alpha+beta)^{5/2} mean (1 - mean) d(logit mean) d(tau); the
    // constant 2 is dropped and mean (1 - mean) = alpha beta / (alpha + beta)^2.
    const double log_jacobian = 0.5 * std::log(concentration) + std::log(alpha) + std::log(beta);
    const double value = detail::grouped_log_density(alpha, beta, data.counts(), n0) + log_jacobian;
    return std::isfinite(value) ? value : kNegInf;
}

HyperParams find_posterior_mode(const DailyCounts& data, std::int64_t n0, double tolerance) {
    if (n0 < 0) throw DomainError("n0 must be >= 0");
    if (!(tolerance > 0.0)) throw DomainError("mode tolerance must be > 0");
    require_proper_posterior(data);

    auto objective = [&](std::span<const double> uv) { return mode_objective(uv, data, n0); };

    // The day-1 share of everyone is an unbiased estimate of the Beta mean.
    const double n = static_cast<double>(data.total_participants() + n0);
    const double mean0 = std::clamp(static_cast<double>(data.on_day(1)) / n, 1e-6, 1.0 - 1e-6);
    std::vector<double> start{std::log(mean0) - std::log1p(-mean0), 0.0};
    double best_start = std::numeric_limits<double>::infinity();
    for (double v = -4.0; v <= 16.0; v += 1.0) {
        const double value = objective(std::vector<double>{start[0], v});
        if (value < best_start) {
            best_start = value;
            start[1] = v;
        }
    }

    NelderMeadOptions options{{0.5, 0.5}, tolerance, 20000};
    NelderMeadResult result = nelder_mead(objective, start, options);
    for (int round = 0; round < 8; ++round) {
        // Restart from the optimum (guards against a collapsed simplex), then
        // check the sanity grid; restart from any grid point that beats it.
        options.initial_step = {0.05, 0.05};
        NelderMeadResult again = nelder_mead(objective, result.x, options);
        if (again.value <= result.value) result = std::move(again);

        std::vector<double> grid_best = result.x;
        double grid_value = result.value;
        const double step = kSanityGridReach / kSanityGridHalf;
        for (int i = -kSanityGridHalf; i <= kSanityGridHalf; ++i) {
            for (int j = -kSanityGridHalf; j <= kSanityGridHalf; ++j) {
                std::vector<double> p{result.x[0] + i * step, result.x[1] + j * step};
                const double value = objective(p);
                if (value < grid_value) {
                    grid_value = value;
                    grid_best = std::move(p);
                }
            }
        }
        if (grid_value >= result.value) break;
        options.initial_step = {0.5, 0.5};
        result = nelder_mead(objective, grid_best, options);
    }

    const double v = result.x[1];
    if (!result.converged || !std::isfinite(result.value) || v <= kMinLogConcentration + 1.0 ||
        v >= kMaxLogConcentration - 1.0) {
        std::ostringstream msg;
        msg << "posterior mode search did not converge (log(alpha/beta)=" << result.x[0]
            << ", log(alpha+beta)=" << v << ", evaluations=" << result.evaluations << ")";
        throw NumericalError(msg.str());
    }
    const auto [alpha, beta] = split_concentration(result.x[0], std::exp(v));
    return {alpha, beta};
}

PosteriorDraws sample_hyper_posterior(const DailyCounts& data, std::int64_t n0,
                                      const SamplerConfig& cfg) {
    cfg.validate();
    if (n0 < 0) throw DomainError("n0 must be >= 0");
    const HyperParams mode = find_posterior_mode(data, n0, cfg.mode_tolerance);

    const auto start = to_sampling_coordinates(mode);
    const auto rou = RatioOfUniforms2D::build(
        [&data, n0](const Point2& p) { return log_density_sampling_coordinates(p, data, n0); },
        start, {0.1, 0.1 * start[1]}, cfg.mode_tolerance);

    const int workers = static_cast<int>(std::min<std::int64_t>(cfg.workers, cfg.n_draws));
    const auto n_draws = static_cast<std::size_t>(cfg.n_draws);
    std::vector<std::optional<HyperParams>> slots(n_draws);
    std::vector<std::int64_t> proposals(static_cast<std::size_t>(workers), 0);

    parallel_for(static_cast<std::size_t>(workers), workers, [&](std::size_t w) {
        Rng rng(derive_seed(cfg.seed, {kSamplerStream, w}));
        const std::size_t begin = w * n_draws / static_cast<std::size_t>(workers);
        const std::size_t end = (w + 1) * n_draws / static_cast<std::size_t>(workers);
        for (std::size_t k = begin; k < end; ++k) {
            std::int64_t attempts = 0;
            while (!slots[k]) {
                if (attempts == cfg.max_rejections_per_draw) {
                    const double rate = static_cast<double>(k - begin) /
                                        static_cast<double>(proposals[w] + attempts);
                    std::ostringstream msg;
                    msg << "rejection budget of " << cfg.max_rejections_per_draw
                        << " proposals exhausted (acceptance rate so far " << rate << "; "
                        << rou.describe() << ")";
                    throw NumericalError(msg.str());
                }
                ++attempts;
                if (auto x = rou.propose(rng)) slots[k] = from_sampling_coordinates((*x)[0], (*x)[1]);
            }
            proposals[w] += attempts;
        }
    });

    PosteriorDraws out;
    out.draws.reserve(n_draws);
    for (auto& s : slots) out.draws.push_back(*s);
    std::int64_t total = 0;
    for (auto p : proposals) total += p;
    out.acceptance_rate = static_cast<double>(n_draws) / static_cast<double>(total);
    out.mode = mode;
    out.seed = cfg.seed;
    return out;
}

std::array<double, 2> grid_coordinates(GridAxes axes, const HyperParams& hp) {
    if (axes == GridAxes::alpha_beta) return {hp.alpha(), hp.beta()};
    const double s = hp.alpha() + hp.beta();
    return {hp.alpha() / s, 1.0 / std::sqrt(s)};
}

GridPosterior::GridPosterior(GridSpec spec, std::vector<double> mass)
    : spec_(spec), mass_(std::move(mass)) {}

double GridPosterior::x_width() const noexcept { return (spec_.x_max - spec_.x_min) / spec_.x_cells; }

double GridPosterior::y_width() const noexcept { return (spec_.y_max - spec_.y_min) / spec_.y_cells; }

double GridPosterior::x_center(int i) const noexcept { return spec_.x_min + (i + 0.5) * x_width(); }

double GridPosterior::y_center(int j) const noexcept { return spec_.y_min + (j + 0.5) * y_width(); }

std::optional<std::array<int, 2>> GridPosterior::cell_of(double x, double y) const noexcept {
    if (!(x >= spec_.x_min && x < spec_.x_max && y >= spec_.y_min && y < spec_.y_max))
        return std::nullopt;
    const int i = std::min(spec_.x_cells - 1, static_cast<int>((x - spec_.x_min) / x_width()));
    const int j = std::min(spec_.y_cells - 1, static_cast<int>((y - spec_.y_min) / y_width()));
    return std::array<int, 2>{i, j};
}

std::optional<std::array<int, 2>> GridPosterior::cell_of(const HyperParams& hp) const {
    const auto p = grid_coordinates(spec_.axes, hp);
    return cell_of(p[0], p[1]);
}

std::array<int, 2> GridPosterior::argmax() const {
    const auto k = static_cast<std::size_t>(std::max_element(mass_.begin(), mass_.end()) -
                                            mass_.begin());
    const auto cols = static_cast<std::size_t>(spec_.y_cells);
    return {static_cast<int>(k / cols), static_cast<int>(k % cols)};
}

std::vector<double> GridPosterior::x_marginal() const {
    std::vector<double> out(static_cast<std::size_t>(spec_.x_cells), 0.0);
    for (int i = 0; i < spec_.x_cells; ++i)
        for (int j = 0; j < spec_.y_cells; ++j) out[static_cast<std::size_t>(i)] += mass(i, j);
    return out;
}

GridPosterior grid_posterior(const DailyCounts& data, std::int64_t n0, const GridSpec& grid) {
    if (n0 < 0) throw DomainError("n0 must be >= 0");
    if (grid.x_cells < 2 || grid.y_cells < 2)
        throw DomainError("grid needs at least 2 cells per axis");
    if (!(grid.x_min >= 0.0 && grid.y_min >= 0.0 && grid.x_max > grid.x_min &&
          grid.y_max > grid.y_min) ||
        !std::isfinite(grid.x_max) || !std::isfinite(grid.y_max))
        throw DomainError("grid bounds must be non-negative and increasing");
    if (grid.axes == GridAxes::mean_dispersion && grid.x_max > 1.0)
        throw DomainError("mean axis must lie within [0, 1]");

    // Log density at a cell centre, including the Jacobian for the
    // (mean, dispersion) axes: alpha = m / t^2, beta = (1 - m) / t^2 gives
    // |d(alpha, beta) / d(m, t)| = 2 t^-5.
    auto log_density = [&](double x, double y) {
        if (grid.axes == GridAxes::alpha_beta)
            return detail::grouped_log_density(x, y, data.counts(), n0);
        const double s = 1.0 / (y * y);
        return detail::grouped_log_density(x * s, (1.0 - x) * s, data.counts(), n0) -
               5.0 * std::log(y);
    };

    GridPosterior shape(grid, {});
    const auto cells = static_cast<std::size_t>(grid.x_cells) * static_cast<std::size_t>(grid.y_cells);
    std::vector<double> log_mass(cells);
    double peak = kNegInf;
    for (int i = 0; i < grid.x_cells; ++i) {
        for (int j = 0; j < grid.y_cells; ++j) {
            const double lp = log_density(shape.x_center(i), shape.y_center(j));
            const auto k = static_cast<std::size_t>(i) * static_cast<std::size_t>(grid.y_cells) +
                           static_cast<std::size_t>(j);
            log_mass[k] = std::isfinite(lp) ? lp : kNegInf;
            peak = std::max(peak, log_mass[k]);
        }
    }
    if (!std::isfinite(peak))
        throw NumericalError("every grid cell has zero density; adjust the grid bounds");

    std::vector<double> mass(cells);
    long double total = 0.0L;
    for (std::size_t k = 0; k < cells; ++k) {
        mass[k] = std::exp(log_mass[k] - peak);
        total += mass[k];
    }
    for (auto& m : mass) m = static_cast<double>(m / total);
    return GridPosterior(grid, std::move(mass));
}

}  // namespace accrual
