// Apache License, Version 2.0, refer to LICENSE.txt

#include "accrual/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "accrual/error.hpp"

namespace accrual {

namespace {

constexpr double kReflect = 1.0;
constexpr double kExpand = 2.0;
constexpr double kContract = 0.5;
constexpr double kShrink = 0.5;

}  // namespace

NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& objective,
                             std::vector<double> start, const NelderMeadOptions& options) {
    const std::size_t n = start.size();
    if (n == 0) throw DomainError("nelder_mead needs at least one coordinate");
    if (options.initial_step.size() != n) throw DomainError("initial_step size mismatch");

    int evaluations = 0;
    auto eval = [&](std::span<const double> x) {
        ++evaluations;
        const double v = objective(x);
        return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
    };

    std::vector<std::vector<double>> simplex(n + 1, start);
    for (std::size_t i = 0; i < n; ++i) simplex[i + 1][i] += options.initial_step[i];
    std::vector<double> values(n + 1);
    for (std::size_t i = 0; i <= n; ++i) values[i] = eval(simplex[i]);

    std::vector<std::size_t> order(n + 1);
    std::vector<double> centroid(n), trial(n), trial2(n);
    bool converged = false;

    while (evaluations < options.max_evaluations) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
        const std::size_t best = order.front();
        const std::size_t worst = order.back();
        const std::size_t second_worst = order[n - 1];

        double size = 0.0;
        for (std::size_t i = 0; i <= n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                size = std::max(size, std::abs(simplex[i][j] - simplex[best][j]));
        if (size <= options.x_tolerance) {
            converged = std::isfinite(values[best]);
            break;
        }

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == worst) continue;
            for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[i][j] / static_cast<double>(n);
        }

        for (std::size_t j = 0; j < n; ++j)
            trial[j] = centroid[j] + kReflect * (centroid[j] - simplex[worst][j]);
        const double reflected = eval(trial);

        if (reflected < values[best]) {
            for (std::size_t j = 0; j < n; ++j)
                trial2[j] = centroid[j] + kExpand * (trial[j] - centroid[j]);
            const double expanded = eval(trial2);
            if (expanded < reflected) {
                simplex[worst] = trial2;
                values[worst] = expanded;
            } else {
                simplex[worst] = trial;
                values[worst] = reflected;
            }
            continue;
        }
        if (reflected < values[second_worst]) {
            simplex[worst] = trial;
            values[worst] = reflected;
            continue;
        }

        // Contraction, outside if the reflected point improved on the worst.
        const bool outside = reflected < values[worst];
        for (std::size_t j = 0; j < n; ++j) {
            const double towards = outside ? trial[j] : simplex[worst][j];
            trial2[j] = centroid[j] + kContract * (towards - centroid[j]);
        }
        const double contracted = eval(trial2);
        if (contracted < std::min(reflected, values[worst])) {
            simplex[worst] = trial2;
            values[worst] = contracted;
            continue;
        }

        for (std::size_t i = 0; i <= n; ++i) {
            if (i == best) continue;
            for (std::size_t j = 0; j < n; ++j)
                simplex[i][j] = simplex[best][j] + kShrink * (simplex[i][j] - simplex[best][j]);
            values[i] = eval(simplex[i]);
        }
    }

    const auto best = static_cast<std::size_t>(
        std::min_element(values.begin(), values.end()) - values.begin());
    return {simplex[best], values[best], evaluations, converged};
}

}  // namespace accrual
