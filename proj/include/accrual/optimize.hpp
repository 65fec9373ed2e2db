// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <functional>
#include <span>
#include <vector>

namespace accrual {

struct NelderMeadOptions {
    /// Initial simplex edge length along each axis.
    std::vector<double> initial_step;
    /// Stop when every vertex lies within this distance (max norm) of the
    /// best vertex.
    double x_tolerance = 1e-8;
    int max_evaluations = 20000;
};

struct NelderMeadResult {
    std::vector<double> x;
    double value = 0.0;
    int evaluations = 0;
    bool converged = false;
};

/// Minimizes `objective` with the Nelder-Mead simplex method. Non-finite
/// objective values are treated as +infinity, so infeasible regions can be
/// signalled by returning infinity or NaN.
NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& objective,
                             std::vector<double> start, const NelderMeadOptions& options);

}  // namespace accrual
