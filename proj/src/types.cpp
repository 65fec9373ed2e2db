// Apache License, Version 2.0, refer to LICENSE.txt

#include "accrual/types.hpp"

#include <cmath>
#include <string>

#include "accrual/error.hpp"

namespace accrual {

DailyCounts::DailyCounts(std::vector<std::int64_t> counts) : counts_(std::move(counts)) {
    if (counts_.empty()) throw DataError("daily counts must cover at least one day");
    for (std::size_t i = 0; i < counts_.size(); ++i) {
        if (counts_[i] < 0)
            throw DataError("negative count on day " + std::to_string(i + 1));
        total_ += counts_[i];
    }
}

HyperParams::HyperParams(double alpha, double beta) : alpha_(alpha), beta_(beta) {
    if (!(std::isfinite(alpha) && alpha > 0.0))
        throw DomainError("alpha must be finite and > 0, got " + std::to_string(alpha));
    if (!(std::isfinite(beta) && beta > 0.0))
        throw DomainError("beta must be finite and > 0, got " + std::to_string(beta));
}

PopulationSpec PopulationSpec::known(std::int64_t n0) {
    if (n0 < 0) throw DomainError("n0 must be >= 0");
    return PopulationSpec(KnownN0{n0});
}

PopulationSpec PopulationSpec::plug_in(double lambda) {
    if (!(std::isfinite(lambda) && lambda > 0.0)) throw DomainError("lambda must be finite and > 0");
    return PopulationSpec(PlugInMultiplier{lambda});
}

}  // namespace accrual
