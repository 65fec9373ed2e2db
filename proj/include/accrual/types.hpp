// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

namespace accrual {

/// Per-day counts of first-time participants over the initial observation
/// period. counts()[t - 1] is the number of individuals whose first
/// participation fell on day t. Individuals who never participated during the
/// period are not stored here; see PopulationSpec.
class DailyCounts {
public:
    /// Throws DataError if `counts` is empty or holds a negative entry.
    explicit DailyCounts(std::vector<std::int64_t> counts);

    int days() const noexcept { return static_cast<int>(counts_.size()); }
    std::span<const std::int64_t> counts() const noexcept { return counts_; }

    /// S_t for 1-indexed day t.
    std::int64_t on_day(int t) const { return counts_.at(static_cast<std::size_t>(t - 1)); }

    std::int64_t total_participants() const noexcept { return total_; }

    friend bool operator==(const DailyCounts&, const DailyCounts&) = default;

private:
    std::vector<std::int64_t> counts_;
    std::int64_t total_ = 0;
};

/// Parameters of the Beta(alpha, beta) population distribution over daily
/// participation probabilities.
class HyperParams {
public:
    /// Throws DomainError unless both values are finite and strictly positive.
    HyperParams(double alpha, double beta);

    double alpha() const noexcept { return alpha_; }
    double beta() const noexcept { return beta_; }

    friend bool operator==(const HyperParams&, const HyperParams&) = default;

private:
    double alpha_;
    double beta_;
};

struct KnownN0 {
    std::int64_t n0 = 0;
};

struct PlugInMultiplier {
    double lambda = 10.0;
};

/// Either the exact number of first-period non-participants or a multiplier
/// applied to the participant total to estimate it.
class PopulationSpec {
public:
    static PopulationSpec known(std::int64_t n0);
    static PopulationSpec plug_in(double lambda);

    bool is_known() const noexcept { return std::holds_alternative<KnownN0>(value_); }
    const std::variant<KnownN0, PlugInMultiplier>& value() const noexcept { return value_; }

private:
    explicit PopulationSpec(std::variant<KnownN0, PlugInMultiplier> v) : value_(v) {}

    std::variant<KnownN0, PlugInMultiplier> value_;
};

/// Mean and standard deviation of a Beta(alpha, beta) variate.
struct BetaSummary {
    double mean = 0.0;
    double sd = 0.0;
};

}  // namespace accrual
