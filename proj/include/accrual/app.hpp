// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "accrual/error.hpp"
#include "accrual/forecast.hpp"

namespace accrual {

enum class Command { forecast, sweep_lambda, batch_eval, simulate };
enum class OutputFormat { json, csv };

inline constexpr int kSchemaVersion = 1;

/// Inclusive range; lo == hi for a fixed value.
struct ValueRange {
    double lo = 0.0;
    double hi = 0.0;
};

struct RunConfig {
    Command command = Command::forecast;
    std::string input;
    /// First-period length. Inputs with more days use only the first d.
    int d = 7;
    std::vector<std::int64_t> horizons{7, 14, 21, 28};
    std::optional<double> lambda;
    std::optional<std::int64_t> n0;
    std::int64_t n_draws = 1000;
    std::uint64_t seed = 0;
    OutputFormat format = OutputFormat::json;
    bool emit_draws = false;
    int workers = 1;
    std::string out;

    // sweep-lambda
    std::vector<double> lambda_grid;
    std::int64_t sweep_horizon = 7;

    // batch-eval
    std::string corpus;
    std::string truth;

    // simulate
    ValueRange alpha{2.0, 2.0};
    ValueRange beta{50.0, 50.0};
    std::int64_t population = 100000;
    int total_days = 35;
    int experiments = 0;
};

struct RunResult {
    int exit_code = 0;
    /// Report or structured error, newline-terminated.
    std::string output;
};

/// Exit code for each error class; 0 means a report was produced.
int exit_code_for(ErrorKind kind) noexcept;

/// `{"error": {"class": ..., "message": ...}}` plus newline.
std::string error_report(std::string_view error_class, std::string_view message);

/// "a:b" (step 1), "a:b:step" or a comma-separated list. Throws RequestError.
std::vector<double> parse_lambda_grid(std::string_view text);

/// Comma-separated integers. Throws RequestError.
std::vector<std::int64_t> parse_horizons(std::string_view text);

/// "x" or "lo:hi". Throws RequestError.
ValueRange parse_value_range(std::string_view text);

/// Median spread (max - min) / min over the upper half of an ascending
/// lambda grid (the last ceil(m/2) entries).
double plateau_relative_change(const std::vector<double>& medians);

/// Runs one command. Library errors are caught and returned as error reports.
RunResult run(const RunConfig& cfg);

/// Each runner throws on failure; run() wraps them.
std::string run_forecast(const RunConfig& cfg);
std::string run_lambda_sweep(const RunConfig& cfg);
std::string run_batch_eval(const RunConfig& cfg);
std::string run_simulate(const RunConfig& cfg);

}  // namespace accrual
