// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "accrual/types.hpp"

namespace accrual {

/// CSV with header `day,count` and one row per day 1..d, in any order.
/// LF or CRLF line endings; blank lines are skipped. Throws ParseError with
/// the offending line number.
DailyCounts parse_daily_counts(std::string_view text);

/// Inverse of parse_daily_counts(), rows in day order, LF endings.
std::string format_daily_counts_csv(std::span<const std::int64_t> counts);

struct TruthRow {
    std::string experiment_id;
    int week = 0;
    std::int64_t actual_new = 0;
};

/// CSV with header `experiment_id,week,actual_new`; week >= 2, actual_new >= 0,
/// each (experiment_id, week) at most once.
std::vector<TruthRow> parse_truth_csv(std::string_view text);

std::string format_truth_csv(std::span<const TruthRow> rows);

/// Whole file as a string. Throws DataError if it cannot be read.
std::string read_text_file(const std::filesystem::path& path);

/// Throws DataError if the file cannot be written.
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace accrual
