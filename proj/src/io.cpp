// Apache License, Version 2.0, refer to LICENSE.txt

#include "accrual/io.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <utility>

#include "accrual/error.hpp"

namespace accrual {

namespace {

struct Line {
    std::size_t number;
    std::string_view text;
};

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

// Non-blank lines with 1-based numbers; a leading UTF-8 BOM is dropped.
std::vector<Line> split_lines(std::string_view text) {
    if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);
    std::vector<Line> lines;
    std::size_t number = 0;
    while (!text.empty()) {
        ++number;
        const auto end = text.find('\n');
        const auto raw = text.substr(0, end);
        if (const auto t = trim(raw); !t.empty()) lines.push_back({number, t});
        if (end == std::string_view::npos) break;
        text.remove_prefix(end + 1);
    }
    return lines;
}

std::vector<std::string_view> split_fields(std::string_view row) {
    std::vector<std::string_view> fields;
    while (true) {
        const auto comma = row.find(',');
        fields.push_back(trim(row.substr(0, comma)));
        if (comma == std::string_view::npos) break;
        row.remove_prefix(comma + 1);
    }
    return fields;
}

std::int64_t parse_integer(std::string_view field, std::size_t line, const char* what) {
    std::int64_t value = 0;
    const auto* first = field.data();
    const auto* last = field.data() + field.size();
    if (!field.empty() && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (field.empty() || ec != std::errc{} || ptr != last)
        throw ParseError(line, std::string("malformed ") + what + " '" + std::string(field) + "'");
    return value;
}

void expect_header(const std::vector<Line>& lines, std::string_view header) {
    if (lines.empty()) throw ParseError(1, "missing header '" + std::string(header) + "'");
    std::string got;
    for (const auto f : split_fields(lines.front().text)) {
        if (!got.empty()) got += ',';
        got += f;
    }
    if (got != header)
        throw ParseError(lines.front().number,
                         "expected header '" + std::string(header) + "', got '" + got + "'");
}

}  // namespace

DailyCounts parse_daily_counts(std::string_view text) {
    const auto lines = split_lines(text);
    expect_header(lines, "day,count");
    std::map<std::int64_t, std::int64_t> by_day;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto& line = lines[i];
        const auto fields = split_fields(line.text);
        if (fields.size() != 2)
            throw ParseError(line.number, "expected 2 fields, got " + std::to_string(fields.size()));
        const auto day = parse_integer(fields[0], line.number, "day");
        const auto count = parse_integer(fields[1], line.number, "count");
        if (day < 1) throw ParseError(line.number, "day must be >= 1, got " + std::to_string(day));
        if (count < 0)
            throw ParseError(line.number, "negative count " + std::to_string(count) + " on day " +
                                              std::to_string(day));
        if (!by_day.emplace(day, count).second)
            throw ParseError(line.number, "duplicate day " + std::to_string(day));
    }
    const std::size_t last_line = lines.back().number;
    if (by_day.empty()) throw ParseError(last_line, "no data rows");
    std::vector<std::int64_t> counts;
    std::int64_t expected = 1;
    for (const auto& [day, count] : by_day) {
        if (day != expected) throw ParseError(last_line, "missing day " + std::to_string(expected));
        counts.push_back(count);
        ++expected;
    }
    return DailyCounts(std::move(counts));
}

std::string format_daily_counts_csv(std::span<const std::int64_t> counts) {
    std::string out = "day,count\n";
    for (std::size_t t = 0; t < counts.size(); ++t)
        out += std::to_string(t + 1) + "," + std::to_string(counts[t]) + "\n";
    return out;
}

std::vector<TruthRow> parse_truth_csv(std::string_view text) {
    const auto lines = split_lines(text);
    expect_header(lines, "experiment_id,week,actual_new");
    std::vector<TruthRow> rows;
    std::set<std::pair<std::string, int>> seen;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto& line = lines[i];
        const auto fields = split_fields(line.text);
        if (fields.size() != 3)
            throw ParseError(line.number, "expected 3 fields, got " + std::to_string(fields.size()));
        if (fields[0].empty()) throw ParseError(line.number, "empty experiment_id");
        const auto week = parse_integer(fields[1], line.number, "week");
        const auto actual = parse_integer(fields[2], line.number, "actual_new");
        if (week < 2 || week > 100000)
            throw ParseError(line.number, "week must be in 2..100000, got " + std::to_string(week));
        if (actual < 0) throw ParseError(line.number, "negative actual_new " + std::to_string(actual));
        TruthRow row{std::string(fields[0]), static_cast<int>(week), actual};
        if (!seen.emplace(row.experiment_id, row.week).second)
            throw ParseError(line.number,
                             "duplicate week " + std::to_string(week) + " for " + row.experiment_id);
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string format_truth_csv(std::span<const TruthRow> rows) {
    std::string out = "experiment_id,week,actual_new\n";
    for (const auto& r : rows)
        out += r.experiment_id + "," + std::to_string(r.week) + "," + std::to_string(r.actual_new) + "\n";
    return out;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot read " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (in.bad()) throw DataError("error reading " + path.string());
    return buffer.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + path.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw DataError("error writing " + path.string());
}

}  // namespace accrual
