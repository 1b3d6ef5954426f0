// Price-series ingestion and log-return construction.

#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <compare>
#include <cstdio>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "copex/errors.hpp"
#include "copex/estimation.hpp"

namespace copex {

struct Date {
    int year = 0;
    int month = 0;
    int day = 0;

    auto operator<=>(const Date&) const = default;

    std::string to_string() const {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", year, month, day);
        return buf;
    }

    /// Strict ISO-8601 (YYYY-MM-DD) parse; returns nullopt on any deviation.
    static std::optional<Date> parse(std::string_view text) {
        if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
        const auto digits = [](std::string_view s, int& out) {
            const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
            return ec == std::errc{} && ptr == s.data() + s.size();
        };
        Date d;
        if (!digits(text.substr(0, 4), d.year) || !digits(text.substr(5, 2), d.month) ||
            !digits(text.substr(8, 2), d.day))
            return std::nullopt;
        if (d.month < 1 || d.month > 12 || d.day < 1 || d.day > 31) return std::nullopt;
        return d;
    }
};

struct PriceRow {
    Date date;
    double s1 = 0.0;
    double s2 = 0.0;
};

struct PriceSeries {
    std::vector<PriceRow> rows;
    int unsorted_warnings = 0; // out-of-order input rows, sorted on ingest
};

namespace detail {

inline bool parse_price(std::string_view text, double& out) {
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    return ec == std::errc{} && ptr == text.data() + text.size() && std::isfinite(out);
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    return s;
}

} // namespace detail

/// Parses a `date,s1,s2` CSV. Rows are sorted by date (out-of-order input is
/// accepted with a counted warning); duplicate dates, malformed fields and
/// nonpositive prices are row-numbered errors.
inline PriceSeries ingest_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) raise(Errc::EmptySeries, "ingest_csv: empty input");
    // Tolerate a UTF-8 BOM in front of the header.
    std::string_view header = line;
    if (header.starts_with("\xEF\xBB\xBF")) header.remove_prefix(3);
    if (detail::trim(header) != "date,s1,s2")
        raise(Errc::ParseError, "row 1: expected header 'date,s1,s2', got '" + std::string(detail::trim(header)) + "'");

    PriceSeries series;
    int row_number = 1;
    while (std::getline(in, line)) {
        ++row_number;
        std::string_view sv = detail::trim(line);
        if (sv.empty()) continue;
        const auto c1 = sv.find(',');
        const auto c2 = c1 == std::string_view::npos ? std::string_view::npos : sv.find(',', c1 + 1);
        if (c1 == std::string_view::npos || c2 == std::string_view::npos || sv.find(',', c2 + 1) != std::string_view::npos)
            raise(Errc::ParseError, "row " + std::to_string(row_number) + ": expected 3 comma-separated fields");

        PriceRow row;
        const auto date = Date::parse(detail::trim(sv.substr(0, c1)));
        if (!date)
            raise(Errc::ParseError, "row " + std::to_string(row_number) + ", column date: not an ISO date (YYYY-MM-DD)");
        row.date = *date;
        if (!detail::parse_price(detail::trim(sv.substr(c1 + 1, c2 - c1 - 1)), row.s1))
            raise(Errc::ParseError, "row " + std::to_string(row_number) + ", column s1: not a number");
        if (!detail::parse_price(detail::trim(sv.substr(c2 + 1)), row.s2))
            raise(Errc::ParseError, "row " + std::to_string(row_number) + ", column s2: not a number");
        if (!(row.s1 > 0.0))
            raise(Errc::ParseError, "row " + std::to_string(row_number) + ", column s1: price must be > 0");
        if (!(row.s2 > 0.0))
            raise(Errc::ParseError, "row " + std::to_string(row_number) + ", column s2: price must be > 0");
        series.rows.push_back(row);
    }
    if (series.rows.empty()) raise(Errc::EmptySeries, "ingest_csv: no data rows");

    for (std::size_t i = 1; i < series.rows.size(); ++i)
        if (series.rows[i].date < series.rows[i - 1].date) ++series.unsorted_warnings;
    std::stable_sort(series.rows.begin(), series.rows.end(),
                     [](const PriceRow& a, const PriceRow& b) { return a.date < b.date; });
    for (std::size_t i = 1; i < series.rows.size(); ++i)
        if (series.rows[i].date == series.rows[i - 1].date)
            raise(Errc::ParseError, "duplicate date " + series.rows[i].date.to_string());
    return series;
}

inline PriceSeries ingest_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) raise(Errc::ParseError, "cannot open '" + path + "'");
    return ingest_csv(in);
}

/// Rows with dates inside [first, last], order preserved.
inline PriceSeries slice(const PriceSeries& series, Date first, Date last) {
    PriceSeries out;
    out.unsorted_warnings = series.unsorted_warnings;
    for (const PriceRow& row : series.rows)
        if (!(row.date < first) && !(last < row.date)) out.rows.push_back(row);
    return out;
}

/// Consecutive log price ratios: x_k = ln(s(k+1)/s(k)); one row shorter than
/// the input series.
inline ReturnPanel compute_log_returns(const PriceSeries& series) {
    if (series.rows.size() < 2)
        raise(Errc::InsufficientData, "compute_log_returns: needs at least 2 rows, got " +
                                          std::to_string(series.rows.size()));
    ReturnPanel panel;
    panel.rows.reserve(series.rows.size() - 1);
    for (std::size_t i = 1; i < series.rows.size(); ++i) {
        panel.rows.push_back({std::log(series.rows[i].s1 / series.rows[i - 1].s1),
                              std::log(series.rows[i].s2 / series.rows[i - 1].s2)});
    }
    return panel;
}

} // namespace copex
