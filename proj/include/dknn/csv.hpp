#pragma once

// Point CSV: one row per observation, d feature columns then an integer label
// column. The header row is optional and flag-controlled.

#include "core.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

namespace dknn
{

namespace csv
{

/// Splits a row on `delim` (or on runs of blanks when delim is ' '), trimming
/// blanks and one pair of surrounding double quotes per field.
inline std::vector<std::string> split_row(std::string_view line, char delim)
{
    std::vector<std::string> out;
    auto push = [&](std::string_view f) {
        const auto b = f.find_first_not_of(" \t\r");
        const auto e = f.find_last_not_of(" \t\r");
        f = b == std::string_view::npos ? std::string_view{} : f.substr(b, e - b + 1);
        if (f.size() >= 2 && f.front() == '"' && f.back() == '"')
            f = f.substr(1, f.size() - 2);
        out.emplace_back(f);
    };
    if (delim == ' ') {
        std::size_t i = 0;
        while (i < line.size()) {
            while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r'))
                ++i;
            if (i >= line.size())
                break;
            const std::size_t j = line.find_first_of(" \t\r", i);
            push(line.substr(i, j == std::string_view::npos ? std::string_view::npos : j - i));
            i = j == std::string_view::npos ? line.size() : j;
        }
        return out;
    }
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == delim) {
            push(line.substr(start, i - start));
            start = i + 1;
        }
    }
    return out;
}

inline bool parse_double(std::string_view s, double& out)
{
    if (!s.empty() && s.front() == '+')
        s.remove_prefix(1);
    const auto r = std::from_chars(s.data(), s.data() + s.size(), out);
    return r.ec == std::errc{} && r.ptr == s.data() + s.size();
}

inline double to_double(std::string_view s, std::size_t row)
{
    double v;
    if (!parse_double(s, v))
        throw ValidationError("csv row " + std::to_string(row) + ": not a number: '" + std::string(s) + "'");
    return v;
}

inline int to_label(std::string_view s, std::size_t row)
{
    double v;
    if (!parse_double(s, v) || (v != 0.0 && v != 1.0))
        throw ValidationError("csv row " + std::to_string(row) + ": label must be 0 or 1, got '" + std::string(s) +
                              "'");
    return static_cast<int>(v);
}

struct Table
{
    std::vector<std::string> header; // empty when the file has none
    std::vector<std::vector<std::string>> rows;
};

inline Table read_table(std::istream& in, bool has_header, char delim = ',')
{
    Table t;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        auto fields = split_row(line, delim);
        if (first && has_header)
            t.header = std::move(fields);
        else
            t.rows.push_back(std::move(fields));
        first = false;
    }
    return t;
}

inline std::ifstream open_input(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ValidationError("cannot open '" + path + "'");
    return in;
}

} // namespace csv

/// Labeled points: every row holds d >= 1 features followed by the label.
inline LabeledSample read_labeled_csv(std::istream& in, bool has_header)
{
    const auto t = csv::read_table(in, has_header);
    if (t.rows.empty())
        throw InsufficientDataError("csv: no data rows");
    const std::size_t cols = t.rows.front().size();
    if (cols < 2)
        throw ValidationError("csv: need at least one feature column and a label column");
    std::vector<Point> pts;
    std::vector<int> labels;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& row = t.rows[r];
        if (row.size() != cols)
            throw ValidationError("csv row " + std::to_string(r + 1) + ": expected " + std::to_string(cols) +
                                  " columns, got " + std::to_string(row.size()));
        Point p(static_cast<Eigen::Index>(cols - 1));
        for (std::size_t c = 0; c + 1 < cols; ++c)
            p[static_cast<Eigen::Index>(c)] = csv::to_double(row[c], r + 1);
        pts.push_back(std::move(p));
        labels.push_back(csv::to_label(row.back(), r + 1));
    }
    return LabeledSample(std::move(pts), std::move(labels));
}

inline LabeledSample read_labeled_csv(const std::string& path, bool has_header)
{
    auto in = csv::open_input(path);
    return read_labeled_csv(in, has_header);
}

/// Unlabeled points: every column is a feature.
inline std::vector<Point> read_points_csv(std::istream& in, bool has_header)
{
    const auto t = csv::read_table(in, has_header);
    if (t.rows.empty())
        throw InsufficientDataError("csv: no data rows");
    const std::size_t cols = t.rows.front().size();
    std::vector<Point> pts;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& row = t.rows[r];
        if (row.size() != cols)
            throw ValidationError("csv row " + std::to_string(r + 1) + ": expected " + std::to_string(cols) +
                                  " columns, got " + std::to_string(row.size()));
        Point p(static_cast<Eigen::Index>(cols));
        for (std::size_t c = 0; c < cols; ++c)
            p[static_cast<Eigen::Index>(c)] = csv::to_double(row[c], r + 1);
        pts.push_back(std::move(p));
    }
    return pts;
}

inline std::vector<Point> read_points_csv(const std::string& path, bool has_header)
{
    auto in = csv::open_input(path);
    return read_points_csv(in, has_header);
}

/// Comma-separated coordinates, e.g. "0.5,-1".
inline Point parse_point(std::string_view text)
{
    const auto fields = csv::split_row(text, ',');
    Point p(static_cast<Eigen::Index>(fields.size()));
    for (std::size_t i = 0; i < fields.size(); ++i)
        if (!csv::parse_double(fields[i], p[static_cast<Eigen::Index>(i)]))
            throw ValidationError("point: not a number: '" + fields[i] + "'");
    require_finite(p, "point");
    return p;
}

/// Shortest text that reads back to the same double.
inline std::string format_double(double v)
{
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

inline void write_labeled_csv(std::ostream& out, const LabeledSample& s, bool header)
{
    if (header) {
        for (Eigen::Index c = 0; c < s.dim(); ++c)
            out << 'x' << (c + 1) << ',';
        out << "label\n";
    }
    for (std::size_t i = 0; i < s.size(); ++i) {
        for (Eigen::Index c = 0; c < s.dim(); ++c)
            out << format_double(s.point(i)[c]) << ',';
        out << s.label(i) << '\n';
    }
}

} // namespace dknn
