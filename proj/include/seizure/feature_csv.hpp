#pragma once

// Feature table CSV: an optional run of '#' provenance lines, a header naming
// every `<band>_<stat>` column followed by `label`, then one row per segment.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "seizure/error.hpp"
#include "seizure/features.hpp"
#include "seizure/matrix.hpp"

namespace seizure {

struct FeatureTable {
    std::vector<std::string> columns;  // feature columns, label excluded
    Matrix rows;
    std::vector<std::string> labels;
    std::vector<std::string> comments;  // provenance lines without the leading "# "
};

inline std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void write_feature_csv(std::ostream& os, const FeatureTable& t) {
    for (const auto& c : t.comments) os << "# " << c << '\n';
    for (const auto& c : t.columns) os << c << ',';
    os << "label\n";
    for (std::size_t i = 0; i < t.rows.rows(); ++i) {
        for (double v : t.rows.row(i)) os << format_real(v) << ',';
        os << t.labels[i] << '\n';
    }
}

inline void write_feature_csv(const std::filesystem::path& path, const FeatureTable& t) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw DataError("io", path.string() + ": cannot write");
    write_feature_csv(os, t);
    if (!os) throw DataError("io", path.string() + ": write failed");
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

}  // namespace detail

// Reads and validates a feature CSV. When `expected_columns` is non-empty the
// header must match it exactly.
inline FeatureTable read_feature_csv(const std::filesystem::path& path,
                                     const std::vector<std::string>& expected_columns = feature_names(4)) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw SchemaError(path.string(), "cannot open file");
    const std::string file = path.string();

    FeatureTable t;
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            if (!have_header) t.comments.push_back(line.size() > 2 ? line.substr(2) : "");
            continue;
        }
        auto cells = detail::split_csv_line(line);
        if (!have_header) {
            if (cells.empty() || cells.back() != "label") throw SchemaError(file, "last header column must be 'label'");
            cells.pop_back();
            if (!expected_columns.empty()) {
                if (cells.size() != expected_columns.size())
                    throw SchemaError(file, "header has " + std::to_string(cells.size()) + " feature columns, expected " +
                                                std::to_string(expected_columns.size()));
                for (std::size_t j = 0; j < cells.size(); ++j)
                    if (cells[j] != expected_columns[j])
                        throw SchemaError(file, "column " + std::to_string(j + 1) + " is '" + cells[j] + "', expected '" +
                                                    expected_columns[j] + "'");
            }
            t.columns = std::move(cells);
            t.rows = Matrix(0, t.columns.size());
            have_header = true;
            continue;
        }
        if (cells.size() != t.columns.size() + 1)
            throw SchemaError(file, "line " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                                        " cells, expected " + std::to_string(t.columns.size() + 1));
        std::vector<double> row(t.columns.size());
        for (std::size_t j = 0; j < row.size(); ++j) {
            const auto v = detail::parse_number(cells[j]);
            if (!v)
                throw SchemaError(file, "line " + std::to_string(line_no) + ", column '" + t.columns[j] +
                                            "': invalid value '" + cells[j] + "'");
            row[j] = *v;
        }
        t.rows.append_row(row);
        t.labels.push_back(cells.back());
    }
    if (!have_header) throw SchemaError(file, "missing header row");
    return t;
}

}  // namespace seizure
