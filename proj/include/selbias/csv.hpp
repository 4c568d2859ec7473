#pragma once

// Minimal numeric CSV: one header row, comma separated, every data cell a
// number. Header cells may be double-quoted (as written by R's write.csv).

#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "selbias/dataset.hpp"
#include "selbias/errors.hpp"

namespace selbias {

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> columns;  // columns[c][row]
    std::vector<std::size_t> line_of_row;      // 1-based source line of each row

    std::size_t rows() const { return columns.empty() ? 0 : columns.front().size(); }

    // Index of a named column, or invalid_input naming the missing column.
    std::size_t index(std::string_view name) const {
        for (std::size_t c = 0; c < header.size(); ++c) {
            if (header[c] == name) return c;
        }
        throw Error(ErrorCode::invalid_input, "column '" + std::string(name) + "' not found in CSV header",
                    std::string(name));
    }

    bool has(std::string_view name) const {
        for (const auto& h : header) {
            if (h == name) return true;
        }
        return false;
    }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t comma = line.find(',', start);
        out.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                                             : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

[[noreturn]] inline void parse_fail(std::size_t line, const std::string& message) {
    throw Error(ErrorCode::parse, "line " + std::to_string(line) + ": " + message,
                "line " + std::to_string(line));
}

inline double parse_number(std::string_view cell, std::size_t line) {
    double value = 0.0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    if (!cell.empty() && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (cell.empty() || ec != std::errc() || ptr != last || !std::isfinite(value)) {
        parse_fail(line, "'" + std::string(cell) + "' is not a number");
    }
    return value;
}

// Shortest text that reads back to the same double.
inline std::string format_number(double x) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, ptr);
}

}  // namespace detail

inline CsvTable parse_csv(std::string_view text) {
    CsvTable table;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    bool have_header = false;
    while (pos <= text.size()) {
        const std::size_t nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        if (detail::trim(line).empty()) continue;

        auto cells = detail::split_commas(line);
        if (!have_header) {
            if (line_no == 1 && line.size() >= 3 && line.substr(0, 3) == "\xEF\xBB\xBF") {
                cells = detail::split_commas(line.substr(3));
            }
            for (auto c : cells) {
                if (c.size() >= 2 && c.front() == '"' && c.back() == '"') c = c.substr(1, c.size() - 2);
                if (c.empty()) detail::parse_fail(line_no, "empty column name in header");
                table.header.emplace_back(c);
            }
            table.columns.resize(table.header.size());
            have_header = true;
            continue;
        }
        if (cells.size() != table.header.size()) {
            detail::parse_fail(line_no, "expected " + std::to_string(table.header.size()) + " fields, found " +
                                            std::to_string(cells.size()));
        }
        for (std::size_t c = 0; c < cells.size(); ++c) {
            table.columns[c].push_back(detail::parse_number(cells[c], line_no));
        }
        table.line_of_row.push_back(line_no);
    }
    if (!have_header) detail::parse_fail(line_no == 0 ? 1 : line_no, "missing header row");
    return table;
}

inline CsvTable read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::parse, "cannot open '" + path + "'", "path");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_csv(buf.str());
}

inline std::string format_csv(const CsvTable& table) {
    std::string out;
    for (std::size_t c = 0; c < table.header.size(); ++c) {
        if (c) out += ',';
        out += table.header[c];
    }
    out += '\n';
    for (std::size_t r = 0; r < table.rows(); ++r) {
        for (std::size_t c = 0; c < table.columns.size(); ++c) {
            if (c) out += ',';
            out += detail::format_number(table.columns[c][r]);
        }
        out += '\n';
    }
    return out;
}

inline void write_csv(const CsvTable& table, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::parse, "cannot write '" + path + "'", "path");
    out << format_csv(table);
}

// A 0/1 column; any other value is a parse error at its source line.
inline BinaryColumn binary_column(const CsvTable& table, std::string_view name) {
    const std::size_t c = table.index(name);
    BinaryColumn out(table.rows());
    for (std::size_t r = 0; r < table.rows(); ++r) {
        const double x = table.columns[c][r];
        if (x != 0.0 && x != 1.0) {
            detail::parse_fail(table.line_of_row[r], "column '" + std::string(name) + "' has non-binary value " +
                                                         detail::format_number(x));
        }
        out[r] = static_cast<std::uint8_t>(x);
    }
    return out;
}

inline std::vector<int> integer_column(const CsvTable& table, std::string_view name) {
    const std::size_t c = table.index(name);
    std::vector<int> out(table.rows());
    for (std::size_t r = 0; r < table.rows(); ++r) {
        const double x = table.columns[c][r];
        if (x != std::trunc(x) || std::abs(x) > 1e9) {
            detail::parse_fail(table.line_of_row[r], "column '" + std::string(name) + "' has non-integer value " +
                                                         detail::format_number(x));
        }
        out[r] = static_cast<int>(x);
    }
    return out;
}

// Columns zika, mic_ceph, birth, hospital, sel_3.., sel_ind, urban, ses.
inline CsvTable dataset_to_table(const Dataset& data) {
    data.validate();
    CsvTable t;
    auto add = [&](std::string name, const auto& col) {
        t.header.push_back(std::move(name));
        t.columns.emplace_back(col.begin(), col.end());
    };
    add("zika", data.zika);
    add("mic_ceph", data.mic_ceph);
    for (std::size_t k = 0; k < data.selections.size(); ++k) add(selection_column_name(k), data.selections[k]);
    add("sel_ind", data.sel_ind);
    add("urban", data.urban);
    add("ses", data.ses);
    t.line_of_row.resize(data.rows());
    for (std::size_t r = 0; r < data.rows(); ++r) t.line_of_row[r] = r + 2;
    return t;
}

inline Dataset table_to_dataset(const CsvTable& table) {
    Dataset d;
    d.zika = binary_column(table, "zika");
    d.mic_ceph = binary_column(table, "mic_ceph");
    for (std::size_t k = 0; table.has(selection_column_name(k)); ++k) {
        d.selections.push_back(binary_column(table, selection_column_name(k)));
    }
    d.sel_ind = binary_column(table, "sel_ind");
    d.urban = integer_column(table, "urban");
    d.ses = integer_column(table, "ses");
    for (std::size_t r = 0; r < d.rows(); ++r) {
        std::uint8_t all = 1;
        for (const auto& s : d.selections) all &= s[r];
        if (!d.selections.empty() && all != d.sel_ind[r]) {
            detail::parse_fail(table.line_of_row[r], "sel_ind is not the product of the selection columns");
        }
    }
    return d;
}

}  // namespace selbias
