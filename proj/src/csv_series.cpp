#include "mixar/csv_series.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <vector>

namespace mixar {

namespace {

std::vector<std::string> split_row(const std::string& line) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        std::string cell = line.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        const auto first = cell.find_first_not_of(" \t\r\"");
        const auto last = cell.find_last_not_of(" \t\r\"");
        cells.push_back(first == std::string::npos ? std::string() : cell.substr(first, last - first + 1));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return cells;
}

std::optional<double> parse_number(const std::string& cell) {
    if (cell.empty()) return std::nullopt;
    const char* begin = cell.data();
    if (*begin == '+') ++begin;
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(begin, cell.data() + cell.size(), value);
    if (ec != std::errc() || ptr != cell.data() + cell.size()) return std::nullopt;
    if (!std::isfinite(value)) return std::nullopt;
    return value;
}

std::optional<std::size_t> parse_index(const std::string& s) {
    std::size_t value = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
    return value;
}

}  // namespace

Series read_series(std::istream& in, const std::optional<std::string>& column) {
    Series out;
    std::string line;
    std::size_t line_no = 0;
    bool first_row = true;
    std::optional<std::size_t> index = column ? parse_index(*column) : std::nullopt;

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto first_char = line.find_first_not_of(" \t");
        if (first_char == std::string::npos || line[first_char] == '#') continue;

        const auto cells = split_row(line);
        if (first_row) {
            first_row = false;
            if (column && !index) {
                const auto it = std::find(cells.begin(), cells.end(), *column);
                if (it == cells.end()) {
                    throw ParseError("column '" + *column + "' not found in header on line " +
                                         std::to_string(line_no),
                                     line_no);
                }
                index = static_cast<std::size_t>(it - cells.begin());
                continue;
            }
            if (!index) index = cells.size() - 1;
            if (*index < cells.size() && !parse_number(cells[*index])) continue;  // header
        }
        if (*index >= cells.size()) {
            throw ParseError("line " + std::to_string(line_no) + ": missing column " +
                                 std::to_string(*index),
                             line_no);
        }
        const auto value = parse_number(cells[*index]);
        if (!value) {
            throw ParseError("line " + std::to_string(line_no) + ": cannot parse '" + cells[*index] +
                                 "' as a number",
                             line_no);
        }
        out.push_back(*value);
    }
    if (out.empty()) throw InvalidInput("input contains no observations");
    return out;
}

}  // namespace mixar
