#pragma once

#include "mixar/errors.hpp"
#include "mixar/lagpoly.hpp"

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>

namespace mixar {

/// Malformed cell in a series file; line() is 1-based.
class ParseError : public InvalidInput {
public:
    ParseError(const std::string& what, std::size_t line) : InvalidInput(what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/**
 * Reads one numeric column from comma-separated text. Lines starting with '#'
 * and blank lines are skipped. A first row whose selected cell is not numeric
 * is taken as a header. `column` is a zero-based index or a header name; by
 * default the last column is used, so a leading date column is ignored.
 */
Series read_series(std::istream& in, const std::optional<std::string>& column = std::nullopt);

}  // namespace mixar
