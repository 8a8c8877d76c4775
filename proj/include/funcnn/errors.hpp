#pragma once

#include <stdexcept>
#include <string>

namespace funcnn {

// Numerical breakdown: failed factorizations, singular systems, diverged fits.
class numeric_error : public std::runtime_error {
public:
    explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

// File could not be opened / read / written.
class io_error : public std::runtime_error {
public:
    explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed input file; carries the 1-based row and column of the offending field.
class parse_error : public std::runtime_error {
public:
    parse_error(const std::string& what, std::size_t row, std::size_t column)
        : std::runtime_error(what + " (row " + std::to_string(row) +
                             ", column " + std::to_string(column) + ")"),
          row_(row),
          column_(column) {}

    std::size_t row() const { return row_; }
    std::size_t column() const { return column_; }

private:
    std::size_t row_;
    std::size_t column_;
};

// Bad run configuration (unknown keys, invalid values, unknown names).
// The CLI maps this to the usage exit code.
class config_error : public std::runtime_error {
public:
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace funcnn
