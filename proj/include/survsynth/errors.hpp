#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace survsynth {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed map, config, spec or partition text. Positions are 1-based.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line, std::size_t column)
        : Error(what + " (line " + std::to_string(line) + ", column " + std::to_string(column) + ")"),
          line_(line),
          column_(column) {}

    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

// A state or iteration cap was hit. Never reported as a verdict.
class BudgetExceeded : public Error {
public:
    BudgetExceeded(const std::string& what, std::size_t limit)
        : Error(what + " (limit " + std::to_string(limit) + ")"), limit_(limit) {}

    std::size_t limit() const { return limit_; }

private:
    std::size_t limit_;
};

}  // namespace survsynth
