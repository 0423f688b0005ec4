#pragma once

#include <stdexcept>
#include <string>

namespace reflab {

/// Malformed query, parameter out of range, or NaN input.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A step that cannot be applied to the state it was proposed on.
class TransitionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Sudoku blank with no remaining candidate.
class DeadEndError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parameters under which a correct answer is never produced.
class NoSolutionError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// JSONL / CSV decoding failure. `line()` is 1-based, 0 when unknown.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& what)
        : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

}  // namespace reflab
