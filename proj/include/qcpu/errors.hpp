#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qcpu {

/// Input that fails to parse or violates a file-format contract.
/// Carries the 1-based source line when one is known (0 otherwise).
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& message, std::size_t line = 0)
        : std::runtime_error(line ? "line " + std::to_string(line) + ": " + message : message),
          line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// A request that would exceed a width or memory guard.
class ResourceLimitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace qcpu
