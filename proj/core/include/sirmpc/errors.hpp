#pragma once

#include <stdexcept>
#include <string>

namespace sirmpc {

/// Raised when a fixed-step integration produces an invalid state
/// (component negative beyond round-off, or conservation defect above
/// tolerance). Carries the time at which the step failed.
class IntegrationError : public std::runtime_error {
public:
    IntegrationError(const std::string& what, double tau)
        : std::runtime_error(what), tau_(tau)
    {
    }

    double tau() const { return tau_; }

private:
    double tau_;
};

/// Raised by scenario-config parsing. Carries the 1-based line number of
/// the offending entry (0 when the error is not tied to a line).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what, int line = 0)
        : std::runtime_error(what), line_(line)
    {
    }

    int line() const { return line_; }

private:
    int line_;
};

} // namespace sirmpc
