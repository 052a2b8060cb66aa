#pragma once

#include <stdexcept>
#include <string>

namespace driftsim {

// Rejected configuration. Carries the offending field ("section.key") so the
// CLI can name it before exiting with code 2.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& reason)
        : std::runtime_error(field + ": " + reason), field_(std::move(field)) {}

    const std::string& field() const { return field_; }

private:
    std::string field_;
};

// Failure after configuration was accepted (bad input file, unwritable
// output path). CLI exit code 3.
class RunError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace driftsim
