#pragma once

#include <stdexcept>
#include <string>

namespace parapack {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Parameter set or configuration violates an invariant. `field()` names the offending entry.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& what)
        : std::runtime_error(field.empty() ? what : field + ": " + what), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// Numerical failure inside the module simulation (Newton stagnation, step rejection).
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Statistical routine could not proceed (rank deficiency, bad shapes).
class StatsError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace parapack
