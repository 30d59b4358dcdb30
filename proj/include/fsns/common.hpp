#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace fsns {

inline constexpr double pi = 3.14159265358979323846;

/// Bad user-supplied configuration (CLI exit code 2).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// A caller violated an API precondition (programming error, not user error).
struct ContractError : std::logic_error {
    explicit ContractError(const std::string& msg) : std::logic_error(msg) {}
};

/// A runtime health monitor tripped (CLI exit code 3): NaN state, density
/// out of band, chart degeneracy.
struct HealthError : std::runtime_error {
    explicit HealthError(const std::string& msg) : std::runtime_error(msg) {}
};

inline bool all_finite(const std::vector<double>& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

}  // namespace fsns
