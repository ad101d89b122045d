#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace hdvp {

/// Malformed or inconsistent configuration input (CLI exit code 2).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// A world-model invariant broke mid-run (CLI exit code 3). Carries the tick.
class SimulationError : public std::runtime_error {
public:
    SimulationError(std::int64_t tick, const std::string& msg)
        : std::runtime_error("tick " + std::to_string(tick) + ": " + msg), tick_(tick) {}
    std::int64_t tick() const { return tick_; }

private:
    std::int64_t tick_ = 0;
};

/// Analytically infeasible request, e.g. a band too narrow for one slot (CLI exit code 4).
class InfeasibleError : public std::runtime_error {
public:
    explicit InfeasibleError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace hdvp
