#pragma once

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ionspec {

/// Base error. Carries the module that raised it so the CLI can report context.
class Error : public std::runtime_error {
public:
    Error(std::string module, const std::string& what)
        : std::runtime_error(module + ": " + what), module_(std::move(module)) {}
    const std::string& module() const { return module_; }

private:
    std::string module_;
};

struct SolverError : Error { using Error::Error; };
struct ChainUnstableError : Error { using Error::Error; };
struct DegenerateModesError : Error { using Error::Error; };
struct PerturbativeRegimeError : Error { using Error::Error; };
struct NearResonanceError : Error { using Error::Error; };
struct SizeError : Error { using Error::Error; };
struct PropagatorAccuracyError : Error { using Error::Error; };
struct NumericalConsistencyError : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };

struct Warning {
    std::string module;
    std::string message;
};

// Process-wide warning channel. Warnings never abort a run; the CLI copies
// them into the manifest.
void warn(const std::string& module, const std::string& message);
std::vector<Warning> drain_warnings();

// Runs fn(i) for i in [0, n) on up to `threads` workers. Each index must write
// to its own output slot, which keeps results independent of the schedule.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace ionspec
