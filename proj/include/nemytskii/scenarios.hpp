#pragma once

// Named experiments run from a parsed Scenario. Every artifact is written
// as `<name>.partial` and renamed only once the scenario finishes.

#include "nemytskii/coefficients.hpp"
#include "nemytskii/config.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace nemytskii {

enum ExitCode : int { kExitOk = 0, kExitError = 1, kExitCheckFailed = 2 };

struct RunOptions {
    std::filesystem::path output_dir = ".";
    std::optional<std::uint64_t> seed_override;
};

struct RunOutcome {
    int exit_code = kExitError;
    std::vector<std::filesystem::path> artifacts;
    std::string error;  ///< set when exit_code == kExitError
};

NonlinearitySpec make_nonlinearity(const Scenario& sc);
DriftSpec make_drift(const Scenario& sc);

/// Never throws for scenario failures; they map to exit codes.
RunOutcome run_scenario(const Scenario& sc, const RunOptions& options);

}  // namespace nemytskii
