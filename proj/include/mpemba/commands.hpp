#pragma once

// Subcommand bodies. Each returns file contents instead of writing, so the
// CLI decides where they land and tests can inspect them directly.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mpemba/config.hpp"

namespace mpemba {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

/// %.17g, the serialization used by every CSV column.
std::string format_number(double x);

std::string relax_csv(const RunConfig& config);
std::string qfi_csv(const RunConfig& config);
std::string theorem_text(const RunConfig& config);

struct OutputFile {
    std::string name;
    std::string content;
};

struct ProtocolOutputs {
    std::vector<OutputFile> files;
    std::optional<std::string> failed_step;
    std::string error;
    int exit_code = kExitOk;
};

/// calibration.csv, inversion_map.csv, fisher_map.csv, estimate.csv and a
/// manifest.txt listing which steps completed. A failing step stops the run;
/// earlier files are kept.
ProtocolOutputs protocol_bundle(const RunConfig& config);

} // namespace mpemba
