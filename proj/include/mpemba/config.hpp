#pragma once

// Flat "key = value" run configuration. '#' starts a comment. Unknown keys
// are rejected so typos do not fall back to defaults silently.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mpemba/mpemba_detect.hpp"
#include "mpemba/probe.hpp"
#include "mpemba/protocol.hpp"
#include "mpemba/types.hpp"

namespace mpemba {

class ConfigError : public DomainError {
public:
    using DomainError::DomainError;
};

/// "lo:hi:n" gives n evenly spaced points; otherwise a comma-separated list.
struct GridSpec {
    std::vector<double> points;
    static GridSpec parse(const std::string& text);
};

struct RunConfig {
    std::string model = "qubit";

    double omega0 = 1;
    double gamma = 1;
    double temperature = 0.5;
    double alpha = 1;
    double p0_hot = 0.9;
    double p0_cold = 0.5;

    double e1 = 0;
    double e2 = 0;
    double e3 = 1;
    double kappa1 = 1;
    double kappa2 = 1;
    std::vector<double> hot{0.2, 0.2, 0.6};
    std::vector<double> cold{0.6, 0.3, 0.1};

    double t_max = 10;
    int t_steps = 201;
    std::optional<DistanceKind> norm_kind;
    double delta_tol = 0;
    DeltaPolicy::Kind delta_policy = DeltaPolicy::Kind::statistical;

    long long shots = 10000;
    std::uint64_t seed = 1;
    bool noiseless = false;

    /// qfi output: "trajectory" or "surface".
    std::string qfi_mode = "trajectory";
    int p0_steps = 21;

    GridSpec calibration_grid{{0.3, 0.4, 0.5, 0.6, 0.7}};
    GridSpec T_grid{{0.3, 0.35, 0.4, 0.45, 0.5, 0.55, 0.6, 0.65, 0.7}};
    Preparation preparation = Preparation::hot;
    double t_lo = 0.2;
    double t_hi = 1.5;

    std::string output_path = ".";

    void validate() const;
    std::vector<double> time_grid() const;
    DistanceKind distance() const;
    QubitPair qubit_pair() const;
    LambdaPair lambda_pair() const;
    QubitProbeModel probe_model() const;
};

RunConfig parse_config(const std::string& text, RunConfig base = {});
RunConfig load_config(const std::string& path, RunConfig base = {});

} // namespace mpemba
