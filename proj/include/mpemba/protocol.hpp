#pragma once

// Shot-based thermometry workflow on the qubit probe: binomial population
// sampling, equilibrium calibration, inversion-map detection, the empirical
// Fisher-information map and maximum-likelihood temperature estimation.
//
// Randomness: every sampled cell draws from its own Philox stream addressed
// by (seed, cell). The Fisher map shares one stream across the temperature
// axis of a row, so neighbouring temperatures see common random numbers.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mpemba/probe.hpp"
#include "mpemba/qubit.hpp"
#include "mpemba/types.hpp"

namespace mpemba {

struct QubitProbeModel {
    double omega0 = 1;
    double gamma = 1;
    double alpha = 1;
    double p0_hot = 0.9;
    double p0_cold = 0.5;

    QubitBathParams<double> params(double temperature) const { return {omega0, gamma, temperature, alpha}; }
    double initial(Preparation prep, double temperature) const;
    /// Excited population after interrogation time t. The equilibrium
    /// preparation stays at p_eq(T) for every t.
    double population(Preparation prep, double t, double temperature) const;
    double dT_population(Preparation prep, double t, double temperature) const;
    double fisher(Preparation prep, double t, double temperature) const;
};

struct ShotRecord {
    long long shots = 0;
    long long successes = 0;
    double time = 0;
    Preparation preparation = Preparation::equilibrium;
    std::uint64_t seed = 0;
    /// Set in noiseless mode: the exact population replaces n / N.
    std::optional<double> exact_fraction;

    double fraction() const
    {
        return exact_fraction ? *exact_fraction : static_cast<double>(successes) / static_cast<double>(shots);
    }
};

/// Bernoulli sum over `shots` uniforms of stream (seed, cell): n = #{u < p}.
ShotRecord sample_population(double p_true, long long shots, std::uint64_t seed, std::uint64_t cell = 0);

ShotRecord noiseless_record(double p_true, long long shots);

/// Pool-adjacent-violators fit, non-decreasing in index order.
std::vector<double> isotonic_fit(std::span<const double> values, std::span<const double> weights = {});

struct CalibrationCurve {
    std::vector<double> knots;
    std::vector<double> values;
    std::vector<double> raw;
    bool increasing = true;

    /// Piecewise-linear interpolation; T must lie inside the knot range.
    double evaluate(double temperature) const;
};

CalibrationCurve calibrate_equilibrium(std::span<const double> temps, long long shots_per_temp, double omega0,
                                       std::uint64_t seed, bool noiseless = false);

struct DeltaPolicy {
    enum class Kind { fixed, statistical };
    Kind kind = Kind::statistical;
    double value = 0;
    double z_floor = 3;
    /// Family-wise false-positive rate per temperature.
    double family_rate = 0.01;
};

struct InversionMapEntry {
    double temperature = 0;
    std::optional<double> t_m;
    /// Tolerance applied at the detected time (or at the last time probed).
    double delta = 0;
};

std::vector<InversionMapEntry> dynamical_calibration(const QubitProbeModel& model, std::span<const double> temps,
                                                     std::span<const double> time_grid, long long shots,
                                                     const DeltaPolicy& policy, std::uint64_t seed,
                                                     bool noiseless = false);

struct FisherMap {
    Preparation preparation = Preparation::hot;
    std::vector<double> temps;
    std::vector<double> times;
    /// values[i][j] at (times[i], temps[j]).
    std::vector<std::vector<double>> values;
    /// p (1 - p) below 1e-12: the value is reported as 0 and flagged.
    std::vector<std::vector<bool>> flagged;
    std::vector<bool> monotone_rows;

    /// Time with the largest value in the column nearest to `temperature`.
    double argmax_time(double temperature) const;
};

FisherMap fisher_map(const QubitProbeModel& model, Preparation prep, std::span<const double> temps,
                     std::span<const double> times, long long shots, std::uint64_t seed, bool noiseless = false);

struct MleResult {
    double t_hat = 0;
    double log_likelihood = 0;
    double fisher_at_hat = 0;
    double stderr_ = 0;
    bool at_boundary = false;
    bool multimodal = false;
};

double log_likelihood(std::span<const ShotRecord> records, const QubitProbeModel& model, double temperature);

MleResult mle_temperature(std::span<const ShotRecord> records, const QubitProbeModel& model, double t_lo,
                          double t_hi);

/// omega0 / ln(1/p - 1).
double effective_temperature(double p_measured, double omega0);

/// Independent single-interrogation estimates; replica r uses cell r of `seed`.
std::vector<double> replicate_estimates(const QubitProbeModel& model, Preparation prep, double t, double t_true,
                                        long long shots, int replicas, std::uint64_t seed, double t_lo,
                                        double t_hi);

} // namespace mpemba
