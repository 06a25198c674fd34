#pragma once

// Two-level probe under the generalized amplitude damping channel with the
// state-dependent effective rate Gamma(T, p0) = Gamma0 (1 + alpha (p0 - p_eq)).
// Natural units: hbar = k_B = 1, rates and times in units of omega0.

#include <cmath>
#include <string>

#include "mpemba/types.hpp"

namespace mpemba {

/// Beyond this value of omega0 / T the Boltzmann factor is treated as zero.
inline constexpr double kBoltzmannOverflow = 700.0;

template <typename Scalar = double>
struct QubitBathParams {
    Scalar omega0 = 1;
    Scalar gamma = 1;
    Scalar temperature = 0.5;
    Scalar alpha = 0;

    void validate() const
    {
        detail::require(omega0 > 0, "omega0 must be positive");
        detail::require(gamma > 0, "gamma must be positive");
        detail::require(temperature > 0, "temperature must be positive");
        detail::require(alpha >= 0, "alpha must be non-negative");
    }

    QubitBathParams with_temperature(Scalar t) const
    {
        QubitBathParams copy = *this;
        copy.temperature = t;
        return copy;
    }
};

template <typename Scalar = double>
struct ThermalQuantities {
    Scalar n_bar;
    Scalar p_eq;
    Scalar gamma0;
    /// omega0 / T exceeded the overflow threshold; n_bar and p_eq were set to 0.
    bool saturated = false;
};

template <typename Scalar = double>
struct QubitTrajectoryPoint {
    Scalar t;
    Scalar p;
    Scalar dT_p;
};

namespace detail {

template <typename Scalar>
Scalar boltzmann_ratio(Scalar omega0, Scalar temperature)
{
    require(omega0 > 0, "omega0 must be positive");
    require(temperature > 0, "temperature must be positive");
    return omega0 / temperature;
}

template <typename Scalar>
void require_probability(Scalar p, const char* name)
{
    require(p >= 0 && p <= 1, std::string(name) + " must lie in [0, 1]");
}

} // namespace detail

/// Mean thermal occupation 1/(e^{omega0/T} - 1). Returns 0 once omega0/T
/// exceeds kBoltzmannOverflow.
template <typename Scalar>
Scalar bose_occupation(Scalar omega0, Scalar temperature)
{
    const Scalar x = detail::boltzmann_ratio(omega0, temperature);
    if (x > kBoltzmannOverflow) {
        return Scalar(0);
    }
    return Scalar(1) / std::expm1(x);
}

/// Excited-state Gibbs population 1/(1 + e^{omega0/T}).
template <typename Scalar>
Scalar gibbs_population_qubit(Scalar omega0, Scalar temperature)
{
    const Scalar x = detail::boltzmann_ratio(omega0, temperature);
    if (x > kBoltzmannOverflow) {
        return Scalar(0);
    }
    return Scalar(1) / (Scalar(1) + std::exp(x));
}

template <typename Scalar>
ThermalQuantities<Scalar> thermal_quantities(const QubitBathParams<Scalar>& params)
{
    params.validate();
    ThermalQuantities<Scalar> q;
    q.saturated = params.omega0 / params.temperature > kBoltzmannOverflow;
    q.n_bar = bose_occupation(params.omega0, params.temperature);
    q.p_eq = gibbs_population_qubit(params.omega0, params.temperature);
    q.gamma0 = params.gamma * (Scalar(2) * q.n_bar + Scalar(1));
    return q;
}

/// d p_eq / dT = omega0 e^{x} / (T^2 (1 + e^{x})^2), evaluated through e^{-x}.
template <typename Scalar>
Scalar dT_gibbs(Scalar omega0, Scalar temperature)
{
    const Scalar x = detail::boltzmann_ratio(omega0, temperature);
    if (x > kBoltzmannOverflow) {
        return Scalar(0);
    }
    const Scalar e = std::exp(-x);
    return omega0 * e / (temperature * temperature * (Scalar(1) + e) * (Scalar(1) + e));
}

/// d n_bar / dT = omega0 e^{x} / (T^2 (e^{x} - 1)^2).
template <typename Scalar>
Scalar dT_bose_occupation(Scalar omega0, Scalar temperature)
{
    const Scalar x = detail::boltzmann_ratio(omega0, temperature);
    if (x > kBoltzmannOverflow) {
        return Scalar(0);
    }
    const Scalar e = std::exp(-x);
    const Scalar d = -std::expm1(-x);
    return omega0 * e / (temperature * temperature * d * d);
}

/// Gamma(T, p0) = Gamma0 (1 + alpha (p0 - p_eq)). Throws DomainError when the
/// first-order correction drives the rate to zero or below.
template <typename Scalar>
Scalar effective_rate(const QubitBathParams<Scalar>& params, Scalar p0)
{
    detail::require_probability(p0, "p0");
    const auto q = thermal_quantities(params);
    const Scalar rate = q.gamma0 * (Scalar(1) + params.alpha * (p0 - q.p_eq));
    if (!(rate > 0)) {
        throw DomainError("effective rate is non-positive: alpha too large for this preparation");
    }
    return rate;
}

template <typename Scalar>
Scalar evolve_population(const QubitBathParams<Scalar>& params, Scalar p0, Scalar t)
{
    detail::require(t >= 0, "time must be non-negative");
    const Scalar rate = effective_rate(params, p0);
    if (t == 0) {
        return p0;
    }
    const Scalar p_eq = gibbs_population_qubit(params.omega0, params.temperature);
    return p_eq + (p0 - p_eq) * std::exp(-rate * t);
}

/// dGamma/dT with the preparation p0 held fixed:
/// dGamma0 (1 + alpha (p0 - p_eq)) - alpha Gamma0 dp_eq.
template <typename Scalar>
Scalar dT_rate(const QubitBathParams<Scalar>& params, Scalar p0)
{
    detail::require_probability(p0, "p0");
    const auto q = thermal_quantities(params);
    const Scalar dgamma0 = Scalar(2) * params.gamma * dT_bose_occupation(params.omega0, params.temperature);
    const Scalar dp_eq = dT_gibbs(params.omega0, params.temperature);
    const Scalar correction = params.alpha == 0 ? Scalar(0) : params.alpha * q.gamma0 * dp_eq;
    return dgamma0 * (Scalar(1) + params.alpha * (p0 - q.p_eq)) - correction;
}

template <typename Scalar>
Scalar dT_population(const QubitBathParams<Scalar>& params, Scalar p0, Scalar t)
{
    detail::require(t >= 0, "time must be non-negative");
    if (t == 0) {
        effective_rate(params, p0);
        return Scalar(0);
    }
    const Scalar rate = effective_rate(params, p0);
    const Scalar p_eq = gibbs_population_qubit(params.omega0, params.temperature);
    const Scalar dp_eq = dT_gibbs(params.omega0, params.temperature);
    const Scalar decay = std::exp(-rate * t);
    const Scalar relaxed = -std::expm1(-rate * t);
    // t * e^{-Gamma t} underflows cleanly to 0 for t -> inf only when decay is exactly 0.
    const Scalar rate_term = decay == 0 ? Scalar(0) : (p0 - p_eq) * t * decay * dT_rate(params, p0);
    return dp_eq * relaxed - rate_term;
}

template <typename Scalar>
QubitTrajectoryPoint<Scalar> trajectory_point(const QubitBathParams<Scalar>& params, Scalar p0, Scalar t)
{
    return {t, evolve_population(params, p0, t), dT_population(params, p0, t)};
}

} // namespace mpemba
