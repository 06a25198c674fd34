#pragma once

// Fisher information of energy-diagonal probe states. For diagonal states the
// quantum Fisher information equals the classical Fisher information of the
// population distribution, so no symmetric logarithmic derivative is formed.

#include <cmath>
#include <limits>
#include <string>

#include "mpemba/qubit.hpp"
#include "mpemba/spectral.hpp"
#include "mpemba/types.hpp"

namespace mpemba {

enum class FisherSource { closed_form, modal, empirical };

inline std::string to_string(FisherSource s)
{
    switch (s) {
    case FisherSource::closed_form:
        return "closed_form";
    case FisherSource::modal:
        return "modal";
    case FisherSource::empirical:
        return "empirical";
    }
    return "unknown";
}

template <typename Scalar = double>
struct FisherPoint {
    Scalar temperature;
    Scalar time;
    Scalar fisher;
    FisherSource source;
};

inline constexpr double kPopulationFloor = 1e-15;
inline constexpr double kDerivativeFloor = 1e-12;

/// sum_i (dT p_i)^2 / p_i. Vanishing populations contribute only when their
/// derivative vanishes too; otherwise the information diverges and we throw.
template <typename Scalar>
Scalar fisher_from_populations(const Vector<Scalar>& p, const Vector<Scalar>& dT_p)
{
    detail::require(p.size() == dT_p.size(), "population and derivative dimensions differ");
    Scalar total = 0;
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        if (p(i) < Scalar(kPopulationFloor)) {
            if (std::abs(dT_p(i)) < Scalar(kDerivativeFloor)) {
                continue;
            }
            throw NumericalError("Fisher information diverges: vanishing population with nonzero derivative");
        }
        total += dT_p(i) * dT_p(i) / p(i);
    }
    return total;
}

/// Two-outcome form (dT p)^2 / (p (1 - p)) for an excited population p.
template <typename Scalar>
Scalar fisher_binary(Scalar p, Scalar dT_p)
{
    Vector<Scalar> probs(2);
    Vector<Scalar> derivs(2);
    probs << Scalar(1) - p, p;
    derivs << -dT_p, dT_p;
    return fisher_from_populations(probs, derivs);
}

/// Expanded three-term qubit expression
///   [dp_eq^2 (1-e)^2 + D^2 t^2 e^2 dGamma^2 - 2 D dp_eq t e (1-e) dGamma] / (p (1-p))
/// with e = exp(-Gamma t) and D = p0 - p_eq.
template <typename Scalar>
Scalar qfi_qubit_closed_form(const QubitBathParams<Scalar>& params, Scalar p0, Scalar t)
{
    detail::require(t >= 0, "time must be non-negative");
    const Scalar rate = effective_rate(params, p0);
    const Scalar p_eq = gibbs_population_qubit(params.omega0, params.temperature);
    const Scalar dp_eq = dT_gibbs(params.omega0, params.temperature);
    const Scalar d_rate = dT_rate(params, p0);
    const Scalar e = std::exp(-rate * t);
    const Scalar one_minus_e = -std::expm1(-rate * t);
    const Scalar dev = p0 - p_eq;
    const Scalar te = e == 0 ? Scalar(0) : t * e;
    const Scalar p = t == 0 ? p0 : p_eq + dev * e;
    const Scalar numerator = dp_eq * dp_eq * one_minus_e * one_minus_e + dev * dev * te * te * d_rate * d_rate -
                             Scalar(2) * dev * dp_eq * te * one_minus_e * d_rate;
    const Scalar variance = p * (Scalar(1) - p);
    if (variance < Scalar(kPopulationFloor)) {
        if (std::abs(numerator) < Scalar(kDerivativeFloor) * Scalar(kDerivativeFloor)) {
            return Scalar(0);
        }
        throw NumericalError("qubit Fisher information diverges at a pure state");
    }
    return std::max(Scalar(0), numerator / variance);
}

/// Equilibrium benchmark (dp_eq)^2 / (p_eq (1 - p_eq)).
template <typename Scalar>
Scalar qfi_equilibrium(Scalar omega0, Scalar temperature)
{
    const Scalar p_eq = gibbs_population_qubit(omega0, temperature);
    const Scalar dp_eq = dT_gibbs(omega0, temperature);
    const Scalar variance = p_eq * (Scalar(1) - p_eq);
    if (variance == 0) {
        return Scalar(0);
    }
    return dp_eq * dp_eq / variance;
}

/// Leading-order t^2 growth: [dp_eq Gamma - (p0 - p_eq) dGamma]^2 t^2 / (p0 (1 - p0)).
template <typename Scalar>
Scalar qfi_short_time(const QubitBathParams<Scalar>& params, Scalar p0, Scalar t)
{
    detail::require(t >= 0, "time must be non-negative");
    detail::require(p0 > 0 && p0 < 1, "short-time expansion needs 0 < p0 < 1");
    const Scalar rate = effective_rate(params, p0);
    const Scalar p_eq = gibbs_population_qubit(params.omega0, params.temperature);
    const Scalar slope = dT_gibbs(params.omega0, params.temperature) * rate - (p0 - p_eq) * dT_rate(params, p0);
    return slope * slope * t * t / (p0 * (Scalar(1) - p0));
}

/// Times below this are inside the short-time validity window.
template <typename Scalar>
Scalar short_time_validity(const QubitBathParams<Scalar>& params, Scalar p0)
{
    return Scalar(0.1) / effective_rate(params, p0);
}

/// 1 / (shots F); +inf when F is zero.
template <typename Scalar>
Scalar cramer_rao_bound(Scalar fisher, long long shots)
{
    detail::require(shots >= 1, "shots must be at least one");
    detail::require(fisher >= 0, "Fisher information must be non-negative");
    if (fisher == 0) {
        return std::numeric_limits<Scalar>::infinity();
    }
    return Scalar(1) / (static_cast<Scalar>(shots) * fisher);
}

/// Fisher information of the modal trajectory of a multi-level probe.
template <typename Scalar>
Scalar fisher_modal(const SpectralDecomposition<Scalar>& d, const ModalAmplitudes<Scalar>& a,
                    const SpectralDerivatives<Scalar>& derivs, Scalar t)
{
    return fisher_from_populations(evolve_modal(d, a, t).populations, dT_populations_modal(d, a, derivs, t));
}

template <typename Scalar>
Scalar fisher_gibbs(const Vector<Scalar>& energies, Scalar temperature)
{
    return fisher_from_populations(gibbs_vector(energies, temperature), dT_gibbs_vector(energies, temperature));
}

} // namespace mpemba
