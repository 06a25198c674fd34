#pragma once

// Hot/cold preparation pairs for the two probe families. These bundle the
// trajectory and Fisher-information evaluators that inversion detection, the
// theorem certificates, and the command-line tools share.

#include <functional>
#include <string>

#include "mpemba/fisher.hpp"
#include "mpemba/qubit.hpp"
#include "mpemba/rate_matrix.hpp"
#include "mpemba/spectral.hpp"

namespace mpemba {

enum class Preparation { hot, cold, equilibrium };

inline std::string to_string(Preparation p)
{
    switch (p) {
    case Preparation::hot:
        return "hot";
    case Preparation::cold:
        return "cold";
    case Preparation::equilibrium:
        return "equilibrium";
    }
    return "unknown";
}

using TrajectoryFn = std::function<VectorXd(double)>;
using FisherFn = std::function<double(double)>;

struct QubitPair {
    QubitBathParams<double> params;
    double p0_hot = 0.9;
    double p0_cold = 0.5;

    double initial(Preparation prep) const
    {
        switch (prep) {
        case Preparation::hot:
            return p0_hot;
        case Preparation::cold:
            return p0_cold;
        case Preparation::equilibrium:
            break;
        }
        return gibbs_population_qubit(params.omega0, params.temperature);
    }

    double p_eq() const { return gibbs_population_qubit(params.omega0, params.temperature); }

    /// Excited population as a one-component vector.
    TrajectoryFn trajectory(Preparation prep) const
    {
        return [params = params, p0 = initial(prep)](double t) {
            VectorXd p(1);
            p << evolve_population(params, p0, t);
            return p;
        };
    }

    VectorXd stationary() const
    {
        VectorXd p(1);
        p << p_eq();
        return p;
    }

    FisherFn fisher(Preparation prep) const
    {
        return [params = params, p0 = initial(prep)](double t) { return qfi_qubit_closed_form(params, p0, t); };
    }

    double equilibrium_fisher() const { return qfi_equilibrium(params.omega0, params.temperature); }

    double slowest_rate() const
    {
        return std::min(effective_rate(params, p0_hot), effective_rate(params, p0_cold));
    }
};

struct LambdaSpec {
    double e1 = 0;
    double e2 = 0;
    double e3 = 1;
    double kappa1 = 1;
    double kappa2 = 1;
    double temperature = 0.5;

    RateMatrix<double> rate_matrix() const
    {
        return build_lambda_rate_matrix(e1, e2, e3, kappa1, kappa2, temperature);
    }
};

/// Everything needed to evaluate one Lambda preparation along its trajectory.
struct ModalState {
    RateMatrix<double> rates;
    SpectralDecomposition<double> spectrum;
    SpectralDerivatives<double> derivatives;
    ModalAmplitudes<double> amplitudes;

    VectorXd populations(double t) const { return evolve_modal(spectrum, amplitudes, t).populations; }
    VectorXd dT_populations(double t) const { return dT_populations_modal(spectrum, amplitudes, derivatives, t); }
    double fisher(double t) const { return fisher_modal(spectrum, amplitudes, derivatives, t); }
};

inline ModalState make_modal_state(const RateMatrix<double>& rates, const VectorXd& p0)
{
    auto spectrum = decompose(rates);
    auto derivatives = spectral_derivatives(rates, spectrum);
    auto amplitudes = project_initial(spectrum, p0, derivatives);
    return {rates, std::move(spectrum), std::move(derivatives), std::move(amplitudes)};
}

struct LambdaPair {
    LambdaSpec spec;
    VectorXd hot;
    VectorXd cold;

    VectorXd initial(Preparation prep) const
    {
        switch (prep) {
        case Preparation::hot:
            return hot;
        case Preparation::cold:
            return cold;
        case Preparation::equilibrium:
            break;
        }
        return spec.rate_matrix().stationary();
    }

    ModalState state(Preparation prep) const { return make_modal_state(spec.rate_matrix(), initial(prep)); }

    TrajectoryFn trajectory(Preparation prep) const
    {
        return [s = state(prep)](double t) { return s.populations(t); };
    }

    VectorXd stationary() const { return spec.rate_matrix().stationary(); }

    FisherFn fisher(Preparation prep) const
    {
        return [s = state(prep)](double t) { return s.fisher(t); };
    }

    double equilibrium_fisher() const
    {
        const auto r = spec.rate_matrix();
        return fisher_gibbs(r.energies(), r.temperature());
    }

    double slowest_rate() const { return decompose(spec.rate_matrix()).slowest_rate(); }
};

} // namespace mpemba
