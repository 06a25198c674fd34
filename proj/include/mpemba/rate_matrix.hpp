#pragma once

// Detailed-balance Pauli rate matrices. Convention: R(i, j) is the rate of the
// jump j -> i, columns sum to zero, and dp/dt = R p.

#include <cmath>
#include <string>
#include <vector>

#include "mpemba/qubit.hpp"
#include "mpemba/types.hpp"

namespace mpemba {

/// A thermal transition between an upper and a lower level with coupling
/// kappa: up-rate kappa n(w), down-rate kappa (n(w) + 1), w = E_upper - E_lower.
template <typename Scalar = double>
struct Transition {
    Eigen::Index upper;
    Eigen::Index lower;
    Scalar coupling;
};

/// Gibbs weights e^{-E_i/T}/Z, shifted by min E for stability.
template <typename Scalar>
Vector<Scalar> gibbs_vector(const Vector<Scalar>& energies, Scalar temperature)
{
    detail::require(temperature > 0, "temperature must be positive");
    detail::require(energies.size() > 0, "energy list is empty");
    const Scalar e_min = energies.minCoeff();
    Vector<Scalar> weights = ((energies.array() - e_min) / -temperature).exp().matrix();
    return weights / weights.sum();
}

/// d pi_i / dT = pi_i (E_i - <E>) / T^2.
template <typename Scalar>
Vector<Scalar> dT_gibbs_vector(const Vector<Scalar>& energies, Scalar temperature)
{
    const Vector<Scalar> pi = gibbs_vector(energies, temperature);
    const Scalar mean_energy = pi.dot(energies);
    Vector<Scalar> d = (pi.array() * (energies.array() - mean_energy)).matrix() / (temperature * temperature);
    // Exact trace preservation: push the rounding residue into the largest entry.
    Eigen::Index largest = 0;
    d.cwiseAbs().maxCoeff(&largest);
    d(largest) -= d.sum();
    return d;
}

template <typename Scalar = double>
class RateMatrix {
public:
    /// Generator built from level energies and thermal transitions.
    static RateMatrix thermal(Vector<Scalar> energies, std::vector<Transition<Scalar>> transitions,
                              Scalar temperature)
    {
        detail::require(temperature > 0, "temperature must be positive");
        const auto n = energies.size();
        detail::require(n >= 2, "a rate matrix needs at least two levels");
        for (const auto& tr : transitions) {
            detail::require(tr.upper >= 0 && tr.upper < n && tr.lower >= 0 && tr.lower < n,
                            "transition level index out of range");
            detail::require(tr.coupling > 0, "couplings must be positive");
            detail::require(energies(tr.upper) - energies(tr.lower) > 0,
                            "Bohr frequency of every transition must be positive");
        }
        RateMatrix r;
        r.energies_ = std::move(energies);
        r.transitions_ = std::move(transitions);
        r.temperature_ = temperature;
        r.entries_ = assemble(r.energies_, r.transitions_, temperature);
        return r;
    }

    /// Temperature-independent generator; `energies` fix its Gibbs vector and
    /// must be consistent with detailed balance of `entries`.
    static RateMatrix constant(Matrix<Scalar> entries, Vector<Scalar> energies, Scalar temperature)
    {
        detail::require(temperature > 0, "temperature must be positive");
        detail::require(entries.rows() == entries.cols() && entries.rows() == energies.size(),
                        "generator and energy dimensions differ");
        RateMatrix r;
        r.energies_ = std::move(energies);
        r.temperature_ = temperature;
        r.entries_ = std::move(entries);
        r.constant_ = true;
        return r;
    }

    RateMatrix at_temperature(Scalar temperature) const
    {
        if (constant_) {
            return constant(entries_, energies_, temperature);
        }
        return thermal(energies_, transitions_, temperature);
    }

    Eigen::Index dim() const { return entries_.rows(); }
    const Matrix<Scalar>& entries() const { return entries_; }
    const Vector<Scalar>& energies() const { return energies_; }
    const std::vector<Transition<Scalar>>& transitions() const { return transitions_; }
    Scalar temperature() const { return temperature_; }
    bool is_constant() const { return constant_; }

    /// Rate of the jump from -> to.
    Scalar rate(Eigen::Index to, Eigen::Index from) const { return entries_(to, from); }

    Vector<Scalar> stationary() const { return gibbs_vector(energies_, temperature_); }

    /// max_{i,j} |w_{i<-j} pi_j - w_{j<-i} pi_i| relative to the largest flux.
    Scalar detailed_balance_residual() const
    {
        const Vector<Scalar> pi = stationary();
        Scalar worst = 0;
        Scalar scale = 0;
        for (Eigen::Index i = 0; i < dim(); ++i) {
            for (Eigen::Index j = 0; j < dim(); ++j) {
                if (i == j) {
                    continue;
                }
                const Scalar forward = entries_(i, j) * pi(j);
                const Scalar backward = entries_(j, i) * pi(i);
                worst = std::max(worst, std::abs(forward - backward));
                scale = std::max(scale, std::abs(forward));
            }
        }
        return scale > 0 ? worst / scale : worst;
    }

    Scalar max_column_sum() const { return entries_.colwise().sum().cwiseAbs().maxCoeff(); }

private:
    static Matrix<Scalar> assemble(const Vector<Scalar>& energies,
                                   const std::vector<Transition<Scalar>>& transitions, Scalar temperature)
    {
        const auto n = energies.size();
        Matrix<Scalar> r = Matrix<Scalar>::Zero(n, n);
        for (const auto& tr : transitions) {
            const Scalar omega = energies(tr.upper) - energies(tr.lower);
            const Scalar occupation = bose_occupation(omega, temperature);
            r(tr.upper, tr.lower) += tr.coupling * occupation;
            r(tr.lower, tr.upper) += tr.coupling * (occupation + Scalar(1));
        }
        // Diagonal from column sums of the off-diagonal part keeps sums at exactly zero.
        for (Eigen::Index j = 0; j < n; ++j) {
            r(j, j) = 0;
            r(j, j) = -r.col(j).sum();
        }
        return r;
    }

    Vector<Scalar> energies_;
    std::vector<Transition<Scalar>> transitions_;
    Scalar temperature_ = 1;
    Matrix<Scalar> entries_;
    bool constant_ = false;
};

/// Three-level Lambda probe: excited level 3 coupled to ground levels 1 and 2;
/// no direct 1 <-> 2 transition.
template <typename Scalar>
RateMatrix<Scalar> build_lambda_rate_matrix(Scalar e1, Scalar e2, Scalar e3, Scalar kappa1, Scalar kappa2,
                                            Scalar temperature)
{
    detail::require(e3 > e1 && e3 > e2, "excited level must lie above both ground levels");
    Vector<Scalar> energies(3);
    energies << e1, e2, e3;
    return RateMatrix<Scalar>::thermal(energies, {{2, 0, kappa1}, {2, 1, kappa2}}, temperature);
}

/// The qubit as a two-level rate matrix (alpha = 0 channel): levels (ground, excited).
template <typename Scalar>
RateMatrix<Scalar> build_qubit_rate_matrix(Scalar omega0, Scalar gamma, Scalar temperature)
{
    Vector<Scalar> energies(2);
    energies << Scalar(0), omega0;
    return RateMatrix<Scalar>::thermal(energies, {{1, 0, gamma}}, temperature);
}

} // namespace mpemba
