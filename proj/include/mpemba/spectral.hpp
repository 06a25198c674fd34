#pragma once

// Biorthonormal spectral decomposition of detailed-balance generators, modal
// evolution, and first-order perturbation theory in temperature.
//
// Mode indices are zero-based: mode 0 is the stationary (Gibbs) mode with
// lambda = 0, mode 1 the slowest relaxation mode, and so on. Right modes are
// the columns of `right_modes`, left modes the rows of `left_modes`, and
// R v_k = -lambda_k v_k.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "mpemba/rate_matrix.hpp"
#include "mpemba/types.hpp"

namespace mpemba {

inline constexpr double kSpectralGapTolerance = 1e-9;

template <typename Scalar = double>
struct SpectralDecomposition {
    Vector<Scalar> eigenvalues;
    Matrix<Scalar> right_modes;
    Matrix<Scalar> left_modes;
    Vector<Scalar> stationary;

    Eigen::Index dim() const { return eigenvalues.size(); }
    Vector<Scalar> right(Eigen::Index k) const { return right_modes.col(k); }
    Vector<Scalar> left(Eigen::Index k) const { return left_modes.row(k).transpose(); }
    Scalar slowest_rate() const { return eigenvalues(1); }
};

/// Amplitudes a_k = w_k . (p0 - pi); entry 0 (stationary mode) is always zero.
/// `dT_amplitudes` is empty unless temperature derivatives were supplied.
template <typename Scalar = double>
struct ModalAmplitudes {
    Vector<Scalar> amplitudes;
    Vector<Scalar> dT_amplitudes;
    Vector<Scalar> initial;
};

template <typename Scalar = double>
struct PopulationVector {
    Vector<Scalar> populations;
    Scalar time = 0;
    /// Round-off produced an entry in [-1e-12, 0) that was clamped to 0.
    bool clamped = false;
};

/// Temperature derivatives of every spectral object, all at the same T, in the
/// gauge w_k . dv_k = 0 (equivalently dw_k . v_k = 0).
template <typename Scalar = double>
struct SpectralDerivatives {
    Matrix<Scalar> dT_generator;
    Vector<Scalar> dT_eigenvalues;
    Matrix<Scalar> dT_right_modes;
    Matrix<Scalar> dT_left_modes;
    Vector<Scalar> dT_stationary;
};

template <typename Scalar>
Scalar default_temperature_step(Scalar temperature)
{
    return Scalar(1e-5) * temperature;
}

template <typename Scalar>
SpectralDecomposition<Scalar> decompose(const RateMatrix<Scalar>& rates)
{
    const Eigen::Index n = rates.dim();
    const Vector<Scalar> pi = rates.stationary();
    detail::require((pi.array() > 0).all(), "Gibbs vector must be strictly positive");
    if (rates.detailed_balance_residual() > Scalar(1e-10)) {
        throw DomainError("rate matrix violates detailed balance");
    }

    // S = Pi^{-1/2} R Pi^{1/2} is symmetric under detailed balance.
    const Vector<Scalar> sqrt_pi = pi.cwiseSqrt();
    Matrix<Scalar> sym = sqrt_pi.cwiseInverse().asDiagonal() * rates.entries() * sqrt_pi.asDiagonal();
    sym = Scalar(0.5) * (sym + sym.transpose()).eval();

    Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> solver(-sym);
    if (solver.info() != Eigen::Success) {
        throw NumericalError("eigen-decomposition of the symmetrized generator failed");
    }

    Vector<Scalar> lambda = solver.eigenvalues();
    const Matrix<Scalar>& u = solver.eigenvectors();
    const Scalar scale = std::max(Scalar(1), lambda.cwiseAbs().maxCoeff());
    if (std::abs(lambda(0)) > kSpectralGapTolerance * scale) {
        throw NumericalError("generator has no zero eigenvalue");
    }
    for (Eigen::Index k = 1; k < n; ++k) {
        if (lambda(k) - lambda(k - 1) < kSpectralGapTolerance) {
            throw NumericalError("degenerate relaxation spectrum is not supported");
        }
    }
    lambda(0) = 0;

    SpectralDecomposition<Scalar> d;
    d.eigenvalues = lambda;
    d.stationary = pi;
    d.right_modes.resize(n, n);
    d.left_modes.resize(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        Vector<Scalar> v = sqrt_pi.asDiagonal() * u.col(k);
        Vector<Scalar> w = sqrt_pi.cwiseInverse().asDiagonal() * u.col(k);
        if (k == 0) {
            v = pi;
            w = Vector<Scalar>::Ones(n);
        }
        const Scalar norm = v.norm();
        v /= norm;
        w *= norm;
        // Gauge: first component that is not round-off must be positive.
        for (Eigen::Index i = 0; i < n; ++i) {
            if (std::abs(v(i)) > Scalar(1e-10)) {
                if (v(i) < 0) {
                    v = -v;
                    w = -w;
                }
                break;
            }
        }
        w /= w.dot(v);
        d.right_modes.col(k) = v;
        d.left_modes.row(k) = w.transpose();
    }
    return d;
}

/// Maps each mode of `reference` to a mode of `other` by nearest eigenvalue and
/// checks that maximal biorthogonal overlap selects the same mode. Throws when
/// the two criteria disagree or a target is claimed twice.
template <typename Scalar>
std::vector<Eigen::Index> track_modes(const SpectralDecomposition<Scalar>& reference,
                                      const SpectralDecomposition<Scalar>& other)
{
    const Eigen::Index n = reference.dim();
    detail::require(other.dim() == n, "decompositions have different dimensions");
    std::vector<Eigen::Index> match(static_cast<std::size_t>(n));
    std::vector<bool> taken(static_cast<std::size_t>(n), false);
    for (Eigen::Index k = 0; k < n; ++k) {
        Eigen::Index by_value = 0;
        (other.eigenvalues.array() - reference.eigenvalues(k)).abs().minCoeff(&by_value);
        Eigen::Index by_overlap = 0;
        (reference.left_modes.row(k) * other.right_modes).cwiseAbs().maxCoeff(&by_overlap);
        if (by_value != by_overlap || taken[static_cast<std::size_t>(by_value)]) {
            throw NumericalError("eigenvalue tracking across temperatures is ambiguous");
        }
        taken[static_cast<std::size_t>(by_value)] = true;
        match[static_cast<std::size_t>(k)] = by_value;
    }
    return match;
}

/// Central finite difference of R(T) with step h; falls back to Richardson
/// extrapolation when the h and h/2 estimates disagree by more than 1e-4.
template <typename Scalar>
Matrix<Scalar> dT_generator(const RateMatrix<Scalar>& rates, Scalar h)
{
    detail::require(h > 0, "finite-difference step must be positive");
    const Scalar t = rates.temperature();
    detail::require(t - h > 0, "finite-difference step exceeds the temperature");
    auto central = [&](Scalar step) -> Matrix<Scalar> {
        return (rates.at_temperature(t + step).entries() - rates.at_temperature(t - step).entries()) /
               (Scalar(2) * step);
    };
    const Matrix<Scalar> coarse = central(h);
    const Matrix<Scalar> fine = central(h / 2);
    const Scalar scale = fine.norm();
    if (scale > 0 && (coarse - fine).norm() > Scalar(1e-4) * scale) {
        return (Scalar(4) * fine - coarse) / Scalar(3);
    }
    return fine;
}

namespace detail {

template <typename Scalar>
void require_mode(const SpectralDecomposition<Scalar>& d, Eigen::Index k)
{
    require(k >= 0 && k < d.dim(), "mode index out of range");
}

template <typename Scalar>
void check_tracking(const RateMatrix<Scalar>& rates, const SpectralDecomposition<Scalar>& d, Scalar h)
{
    if (rates.is_constant()) {
        return;
    }
    const Scalar t = rates.temperature();
    const auto up = track_modes(d, decompose(rates.at_temperature(t + h)));
    const auto down = track_modes(d, decompose(rates.at_temperature(t - h)));
    for (std::size_t k = 0; k < up.size(); ++k) {
        if (up[k] != static_cast<Eigen::Index>(k) || down[k] != static_cast<Eigen::Index>(k)) {
            throw NumericalError("eigenvalue ordering changes within the finite-difference step");
        }
    }
}

template <typename Scalar>
Scalar eigenvalue_derivative(const SpectralDecomposition<Scalar>& d, const Matrix<Scalar>& dR, Eigen::Index k)
{
    // R v = -lambda v, hence d lambda_k = -w_k dR v_k.
    return -d.left_modes.row(k).dot(dR * d.right_modes.col(k));
}

template <typename Scalar>
Vector<Scalar> right_mode_derivative(const SpectralDecomposition<Scalar>& d, const Matrix<Scalar>& dR,
                                     Eigen::Index k)
{
    const Vector<Scalar> dR_v = dR * d.right_modes.col(k);
    Vector<Scalar> out = Vector<Scalar>::Zero(d.dim());
    for (Eigen::Index j = 0; j < d.dim(); ++j) {
        if (j == k) {
            continue;
        }
        const Scalar coeff = d.left_modes.row(j).dot(dR_v) / (d.eigenvalues(j) - d.eigenvalues(k));
        out += coeff * d.right_modes.col(j);
    }
    return out;
}

template <typename Scalar>
Vector<Scalar> left_mode_derivative(const SpectralDecomposition<Scalar>& d, const Matrix<Scalar>& dR,
                                    Eigen::Index k)
{
    const Vector<Scalar> w_dR = (d.left_modes.row(k) * dR).transpose();
    Vector<Scalar> out = Vector<Scalar>::Zero(d.dim());
    for (Eigen::Index j = 0; j < d.dim(); ++j) {
        if (j == k) {
            continue;
        }
        const Scalar coeff = w_dR.dot(d.right_modes.col(j)) / (d.eigenvalues(j) - d.eigenvalues(k));
        out += coeff * d.left_modes.row(j).transpose();
    }
    return out;
}

} // namespace detail

/// d lambda_k / dT from the perturbation formula, sign matched to lambda_k >= 0.
template <typename Scalar>
Scalar dT_eigenvalue(const RateMatrix<Scalar>& rates, const SpectralDecomposition<Scalar>& d, Eigen::Index k,
                     Scalar h)
{
    detail::require_mode(d, k);
    detail::check_tracking(rates, d, h);
    return detail::eigenvalue_derivative(d, dT_generator(rates, h), k);
}

template <typename Scalar>
Scalar dT_eigenvalue(const RateMatrix<Scalar>& rates, const SpectralDecomposition<Scalar>& d, Eigen::Index k)
{
    return dT_eigenvalue(rates, d, k, default_temperature_step(rates.temperature()));
}

/// dv_k/dT = sum_{j != k} [w_j dR v_k / (lambda_j - lambda_k)] v_j.
template <typename Scalar>
Vector<Scalar> dT_eigenvector(const RateMatrix<Scalar>& rates, const SpectralDecomposition<Scalar>& d,
                              Eigen::Index k, Scalar h)
{
    detail::require_mode(d, k);
    return detail::right_mode_derivative(d, dT_generator(rates, h), k);
}

template <typename Scalar>
Vector<Scalar> dT_eigenvector(const RateMatrix<Scalar>& rates, const SpectralDecomposition<Scalar>& d,
                              Eigen::Index k)
{
    return dT_eigenvector(rates, d, k, default_temperature_step(rates.temperature()));
}

/// dw_k/dT = sum_{j != k} [w_k dR v_j / (lambda_j - lambda_k)] w_j.
template <typename Scalar>
Vector<Scalar> dT_left_eigenvector(const RateMatrix<Scalar>& rates, const SpectralDecomposition<Scalar>& d,
                                   Eigen::Index k, Scalar h)
{
    detail::require_mode(d, k);
    return detail::left_mode_derivative(d, dT_generator(rates, h), k);
}

template <typename Scalar>
SpectralDerivatives<Scalar> spectral_derivatives(const RateMatrix<Scalar>& rates,
                                                 const SpectralDecomposition<Scalar>& d, Scalar h)
{
    detail::check_tracking(rates, d, h);
    SpectralDerivatives<Scalar> out;
    out.dT_generator = dT_generator(rates, h);
    const Eigen::Index n = d.dim();
    out.dT_eigenvalues.resize(n);
    out.dT_right_modes.resize(n, n);
    out.dT_left_modes.resize(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        out.dT_eigenvalues(k) = k == 0 ? Scalar(0) : detail::eigenvalue_derivative(d, out.dT_generator, k);
        out.dT_right_modes.col(k) = detail::right_mode_derivative(d, out.dT_generator, k);
        out.dT_left_modes.row(k) = detail::left_mode_derivative(d, out.dT_generator, k).transpose();
    }
    out.dT_stationary = rates.is_constant() ? Vector<Scalar>(Vector<Scalar>::Zero(n))
                                            : dT_gibbs_vector(rates.energies(), rates.temperature());
    return out;
}

template <typename Scalar>
SpectralDerivatives<Scalar> spectral_derivatives(const RateMatrix<Scalar>& rates,
                                                 const SpectralDecomposition<Scalar>& d)
{
    return spectral_derivatives(rates, d, default_temperature_step(rates.temperature()));
}

namespace detail {

template <typename Scalar>
void require_simplex(const Vector<Scalar>& p, Eigen::Index n)
{
    require(p.size() == n, "population vector dimension does not match the generator");
    require((p.array() >= 0).all(), "populations must be non-negative");
    require(std::abs(p.sum() - Scalar(1)) < Scalar(1e-10), "populations must sum to one");
}

} // namespace detail

template <typename Scalar>
ModalAmplitudes<Scalar> project_initial(const SpectralDecomposition<Scalar>& d, const Vector<Scalar>& p0)
{
    detail::require_simplex(p0, d.dim());
    ModalAmplitudes<Scalar> a;
    a.initial = p0;
    a.amplitudes = d.left_modes * (p0 - d.stationary);
    a.amplitudes(0) = 0;
    return a;
}

/// Also fills d a_k / dT = dw_k . (p0 - pi) - w_k . d pi for a T-independent p0.
template <typename Scalar>
ModalAmplitudes<Scalar> project_initial(const SpectralDecomposition<Scalar>& d, const Vector<Scalar>& p0,
                                        const SpectralDerivatives<Scalar>& derivs)
{
    ModalAmplitudes<Scalar> a = project_initial(d, p0);
    a.dT_amplitudes = derivs.dT_left_modes * (p0 - d.stationary) - d.left_modes * derivs.dT_stationary;
    a.dT_amplitudes(0) = 0;
    return a;
}

template <typename Scalar>
PopulationVector<Scalar> evolve_modal(const SpectralDecomposition<Scalar>& d, const ModalAmplitudes<Scalar>& a,
                                      Scalar t)
{
    detail::require(t >= 0, "time must be non-negative");
    PopulationVector<Scalar> out;
    out.time = t;
    if (t == 0 && a.initial.size() == d.dim()) {
        out.populations = a.initial;
        return out;
    }
    out.populations = d.stationary;
    for (Eigen::Index k = 1; k < d.dim(); ++k) {
        out.populations += a.amplitudes(k) * std::exp(-d.eigenvalues(k) * t) * d.right_modes.col(k);
    }
    for (Eigen::Index i = 0; i < d.dim(); ++i) {
        if (out.populations(i) < 0) {
            if (out.populations(i) < Scalar(-1e-12)) {
                throw NumericalError("modal evolution left the probability simplex");
            }
            out.populations(i) = 0;
            out.clamped = true;
        }
    }
    return out;
}

/// dp(t)/dT = d pi + sum_k [da_k e^{-lambda_k t} - a_k t e^{-lambda_k t} d lambda_k] v_k
///            + sum_k a_k e^{-lambda_k t} dv_k.
template <typename Scalar>
Vector<Scalar> dT_populations_modal(const SpectralDecomposition<Scalar>& d, const ModalAmplitudes<Scalar>& a,
                                    const SpectralDerivatives<Scalar>& derivs, Scalar t)
{
    detail::require(t >= 0, "time must be non-negative");
    detail::require(a.dT_amplitudes.size() == d.dim(), "amplitude derivatives are missing");
    Vector<Scalar> out = derivs.dT_stationary;
    for (Eigen::Index k = 1; k < d.dim(); ++k) {
        const Scalar decay = std::exp(-d.eigenvalues(k) * t);
        const Scalar rate_term = decay == 0 ? Scalar(0) : a.amplitudes(k) * t * decay * derivs.dT_eigenvalues(k);
        out += (a.dT_amplitudes(k) * decay - rate_term) * d.right_modes.col(k);
        out += a.amplitudes(k) * decay * derivs.dT_right_modes.col(k);
    }
    return out;
}

} // namespace mpemba
