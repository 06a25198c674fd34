#pragma once

// Independent verification routes: fixed-step RK4 on the rate equations and
// central finite differences in temperature. Nothing here calls the closed-form
// or modal evolution it is used to check.

#include <cmath>
#include <functional>
#include <vector>

#include "mpemba/qubit.hpp"
#include "mpemba/types.hpp"

namespace mpemba::oracle {

struct IntegratorConfig {
    double dt = 1e-4;
    double t_end = 1.0;
    bool clamp_negative = false;
    /// Keep every `record_every`-th step (the final state is always kept).
    long record_every = 1;
};

template <typename Scalar = double>
struct Trajectory {
    std::vector<Scalar> times;
    std::vector<Vector<Scalar>> states;

    const Vector<Scalar>& final_state() const { return states.back(); }
};

template <typename Scalar>
using RateRhs = std::function<Vector<Scalar>(const Vector<Scalar>&)>;

template <typename Scalar>
Trajectory<Scalar> integrate_rate_equation(const RateRhs<Scalar>& rhs, const Vector<Scalar>& p0,
                                           const IntegratorConfig& config)
{
    detail::require(config.dt > 0, "dt must be positive");
    detail::require(config.t_end >= 0, "t_end must be non-negative");
    detail::require(config.record_every >= 1, "record_every must be positive");
    detail::require((p0.array() >= 0).all() && (p0.array() <= 1).all(), "initial populations must lie in [0, 1]");

    const long steps = static_cast<long>(std::ceil(config.t_end / config.dt - 1e-9));
    const Scalar h = steps > 0 ? Scalar(config.t_end) / static_cast<Scalar>(steps) : Scalar(0);

    Trajectory<Scalar> out;
    out.times.push_back(0);
    out.states.push_back(p0);
    Vector<Scalar> p = p0;
    for (long s = 1; s <= steps; ++s) {
        const Vector<Scalar> k1 = rhs(p);
        const Vector<Scalar> k2 = rhs(p + Scalar(0.5) * h * k1);
        const Vector<Scalar> k3 = rhs(p + Scalar(0.5) * h * k2);
        const Vector<Scalar> k4 = rhs(p + h * k3);
        p += h / Scalar(6) * (k1 + Scalar(2) * k2 + Scalar(2) * k3 + k4);
        if ((p.array().abs() > Scalar(1 + 1e-6)).any()) {
            throw NumericalError("RK4 integration became unstable");
        }
        if (config.clamp_negative) {
            p = p.cwiseMax(Scalar(0));
        }
        if (s % config.record_every == 0 || s == steps) {
            out.times.push_back(h * static_cast<Scalar>(s));
            out.states.push_back(p);
        }
    }
    return out;
}

/// dp/dt = R p.
template <typename Scalar>
Trajectory<Scalar> integrate_rate_equation(const Matrix<Scalar>& generator, const Vector<Scalar>& p0,
                                           const IntegratorConfig& config)
{
    detail::require(generator.rows() == p0.size() && generator.cols() == p0.size(),
                    "generator and population dimensions differ");
    return integrate_rate_equation<Scalar>([&generator](const Vector<Scalar>& p) { return Vector<Scalar>(generator * p); },
                                           p0, config);
}

/// Qubit scalar form dp/dt = -Gamma (p - p_eq) with Gamma = Gamma(T, p0) frozen
/// at the preparation.
template <typename Scalar>
Trajectory<Scalar> integrate_qubit(const QubitBathParams<Scalar>& params, Scalar p0, const IntegratorConfig& config)
{
    const Scalar rate = effective_rate(params, p0);
    const Scalar n_bar = bose_occupation(params.omega0, params.temperature);
    const Scalar p_eq = n_bar / (Scalar(2) * n_bar + Scalar(1));
    Vector<Scalar> start(1);
    start << p0;
    return integrate_rate_equation<Scalar>(
        [rate, p_eq](const Vector<Scalar>& p) {
            Vector<Scalar> dp(1);
            dp << -rate * (p(0) - p_eq);
            return dp;
        },
        start, config);
}

template <typename Value>
struct FiniteDifference {
    Value derivative;
    /// Richardson estimate |D(h) - D(h/2)| / 3 of the truncation error.
    double error_estimate;
};

namespace detail {

inline double magnitude(double x) { return std::abs(x); }

template <typename Derived>
double magnitude(const Eigen::MatrixBase<Derived>& x)
{
    return static_cast<double>(x.norm());
}

} // namespace detail

/// Central difference (f(T+h) - f(T-h)) / 2h for scalar- or Eigen-valued f.
template <typename F>
auto finite_difference_dT(F&& f, double temperature, double h)
{
    mpemba::detail::require(h > 0, "finite-difference step must be positive");
    using Value = std::decay_t<decltype(f(temperature))>;
    auto central = [&](double step) -> Value { return Value((f(temperature + step) - f(temperature - step)) / (2 * step)); };
    const Value coarse = central(h);
    const Value fine = central(h / 2);
    return FiniteDifference<Value>{coarse, detail::magnitude(coarse - fine) / 3};
}

} // namespace mpemba::oracle
