#include <cmath>
#include <random>

#include "doctest.h"
#include "mpemba/oracle.hpp"
#include "mpemba/qubit.hpp"

using namespace mpemba;
using doctest::Approx;

namespace {

const QubitBathParams<double> reference{1.0, 1.0, 0.5, 1.0};

}

TEST_CASE("bose occupation and gibbs population")
{
    CHECK(bose_occupation(1.0, 0.5) == Approx(1.0 / (std::exp(2.0) - 1)).epsilon(1e-14));
    CHECK(bose_occupation(1.0, 0.5) == Approx(0.15651764).epsilon(1e-8));
    CHECK(bose_occupation(1.0, 1.0) == Approx(0.58197671).epsilon(1e-8));
    CHECK(bose_occupation(1.0, 1e-4) == 0.0);
    CHECK(gibbs_population_qubit(1.0, 0.5) == Approx(0.11920292).epsilon(1e-8));
    CHECK(gibbs_population_qubit(1.0, 1e12) == Approx(0.5));

    const double n = bose_occupation(1.0, 0.5);
    CHECK(std::abs(n / (2 * n + 1) - gibbs_population_qubit(1.0, 0.5)) < 1e-12);

    const auto q = thermal_quantities(reference.with_temperature(1e-3));
    CHECK(q.saturated);
    CHECK(q.p_eq == 0.0);
}

TEST_CASE("parameter validation")
{
    CHECK_THROWS_AS(thermal_quantities(QubitBathParams<double>{-1, 1, 0.5, 0}), DomainError);
    CHECK_THROWS_AS(thermal_quantities(QubitBathParams<double>{1, 1, 0, 0}), DomainError);
    CHECK_THROWS_AS(thermal_quantities(QubitBathParams<double>{1, 1, 0.5, -0.1}), DomainError);
    CHECK_THROWS_AS(effective_rate(reference, 1.5), DomainError);
    // Large alpha with a cold preparation drives the rate negative.
    CHECK_THROWS_AS(effective_rate(QubitBathParams<double>{1, 1, 0.5, 20}, 0.0), DomainError);
}

TEST_CASE("effective rate")
{
    const auto a0 = QubitBathParams<double>{1, 1, 0.5, 0};
    CHECK(effective_rate(a0, 0.9) == Approx(1.31303529).epsilon(1e-8));
    CHECK(effective_rate(reference, gibbs_population_qubit(1.0, 0.5)) == Approx(1.31303529).epsilon(1e-8));
    CHECK(effective_rate(reference, 0.9) == Approx(2.33824941).epsilon(1e-8));
    for (double p0 = 0; p0 <= 1.0; p0 += 0.05) {
        CHECK(std::abs(effective_rate(a0, p0) - effective_rate(a0, 0.9)) < 1e-15);
    }
}

TEST_CASE("evolution")
{
    const double p_eq = gibbs_population_qubit(1.0, 0.5);
    CHECK(evolve_population(reference, 0.9, 0.0) == 0.9);
    CHECK(evolve_population(reference, 0.9, 1.0) == Approx(0.19455).epsilon(1e-4));
    CHECK(evolve_population(reference, 0.9, 200.0) == Approx(p_eq).epsilon(1e-14));
    for (double t : {0.0, 0.3, 5.0, 1e3}) {
        CHECK(std::abs(evolve_population(reference, p_eq, t) - p_eq) < 1e-16);
    }

    // Monotone approach from both sides.
    for (double p0 : {0.9, 0.02}) {
        double prev = std::abs(p0 - p_eq);
        const double sign = p0 > p_eq ? 1 : -1;
        for (double t = 0.1; t < 10; t += 0.1) {
            const double d = evolve_population(reference, p0, t) - p_eq;
            CHECK(d * sign > 0);
            CHECK(std::abs(d) < prev);
            prev = std::abs(d);
        }
    }
}

TEST_CASE("temperature derivatives against finite differences")
{
    const double h = 1e-5;
    auto p_eq = [](double T) { return gibbs_population_qubit(1.0, T); };
    CHECK(dT_gibbs(1.0, 0.5) == Approx(0.41997).epsilon(1e-4));
    CHECK(dT_gibbs(1.0, 0.5) == Approx(oracle::finite_difference_dT(p_eq, 0.5, h).derivative).epsilon(1e-6));
    CHECK(dT_gibbs(1.0, 1e9) < 1e-15);
    CHECK(dT_gibbs(1.0, 1e-3) == 0.0);

    const auto a0 = QubitBathParams<double>{1, 1, 0.5, 0};
    CHECK(dT_rate(a0, 0.3) == Approx(1.44812).epsilon(1e-5));
    CHECK(dT_rate(reference, 0.9) == Approx(2.0272).epsilon(2e-4));
    for (const auto& params : {a0, reference}) {
        auto rate = [&](double T) { return effective_rate(params.with_temperature(T), 0.9); };
        CHECK(dT_rate(params, 0.9) ==
              Approx(oracle::finite_difference_dT(rate, 0.5, h * 0.5).derivative).epsilon(1e-5));
    }

    CHECK(dT_population(reference, 0.9, 0.0) == 0.0);
    CHECK(dT_population(a0, 0.9, 1e4) == Approx(dT_gibbs(1.0, 0.5)).epsilon(1e-12));

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0, 1);
    for (int i = 0; i < 100; ++i) {
        const QubitBathParams<double> p{0.5 + u(rng), 0.5 + u(rng), 0.3 + u(rng), u(rng)};
        const double p0 = u(rng);
        const double t = 3 * u(rng);
        auto f = [&](double T) { return evolve_population(p.with_temperature(T), p0, t); };
        const double fd = oracle::finite_difference_dT(f, p.temperature, h * p.temperature).derivative;
        const double an = dT_population(p, p0, t);
        if (std::abs(an) > 1e-6) {
            CHECK(std::abs(an - fd) / std::abs(an) < 1e-5);
        }
    }
}

TEST_CASE("trajectory point")
{
    const auto pt = trajectory_point(reference, 0.9, 0.5);
    CHECK(pt.t == 0.5);
    CHECK(pt.p == evolve_population(reference, 0.9, 0.5));
    CHECK(pt.dT_p == dT_population(reference, 0.9, 0.5));
}
