#include <cmath>

#include "doctest.h"
#include "instances.hpp"
#include "mpemba/theorem.hpp"

using namespace mpemba;
using doctest::Approx;

namespace {

LambdaPair symmetric_pair()
{
    return {LambdaSpec{}, testing::symmetric_hot(), testing::symmetric_cold()};
}

} // namespace

TEST_CASE("lemma 1 on the symmetric probe")
{
    const auto state = symmetric_pair().state(Preparation::cold);
    const double slow = state.spectrum.slowest_rate();
    for (double t : {0.0, 1.0, 1 / slow, 40 / slow}) {
        const auto cert = lemma1_remainder_check(state, t);
        CHECK(cert.min_slack() >= -kSlackTolerance);
        // N = 3: the fast sum is the single a_3 term.
        const double a3 = std::abs(state.amplitudes.amplitudes(2));
        CHECK(cert.fast_sum_norm == Approx(a3 * std::exp(-state.spectrum.eigenvalues(2) * t)).epsilon(1e-10));
    }
    const auto late = lemma1_remainder_check(state, 400 / slow);
    CHECK(late.remainder_bound < 1e-12);
    CHECK(late.remainder_slack >= 0);

    const auto c = lemma_constants(state, 1.0);
    CHECK(c.gap_delta > 0);
    CHECK(c.gap_delta == Approx(state.spectrum.eigenvalues(2) - state.spectrum.eigenvalues(1)));
    CHECK(c.lambda_t <= c.r_t * c.w_op_norm * c.v_op_norm + 1e-12);
    CHECK(std::isfinite(c.c_r));
}

TEST_CASE("remainder reconstructs dp/dT")
{
    const auto state = symmetric_pair().state(Preparation::cold);
    for (double t : {0.2, 1.5, 6.0}) {
        const double e2 = std::exp(-state.spectrum.eigenvalues(1) * t);
        const auto& a = state.amplitudes;
        const VectorXd slow = (a.dT_amplitudes(1) - a.amplitudes(1) * t * state.derivatives.dT_eigenvalues(1)) * e2 *
                              state.spectrum.right(1);
        const VectorXd lhs = state.dT_populations(t) - state.derivatives.dT_stationary - slow;
        CHECK((lhs - remainder_vector(state, t)).norm() < 1e-12);
    }
}

TEST_CASE("lemma 2 and the strong-cancellation case")
{
    const auto pair = symmetric_pair();
    const auto hot = pair.state(Preparation::hot);
    const double slow = hot.spectrum.slowest_rate();
    const auto cert = lemma2_slow_mode(hot, 1.0);
    CHECK(std::abs(cert.slow.a2) < 1e-12);
    CHECK(cert.slow.s_of_t == Approx(cert.slow.dT_a2 * std::exp(-slow * 1.0)).epsilon(1e-12));
    CHECK(cert.min_slack() >= -kSlackTolerance);

    const auto cold = pair.state(Preparation::cold);
    const auto at0 = lemma2_slow_mode(cold, 0.0);
    CHECK(at0.lower_rhs == Approx(-at0.slow.b_of_t));
    const auto c = lemma2_slow_mode(cold, 1 / slow);
    CHECK(c.lower_slack >= 0);
    CHECK(c.upper_slack >= -kSlackTolerance);
    CHECK(c.dT_a2_slack >= 0);
}

TEST_CASE("lemma 3 metric bounds")
{
    VectorXd half(2);
    half << 0.5, 0.5;
    const std::vector<VectorXd> one{half};
    const auto b = lemma3_metric_bounds(one);
    CHECK(b.m == 2.0);
    CHECK(b.M == 2.0);

    const VectorXd pi = LambdaSpec{}.rate_matrix().stationary();
    const std::vector<VectorXd> eq{pi};
    const auto be = lemma3_metric_bounds(eq);
    CHECK(be.m == Approx(1 / 0.46831053).epsilon(1e-6));
    CHECK(be.M == Approx(15.778).epsilon(1e-4));

    testing::InstanceGenerator gen(5);
    for (int i = 0; i < 1000; ++i) {
        const VectorXd x = gen.simplex_point(3) - gen.simplex_point(3);
        CHECK(quadratic_form_slack(pi, x, be) >= -1e-15);
    }

    VectorXd edge(3);
    edge << 0.5, 0.5 - 1e-7, 1e-7;
    const std::vector<VectorXd> bad{edge};
    CHECK_THROWS_AS(lemma3_metric_bounds(bad), DomainError);
}

TEST_CASE("FI gap bound limits")
{
    VectorXd v2(3);
    v2 << 1, -1, 0;
    v2.normalize();
    const VectorXd zero = VectorXd::Zero(3);
    const auto no_rem = lemma3_fi_gap_bound(0.3, 0.1, zero, zero, v2, 2.0);
    CHECK(no_rem.value == Approx(2.0 * 0.04));
    CHECK(no_rem.informative);
    VectorXd r(3);
    r << 0.1, 0.0, -0.1;
    const auto no_slow = lemma3_fi_gap_bound(0.2, 0.2, r, zero, v2, 2.0);
    CHECK(no_slow.value == Approx(-2.0 * r.squaredNorm()));
    CHECK_FALSE(no_slow.informative);
}

TEST_CASE("FI gap bound counterexample on the symmetric probe")
{
    // The bound is positive near t = 1/lambda_2 while F_hot - F_cold is negative.
    const auto pair = symmetric_pair();
    const auto hot = pair.state(Preparation::hot);
    const auto cold = pair.state(Preparation::cold);
    const double t = 1 / hot.spectrum.slowest_rate();
    const auto lh = lemma2_slow_mode(hot, t);
    const auto lc = lemma2_slow_mode(cold, t);
    const std::vector<VectorXd> hull{hot.populations(t), cold.populations(t), hot.spectrum.stationary};
    const auto m = lemma3_metric_bounds(hull);
    const auto bound = lemma3_fi_gap_bound(lh.slow.s_of_t, lc.slow.s_of_t, remainder_vector(hot, t),
                                           remainder_vector(cold, t), hot.spectrum.right(1), m.m);
    CHECK(bound.informative);
    CHECK(hot.fisher(t) - cold.fisher(t) < bound.value);
}

TEST_CASE("qubit certificate")
{
    const QubitPair pair{{1, 1, 0.5, 1}, 0.9, 0.5};
    const auto cert = verify_theorem(pair);
    REQUIRE(cert.applicable);
    CHECK(*cert.inversion.t_star == Approx(1.36714).epsilon(1e-5));
    CHECK(cert.hypothesis == HypothesisCase::closed_form_qubit);
    CHECK(*cert.crossover_bound == Approx(1.36714).epsilon(1e-5));
    CHECK(cert.fisher_hot == Approx(qfi_qubit_closed_form(pair.params, 0.9, *cert.inversion.t_star)));
    // Closed-form values at t*: F_hot < F_cold < F_eq.
    CHECK_FALSE(cert.hot_exceeds_cold);
    CHECK(*cert.first_violation == "ordering.hot_exceeds_cold");

    const auto text = to_record_text(cert);
    CHECK(text.find("inversion.t_star = 1.3671") != std::string::npos);
    CHECK(text.find("ordering.hot_exceeds_cold = false") != std::string::npos);

    const QubitPair closed{{1, 1, 0.5, 0}, 0.9, 0.5};
    const auto na = verify_theorem(closed);
    CHECK_FALSE(na.applicable);
    CHECK(to_record_text(na).find("status = not_applicable") != std::string::npos);
}

TEST_CASE("Lambda case-B certificate")
{
    const auto cert = verify_theorem(symmetric_pair());
    REQUIRE(cert.applicable);
    CHECK(cert.hypothesis == HypothesisCase::strong_cancellation);
    REQUIRE(cert.lemma1_hot);
    CHECK(cert.lemma1_hot->min_slack() >= -kSlackTolerance);
    CHECK(cert.lemma1_cold->min_slack() >= -kSlackTolerance);
    CHECK(cert.lemma2_hot->min_slack() >= -kSlackTolerance);
    CHECK(cert.lemma2_cold->min_slack() >= -kSlackTolerance);
    CHECK(cert.metric_slack >= -kSlackTolerance);
    CHECK(to_record_text(cert).find("hypothesis = strong_cancellation") != std::string::npos);
}

TEST_CASE("certificates on random instances")
{
    testing::InstanceGenerator gen(2024);
    int lambda_chain_failures = 0;
    int vprime_chain_failures = 0;
    for (int i = 0; i < 100; ++i) {
        const auto inst = gen.instance();
        const auto state = make_modal_state(inst.spec.rate_matrix(), inst.p0);
        const double slow = state.spectrum.slowest_rate();
        for (double t : {0.0, 0.5 / slow, 1 / slow, 3 / slow}) {
            CHECK(lemma1_remainder_check(state, t).min_slack() >= -kSlackTolerance);
            CHECK(lemma2_slow_mode(state, t).min_slack() >= -kSlackTolerance);
        }
        const auto c = lemma_constants(state, 1 / slow);
        lambda_chain_failures += c.lambda_t > c.r_t * c.w_op_norm * c.v_op_norm + 1e-12 ? 1 : 0;
        vprime_chain_failures += c.v_prime_max > c.r_t * c.w_op_norm * c.v_op_norm / c.gap_delta + 1e-12 ? 1 : 0;
    }
    CHECK(lambda_chain_failures == 0);
    MESSAGE("V' chain violations (stationary-mode coupling): " << vprime_chain_failures);
}
