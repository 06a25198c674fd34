#include "mpemba/theorem.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace mpemba {

namespace {

double operator_norm(const MatrixXd& m)
{
    if (m.size() == 0) {
        return 0.0;
    }
    Eigen::JacobiSVD<MatrixXd> svd(m);
    return svd.singularValues()(0);
}

void require_multilevel(const ModalState& state)
{
    detail::require(state.spectrum.dim() >= 3, "slow-mode certificates need at least three levels");
}

std::string fmt(double x)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string fmt(bool b)
{
    return b ? "true" : "false";
}

} // namespace

LemmaConstants lemma_constants(const ModalState& state, double t)
{
    require_multilevel(state);
    const auto& d = state.spectrum;
    const auto& dv = state.derivatives;
    const auto n = d.dim();
    const auto relax = n - 1;

    LemmaConstants c;
    c.dim = static_cast<int>(n);
    c.time = t;

    const VectorXd a = state.amplitudes.amplitudes.tail(relax);
    c.a_max = a.cwiseAbs().maxCoeff();
    const MatrixXd v = d.right_modes.rightCols(relax);
    const MatrixXd w = d.left_modes.bottomRows(relax);
    c.v_max = v.colwise().norm().maxCoeff();
    c.v_prime_max = dv.dT_right_modes.rightCols(relax).colwise().norm().maxCoeff();
    c.w_prime_max = dv.dT_left_modes.bottomRows(relax).rowwise().norm().maxCoeff();
    c.gap_delta = d.eigenvalues(2) - d.eigenvalues(1);
    c.lambda_max = d.eigenvalues.maxCoeff();
    c.lambda_t = dv.dT_eigenvalues.tail(n - 2).cwiseAbs().maxCoeff();
    c.r_t = operator_norm(dv.dT_generator);
    c.w_op_norm = operator_norm(w);
    c.v_op_norm = operator_norm(v);

    c.deviation_norm = (state.amplitudes.initial - d.stationary).norm();
    c.dT_stationary_norm = dv.dT_stationary.norm();

    const double nd = static_cast<double>(n);
    c.c1 = (c.v_prime_max + c.w_prime_max) * c.deviation_norm + c.w_op_norm * c.dT_stationary_norm;
    c.c_r1 = c.v_max * (nd - 2) * c.c1 + c.v_max * t * c.lambda_t * (nd - 2) * c.a_max;
    c.c_r2 = (nd - 1) * c.a_max * c.v_prime_max;
    c.c_r = c.a_max > 0 ? std::max(c.c_r1, c.c_r2 / c.a_max) : c.c_r1;

    double w_sq = 0;
    double d2_sq = 0;
    double e2_sq = 0;
    for (Eigen::Index j = 0; j < n; ++j) {
        if (j == 1) {
            continue;
        }
        const double gap = d.eigenvalues(1) - d.eigenvalues(j);
        const double wj = d.left_modes.row(j).norm();
        const double vj = d.right_modes.col(j).norm();
        w_sq += wj * wj;
        d2_sq += wj * wj / (gap * gap);
        e2_sq += vj * vj / (gap * gap);
    }
    c.w_norm = std::sqrt(w_sq);
    c.d2 = std::sqrt(d2_sq);
    c.e2 = std::sqrt(e2_sq);
    return c;
}

double Lemma1Certificate::min_slack() const
{
    return std::min({fast_sum_slack, remainder_slack, combined_slack});
}

VectorXd remainder_vector(const ModalState& state, double t)
{
    const auto& d = state.spectrum;
    const auto& dv = state.derivatives;
    const auto& amp = state.amplitudes;
    VectorXd r = VectorXd::Zero(d.dim());
    for (Eigen::Index k = 1; k < d.dim(); ++k) {
        const double decay = std::exp(-d.eigenvalues(k) * t);
        if (k >= 2) {
            r += amp.dT_amplitudes(k) * decay * d.right_modes.col(k);
            r -= amp.amplitudes(k) * t * decay * dv.dT_eigenvalues(k) * d.right_modes.col(k);
        }
        r += amp.amplitudes(k) * decay * dv.dT_right_modes.col(k);
    }
    return r;
}

Lemma1Certificate lemma1_remainder_check(const ModalState& state, double t)
{
    require_multilevel(state);
    detail::require(t >= 0, "time must be non-negative");
    const auto& d = state.spectrum;
    Lemma1Certificate cert;
    cert.t = t;
    cert.constants = lemma_constants(state, t);
    const auto& c = cert.constants;
    if (!std::isfinite(c.c_r) || !std::isfinite(c.c1) || !std::isfinite(c.r_t)) {
        throw NumericalError("lemma constants are not finite");
    }

    VectorXd fast = VectorXd::Zero(d.dim());
    for (Eigen::Index k = 2; k < d.dim(); ++k) {
        fast += state.amplitudes.amplitudes(k) * std::exp(-d.eigenvalues(k) * t) * d.right_modes.col(k);
    }
    const double slow_decay = std::exp(-d.eigenvalues(1) * t);
    const double fast_decay = std::exp(-d.eigenvalues(2) * t);
    cert.fast_sum_norm = fast.norm();
    cert.fast_sum_bound = c.a_max * c.v_max * static_cast<double>(d.dim() - 2) * fast_decay;
    cert.fast_sum_slack = cert.fast_sum_bound - cert.fast_sum_norm;

    cert.remainder_norm = remainder_vector(state, t).norm();
    cert.remainder_bound = c.c_r1 * fast_decay + c.c_r2 * slow_decay;
    cert.remainder_slack = cert.remainder_bound - cert.remainder_norm;
    cert.combined_bound = c.c_r * (fast_decay + c.a_max * slow_decay);
    cert.combined_slack = cert.combined_bound - cert.remainder_norm;
    return cert;
}

double Lemma2Certificate::min_slack() const
{
    return std::min({lower_slack, upper_slack, dT_a2_slack});
}

Lemma2Certificate lemma2_slow_mode(const ModalState& state, double t)
{
    require_multilevel(state);
    detail::require(t >= 0, "time must be non-negative");
    const auto& d = state.spectrum;
    Lemma2Certificate cert;
    cert.t = t;

    auto& s = cert.slow;
    s.a2 = state.amplitudes.amplitudes(1);
    s.dT_a2 = state.amplitudes.dT_amplitudes(1);
    s.dT_lambda2 = state.derivatives.dT_eigenvalues(1);
    const double decay = std::exp(-d.eigenvalues(1) * t);
    s.s_of_t = (s.dT_a2 - s.a2 * t * s.dT_lambda2) * decay;
    s.b_of_t = (std::abs(s.dT_a2) + std::abs(s.a2) * std::abs(s.dT_lambda2)) * decay;

    cert.lower_lhs = std::abs(s.s_of_t);
    cert.lower_rhs = t * std::abs(s.a2) * std::abs(s.dT_lambda2) * decay - s.b_of_t;
    cert.lower_slack = cert.lower_lhs - cert.lower_rhs;
    cert.upper_rhs = (std::abs(s.dT_a2) + t * std::abs(s.a2) * std::abs(s.dT_lambda2)) * decay;
    cert.upper_slack = cert.upper_rhs - cert.lower_lhs;

    const auto c = lemma_constants(state, t);
    const double w2 = d.left_modes.row(1).norm();
    cert.dT_a2_abs = std::abs(s.dT_a2);
    cert.dT_a2_bound = c.r_t * w2 * c.e2 * c.deviation_norm + w2 * c.dT_stationary_norm;
    cert.dT_a2_slack = cert.dT_a2_bound - cert.dT_a2_abs;
    return cert;
}

MetricBounds lemma3_metric_bounds(std::span<const VectorXd> points, double margin)
{
    detail::require(!points.empty(), "neighbourhood has no points");
    MetricBounds b{std::numeric_limits<double>::infinity(), 0.0};
    for (const auto& p : points) {
        if ((p.array() <= margin).any()) {
            throw DomainError("population within the simplex-boundary margin");
        }
        b.m = std::min(b.m, p.cwiseInverse().minCoeff());
        b.M = std::max(b.M, p.cwiseInverse().maxCoeff());
    }
    return b;
}

double quadratic_form_slack(const VectorXd& p, const VectorXd& x, const MetricBounds& bounds)
{
    detail::require(p.size() == x.size(), "dimension mismatch");
    const double form = (x.array().square() / p.array()).sum();
    const double norm_sq = x.squaredNorm();
    return std::min(form - bounds.m * norm_sq, bounds.M * norm_sq - form);
}

FiGapBound lemma3_fi_gap_bound(double s_hot, double s_cold, const VectorXd& r_hot, const VectorXd& r_cold,
                               const VectorXd& v2, double m)
{
    detail::require(r_hot.size() == r_cold.size() && r_hot.size() == v2.size(), "dimension mismatch");
    FiGapBound b;
    b.slow_norm = std::abs(s_hot - s_cold) * v2.norm();
    b.remainder_norm = (r_hot - r_cold).norm();
    const double x = b.slow_norm;
    const double y = b.remainder_norm;
    b.value = m * (x * x - 2 * x * y - y * y);
    b.informative = b.value > 0;
    return b;
}

std::string to_string(HypothesisCase c)
{
    switch (c) {
    case HypothesisCase::closed_form_qubit:
        return "closed_form_qubit";
    case HypothesisCase::strong_cancellation:
        return "strong_cancellation";
    case HypothesisCase::monotone_variation:
        return "monotone_variation";
    }
    return "unknown";
}

namespace {

void note_violation(TheoremCertificate& cert, const std::string& name, double slack)
{
    if (slack >= -kSlackTolerance) {
        return;
    }
    if (!cert.first_violation) {
        cert.first_violation = name;
    }
    cert.counterexamples.push_back(name + " slack=" + fmt(slack) + " t=" + fmt(*cert.inversion.t_star));
}

void finish_ordering(TheoremCertificate& cert, const FisherFn& hot, const FisherFn& cold,
                     std::span<const double> grid)
{
    const double t = *cert.inversion.t_star;
    cert.fisher_hot = hot(t);
    cert.fisher_cold = cold(t);
    cert.hot_exceeds_cold = cert.fisher_hot > cert.fisher_cold;
    cert.cold_at_least_equilibrium = cert.fisher_cold >= cert.fisher_equilibrium;
    if (!cert.hot_exceeds_cold && !cert.first_violation) {
        cert.first_violation = "ordering.hot_exceeds_cold";
    }
    if (!cert.cold_at_least_equilibrium && !cert.first_violation) {
        cert.first_violation = "ordering.cold_at_least_equilibrium";
    }
    cert.hierarchy = theorem_hierarchy_check(hot, cold, cert.fisher_equilibrium, t, grid);
}

} // namespace

TheoremCertificate verify_theorem(const QubitPair& pair, std::span<const double> grid, double delta_tol,
                                  DistanceKind kind)
{
    TheoremCertificate cert;
    cert.model = "qubit";
    cert.hypothesis = HypothesisCase::closed_form_qubit;
    std::vector<double> own_grid;
    if (grid.empty()) {
        own_grid = default_inversion_grid(pair.slowest_rate());
        grid = own_grid;
    }
    cert.fisher_equilibrium = pair.equilibrium_fisher();
    cert.inversion = detect_inversion(pair.trajectory(Preparation::hot), pair.trajectory(Preparation::cold),
                                      pair.stationary(), grid, delta_tol, kind);
    if (pair.p0_cold > pair.p_eq()) {
        cert.crossover_bound = crossover_time_bound(pair.params, pair.p0_hot, pair.p0_cold);
    }
    if (!cert.inversion.found()) {
        cert.not_applicable_reason = "no inversion detected";
        return cert;
    }
    cert.applicable = true;
    finish_ordering(cert, pair.fisher(Preparation::hot), pair.fisher(Preparation::cold), grid);
    return cert;
}

TheoremCertificate verify_theorem(const LambdaPair& pair, std::span<const double> grid, double delta_tol,
                                  DistanceKind kind)
{
    TheoremCertificate cert;
    cert.model = "lambda";
    const ModalState hot = pair.state(Preparation::hot);
    const ModalState cold = pair.state(Preparation::cold);
    std::vector<double> own_grid;
    if (grid.empty()) {
        own_grid = default_inversion_grid(hot.spectrum.slowest_rate());
        grid = own_grid;
    }
    cert.fisher_equilibrium = pair.equilibrium_fisher();
    auto hot_traj = [&hot](double t) { return hot.populations(t); };
    auto cold_traj = [&cold](double t) { return cold.populations(t); };
    cert.inversion = detect_inversion(hot_traj, cold_traj, hot.spectrum.stationary, grid, delta_tol, kind);
    if (!cert.inversion.found()) {
        cert.not_applicable_reason = "no inversion detected";
        return cert;
    }
    cert.applicable = true;
    const double t = *cert.inversion.t_star;

    const double a2_hot = hot.amplitudes.amplitudes(1);
    if (std::abs(a2_hot) < 1e-10) {
        cert.hypothesis = HypothesisCase::strong_cancellation;
    } else {
        cert.hypothesis = HypothesisCase::monotone_variation;
    }
    cert.kappa0 = std::abs(hot.derivatives.dT_eigenvalues(1)) - std::abs(cold.derivatives.dT_eigenvalues(1));

    cert.lemma1_hot = lemma1_remainder_check(hot, t);
    cert.lemma1_cold = lemma1_remainder_check(cold, t);
    note_violation(cert, "lemma1.hot", cert.lemma1_hot->min_slack());
    note_violation(cert, "lemma1.cold", cert.lemma1_cold->min_slack());

    cert.lemma2_hot = lemma2_slow_mode(hot, t);
    cert.lemma2_cold = lemma2_slow_mode(cold, t);
    note_violation(cert, "lemma2.hot", cert.lemma2_hot->min_slack());
    note_violation(cert, "lemma2.cold", cert.lemma2_cold->min_slack());

    const std::vector<VectorXd> hull{hot.populations(t), cold.populations(t), hot.spectrum.stationary};
    cert.metric = lemma3_metric_bounds(hull);
    const VectorXd u_hot = hot.dT_populations(t);
    const VectorXd u_cold = cold.dT_populations(t);
    cert.metric_slack = std::numeric_limits<double>::infinity();
    for (const auto& p : hull) {
        for (const VectorXd& x : {u_hot, u_cold, VectorXd(u_hot - u_cold)}) {
            cert.metric_slack = std::min(cert.metric_slack, quadratic_form_slack(p, x, *cert.metric));
        }
    }
    note_violation(cert, "lemma3.metric", cert.metric_slack);

    cert.gap_bound = lemma3_fi_gap_bound(cert.lemma2_hot->slow.s_of_t, cert.lemma2_cold->slow.s_of_t,
                                         remainder_vector(hot, t), remainder_vector(cold, t),
                                         hot.spectrum.right(1), cert.metric->m);

    finish_ordering(cert, [&hot](double s) { return hot.fisher(s); }, [&cold](double s) { return cold.fisher(s); },
                    grid);
    if (cert.gap_bound->informative) {
        const double gap = cert.fisher_hot - cert.fisher_cold;
        note_violation(cert, "lemma3.fi_gap_bound", gap - cert.gap_bound->value);
    }
    return cert;
}

std::string to_record_text(const TheoremCertificate& cert)
{
    std::ostringstream out;
    auto kv = [&out](const std::string& key, const std::string& value) { out << key << " = " << value << '\n'; };
    kv("model", cert.model);
    kv("applicable", fmt(cert.applicable));
    if (!cert.applicable) {
        kv("status", "not_applicable");
        kv("reason", cert.not_applicable_reason);
        kv("inversion", "none");
        return out.str();
    }
    kv("status", cert.first_violation ? "violated" : "certified");
    kv("inversion.t_star", fmt(*cert.inversion.t_star));
    kv("inversion.delta_tol", fmt(cert.inversion.delta_tol));
    kv("inversion.norm_kind", to_string(cert.inversion.norm_kind));
    kv("inversion.persistent", fmt(cert.inversion.persistent));
    if (cert.crossover_bound) {
        kv("crossover_bound", fmt(*cert.crossover_bound));
    }
    kv("hypothesis", to_string(cert.hypothesis));
    if (cert.hypothesis != HypothesisCase::closed_form_qubit) {
        kv("kappa0", fmt(cert.kappa0));
    }

    auto constants = [&](const std::string& prefix, const LemmaConstants& c) {
        kv(prefix + ".a_max", fmt(c.a_max));
        kv(prefix + ".v_max", fmt(c.v_max));
        kv(prefix + ".v_prime_max", fmt(c.v_prime_max));
        kv(prefix + ".w_prime_max", fmt(c.w_prime_max));
        kv(prefix + ".gap_delta", fmt(c.gap_delta));
        kv(prefix + ".lambda_max", fmt(c.lambda_max));
        kv(prefix + ".lambda_t", fmt(c.lambda_t));
        kv(prefix + ".r_t", fmt(c.r_t));
        kv(prefix + ".w_op_norm", fmt(c.w_op_norm));
        kv(prefix + ".v_op_norm", fmt(c.v_op_norm));
        kv(prefix + ".c1", fmt(c.c1));
        kv(prefix + ".c_r1", fmt(c.c_r1));
        kv(prefix + ".c_r2", fmt(c.c_r2));
        kv(prefix + ".c_r", fmt(c.c_r));
        kv(prefix + ".w_norm", fmt(c.w_norm));
        kv(prefix + ".d2", fmt(c.d2));
        kv(prefix + ".e2", fmt(c.e2));
    };
    auto lemma1 = [&](const std::string& prefix, const Lemma1Certificate& l) {
        constants(prefix + ".constants", l.constants);
        kv(prefix + ".fast_sum_norm", fmt(l.fast_sum_norm));
        kv(prefix + ".fast_sum_bound", fmt(l.fast_sum_bound));
        kv(prefix + ".fast_sum_slack", fmt(l.fast_sum_slack));
        kv(prefix + ".remainder_norm", fmt(l.remainder_norm));
        kv(prefix + ".remainder_bound", fmt(l.remainder_bound));
        kv(prefix + ".remainder_slack", fmt(l.remainder_slack));
        kv(prefix + ".combined_bound", fmt(l.combined_bound));
        kv(prefix + ".combined_slack", fmt(l.combined_slack));
    };
    auto lemma2 = [&](const std::string& prefix, const Lemma2Certificate& l) {
        kv(prefix + ".s_of_t", fmt(l.slow.s_of_t));
        kv(prefix + ".b_of_t", fmt(l.slow.b_of_t));
        kv(prefix + ".a2", fmt(l.slow.a2));
        kv(prefix + ".dT_a2", fmt(l.slow.dT_a2));
        kv(prefix + ".dT_lambda2", fmt(l.slow.dT_lambda2));
        kv(prefix + ".lower_slack", fmt(l.lower_slack));
        kv(prefix + ".upper_slack", fmt(l.upper_slack));
        kv(prefix + ".dT_a2_bound", fmt(l.dT_a2_bound));
        kv(prefix + ".dT_a2_slack", fmt(l.dT_a2_slack));
    };
    if (cert.lemma1_hot) {
        lemma1("lemma1.hot", *cert.lemma1_hot);
        lemma1("lemma1.cold", *cert.lemma1_cold);
        lemma2("lemma2.hot", *cert.lemma2_hot);
        lemma2("lemma2.cold", *cert.lemma2_cold);
    }
    if (cert.metric) {
        kv("lemma3.m", fmt(cert.metric->m));
        kv("lemma3.M", fmt(cert.metric->M));
        kv("lemma3.metric_slack", fmt(cert.metric_slack));
    }
    if (cert.gap_bound) {
        kv("lemma3.fi_gap_bound", fmt(cert.gap_bound->value));
        kv("lemma3.fi_gap_informative", fmt(cert.gap_bound->informative));
    }
    kv("fisher.hot", fmt(cert.fisher_hot));
    kv("fisher.cold", fmt(cert.fisher_cold));
    kv("fisher.equilibrium", fmt(cert.fisher_equilibrium));
    kv("ordering.hot_exceeds_cold", fmt(cert.hot_exceeds_cold));
    kv("ordering.cold_at_least_equilibrium", fmt(cert.cold_at_least_equilibrium));
    kv("hierarchy.all_true", fmt(cert.hierarchy.all_true));
    if (cert.hierarchy.first_violation) {
        kv("hierarchy.first_violation", fmt(*cert.hierarchy.first_violation));
    }
    if (cert.hierarchy.window_begin) {
        kv("hierarchy.window_begin", fmt(*cert.hierarchy.window_begin));
        kv("hierarchy.window_end", fmt(*cert.hierarchy.window_end));
    }
    if (cert.first_violation) {
        kv("first_violation", *cert.first_violation);
    }
    for (std::size_t i = 0; i < cert.counterexamples.size(); ++i) {
        kv("counterexample." + std::to_string(i), cert.counterexamples[i]);
    }
    return out.str();
}

} // namespace mpemba
