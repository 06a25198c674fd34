// Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any FAIL.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <string>
#include <vector>

#include "instances.hpp"
#include "mpemba/fisher.hpp"
#include "mpemba/mpemba_detect.hpp"
#include "mpemba/oracle.hpp"
#include "mpemba/protocol.hpp"
#include "mpemba/theorem.hpp"

using namespace mpemba;

namespace {

using Clock = std::chrono::steady_clock;

const QubitBathParams<double> reference{1.0, 1.0, 0.5, 1.0};

int failures = 0;

void report(int id, bool ok, const std::string& detail)
{
    std::printf("criterion %2d: %s  %s\n", id, ok ? "PASS" : "FAIL", detail.c_str());
    failures += ok ? 0 : 1;
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0)
{
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c, d);
    return buf;
}

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

double relative(double a, double b)
{
    return std::abs(a - b) / std::max(std::abs(b), 1e-12);
}

double relative(const VectorXd& a, const VectorXd& b)
{
    return (a - b).norm() / std::max(b.norm(), 1e-12);
}

void crossover()
{
    const auto t0 = Clock::now();
    const QubitPair pair{reference, 0.9, 0.5};
    const auto grid = default_inversion_grid(pair.slowest_rate());
    const auto rec = detect_inversion(pair.trajectory(Preparation::hot), pair.trajectory(Preparation::cold),
                                      pair.stationary(), grid, 0.0, DistanceKind::scalar_abs);
    const auto bound = crossover_time_bound(reference, 0.9, 0.5);

    oracle::IntegratorConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_end = 5;
    double worst = 0;
    for (double p0 : {0.9, 0.5}) {
        const auto traj = oracle::integrate_qubit(reference, p0, cfg);
        for (std::size_t i = 0; i < traj.times.size(); ++i) {
            worst = std::max(worst, std::abs(traj.states[i](0) - evolve_population(reference, p0, traj.times[i])));
        }
    }
    const double elapsed = seconds_since(t0);
    const bool ok = rec.found() && bound && std::abs(*rec.t_star - 1.36714) < 1e-5 &&
                    std::abs(*rec.t_star - *bound) < 1e-5 && worst < 1e-8 && elapsed < 1.0;
    report(1, ok,
           fmt("t*=%.8f (nominal 1.36714) closed-form=%.8f rk4_err=%.2e time=%.3fs", rec.t_star.value_or(NAN), bound.value_or(NAN),
               worst, elapsed));
}

void equilibrium_qfi()
{
    const double f_eq = qfi_equilibrium(1.0, 0.5);
    const long long shots = 1000000;
    const double h = 0.01;
    // Same stream on both sides of T: common random numbers.
    const auto up = sample_population(gibbs_population_qubit(1.0, 0.5 + h), shots, 2024, 0);
    const auto down = sample_population(gibbs_population_qubit(1.0, 0.5 - h), shots, 2024, 0);
    const auto mid = sample_population(gibbs_population_qubit(1.0, 0.5), shots, 2025, 0);
    const double slope = (up.fraction() - down.fraction()) / (2 * h);
    const double p = mid.fraction();
    const double f_fd = slope * slope / (p * (1 - p));
    const bool ok = std::abs(f_eq - 1.6799) < 1e-3 && relative(f_fd, f_eq) < 0.10;
    report(2, ok, fmt("F_eq=%.6f sampled_fd=%.4f rel=%.3f", f_eq, f_fd, relative(f_fd, f_eq)));
}

void hierarchy()
{
    const QubitPair pair{reference, 0.9, 0.5};
    const auto cert = verify_theorem(pair);
    const auto grid = default_inversion_grid(pair.slowest_rate());
    const auto fh = pair.fisher(Preparation::hot);
    const double f_eq = pair.equilibrium_fisher();
    int window = 0;
    for (double t : grid) {
        window += qfi_gain(fh(t), f_eq) > 0 ? 1 : 0;
    }
    const bool ordering = cert.applicable && cert.hot_exceeds_cold && cert.cold_at_least_equilibrium;
    report(3, ordering && window > 0,
           fmt("F_hot(t*)=%.5f F_cold(t*)=%.5f F_eq=%.5f positive-gain grid points=%.0f", cert.fisher_hot,
               cert.fisher_cold, cert.fisher_equilibrium, window));
}

void modal_vs_rk4()
{
    testing::InstanceGenerator gen(401);
    double worst = 0;
    for (int i = 0; i < 100; ++i) {
        const auto spec = gen.spec(0.1);
        const VectorXd p0 = gen.simplex_point(3);
        const auto rates = spec.rate_matrix();
        const auto d = decompose(rates);
        const auto a = project_initial(d, p0);
        oracle::IntegratorConfig cfg;
        cfg.dt = 1e-3;
        cfg.t_end = 20;
        cfg.record_every = 50;
        const auto traj = oracle::integrate_rate_equation(rates.entries(), p0, cfg);
        for (std::size_t k = 0; k < traj.times.size(); ++k) {
            const VectorXd diff = traj.states[k] - evolve_modal(d, a, traj.times[k]).populations;
            worst = std::max(worst, diff.cwiseAbs().maxCoeff());
        }
    }
    report(4, worst < 1e-8, fmt("max |modal - rk4| = %.2e over 100 instances", worst));
}

void derivative_oracles()
{
    testing::InstanceGenerator gen(505);
    double e_qubit = 0;
    double e_pop = 0;
    double e_val = 0;
    double e_vec = 0;
    for (int i = 0; i < 50; ++i) {
        const QubitBathParams<double> q{gen.uniform(0.5, 2), gen.uniform(0.3, 2), gen.uniform(0.3, 1.5),
                                        gen.uniform(0, 2)};
        const double p0 = gen.uniform(0.05, 0.95);
        const double t = gen.uniform(0.1, 4);
        auto pop = [&](double T) { return evolve_population(QubitBathParams<double>{q.omega0, q.gamma, T, q.alpha}, p0, t); };
        const auto fq = oracle::finite_difference_dT(pop, q.temperature, 1e-5 * q.temperature);
        const double dq = dT_population(q, p0, t);
        if (std::abs(fq.derivative) > 1e-6) {
            e_qubit = std::max(e_qubit, relative(dq, fq.derivative));
        }

        const auto inst = gen.instance();
        const double T = inst.spec.temperature;
        const double h = 1e-4 * T;
        auto spec_at = [&](double TT) {
            LambdaSpec s = inst.spec;
            s.temperature = TT;
            return s.rate_matrix();
        };
        const auto rates = spec_at(T);
        const auto d = decompose(rates);
        const auto derivs = spectral_derivatives(rates, d);
        const auto a = project_initial(d, inst.p0, derivs);
        const double tt = gen.uniform(0.1, 3) / d.eigenvalues(1);
        auto pops = [&](double TT) {
            const auto dd = decompose(spec_at(TT));
            return evolve_modal(dd, project_initial(dd, inst.p0), tt).populations;
        };
        e_pop = std::max(e_pop, relative(dT_populations_modal(d, a, derivs, tt),
                                         oracle::finite_difference_dT(pops, T, h).derivative));
        for (Eigen::Index k = 1; k < 3; ++k) {
            auto lam = [&](double TT) { return decompose(spec_at(TT)).eigenvalues(k); };
            e_val = std::max(e_val, relative(dT_eigenvalue(rates, d, k), oracle::finite_difference_dT(lam, T, h).derivative));
            auto vec = [&](double TT) {
                const auto dd = decompose(spec_at(TT));
                VectorXd v = dd.right(k);
                // Follow the sign convention of the reference mode.
                return v.dot(d.right(k)) < 0 ? VectorXd(-v) : v;
            };
            VectorXd fd = oracle::finite_difference_dT(vec, T, h).derivative;
            // Compare modulo the component along v_k, which the gauge fixes differently.
            fd -= d.left(k).dot(fd) * d.right(k);
            const VectorXd an = dT_eigenvector(rates, d, k);
            e_vec = std::max(e_vec, (an - fd).norm() / std::max(an.norm(), 1e-8));
        }
    }
    const bool ok = e_qubit < 1e-5 && e_pop < 1e-4 && e_val < 1e-4 && e_vec < 1e-4;
    report(5, ok,
           fmt("rel errors: dT_population=%.1e modal=%.1e eigenvalue=%.1e eigenvector=%.1e", e_qubit, e_pop, e_val,
               e_vec));
}

void lemma_certificates()
{
    testing::InstanceGenerator gen(606);
    std::vector<std::string> counterexamples;
    double worst = INFINITY;
    for (int i = 0; i < 100; ++i) {
        const auto inst = gen.instance(0.1, 0.3);
        const auto state = make_modal_state(inst.spec.rate_matrix(), inst.p0);
        const double slow = state.spectrum.slowest_rate();
        std::vector<VectorXd> hull{state.spectrum.stationary};
        for (double s : {0.0, 0.1, 0.5, 1.0, 2.0, 5.0}) {
            const double t = s / slow;
            const double l1 = lemma1_remainder_check(state, t).min_slack();
            const double l2 = lemma2_slow_mode(state, t).min_slack();
            worst = std::min({worst, l1, l2});
            if (l1 < -kSlackTolerance || l2 < -kSlackTolerance) {
                counterexamples.push_back(fmt("instance %.0f t=%.6g lemma1=%.3e lemma2=%.3e", i, t, l1, l2));
            }
            hull.push_back(state.populations(t));
        }
        const auto bounds = lemma3_metric_bounds(hull);
        for (std::size_t a = 0; a < hull.size(); ++a) {
            for (std::size_t b = 0; b < hull.size(); ++b) {
                const double s = quadratic_form_slack(hull[a], VectorXd(hull[b] - state.spectrum.stationary), bounds);
                worst = std::min(worst, s);
                if (s < -kSlackTolerance) {
                    counterexamples.push_back(fmt("instance %.0f lemma3 slack=%.3e", i, s));
                }
            }
        }
    }
    if (!counterexamples.empty()) {
        std::ofstream out("acceptance_counterexamples.txt");
        for (const auto& c : counterexamples) {
            out << c << '\n';
        }
    }
    report(6, counterexamples.empty(),
           fmt("min slack=%.3e counterexamples=%.0f", worst, static_cast<double>(counterexamples.size())));
}

void case_b()
{
    const LambdaPair pair{LambdaSpec{}, testing::symmetric_hot(), testing::symmetric_cold()};
    const auto cert = verify_theorem(pair);
    const double slow = pair.slowest_rate();
    const auto th = pair.trajectory(Preparation::hot);
    const auto tc = pair.trajectory(Preparation::cold);
    const VectorXd pi = pair.stationary();
    bool inside = false;
    for (int i = 0; i <= 200; ++i) {
        const double t = (0.1 + 9.9 * i / 200) / slow;
        inside |= thermal_distance(th(t), pi, DistanceKind::euclidean) <
                  thermal_distance(tc(t), pi, DistanceKind::euclidean);
    }
    const bool ok = cert.applicable && inside && cert.fisher_hot > cert.fisher_cold;
    report(7, ok,
           fmt("t*=%.4f window=[%.4f, %.4f] inverted-in-window=%.0f", cert.inversion.t_star.value_or(NAN), 0.1 / slow,
               10 / slow, inside ? 1.0 : 0.0) +
               fmt(" F_hot(t*)=%.4e F_cold(t*)=%.4e", cert.fisher_hot, cert.fisher_cold));
}

void estimator_quality()
{
    const auto t0 = Clock::now();
    const QubitProbeModel model;
    const long long shots = 10000;
    const auto est = replicate_estimates(model, Preparation::equilibrium, 0.0, 0.5, shots, 200, 808, 0.2, 1.5);
    const double n = static_cast<double>(est.size());
    const double mean = std::accumulate(est.begin(), est.end(), 0.0) / n;
    double abs_err = 0;
    double var = 0;
    for (double x : est) {
        abs_err += std::abs(x - 0.5);
        var += (x - mean) * (x - mean);
    }
    abs_err /= n;
    const double sd = std::sqrt(var / (n - 1));
    const double crb = std::sqrt(cramer_rao_bound(qfi_equilibrium(1.0, 0.5), shots));
    const double elapsed = seconds_since(t0);
    const bool ok = abs_err < 3 * crb && sd >= 0.8 * crb && sd <= 1.25 * crb && elapsed < 30;
    report(8, ok,
           fmt("mean|err|=%.5f std=%.5f CRB=%.5f time=%.2fs", abs_err, sd, crb, elapsed));
}

void protocol_advantage()
{
    const QubitProbeModel model;
    const long long shots = 10000;
    std::vector<double> temps;
    for (int j = 0; j < 9; ++j) {
        temps.push_back(0.3 + 0.05 * j);
    }
    std::vector<double> times;
    for (int i = 0; i <= 60; ++i) {
        times.push_back(0.05 * i);
    }
    const auto map = fisher_map(model, Preparation::hot, temps, times, shots, 909);
    const double t_arg = map.argmax_time(0.5);
    const auto hot = replicate_estimates(model, Preparation::hot, t_arg, 0.5, shots, 200, 910, 0.2, 1.5);
    const auto eq = replicate_estimates(model, Preparation::equilibrium, t_arg, 0.5, shots, 200, 910, 0.2, 1.5);
    // Paired squared-error differences.
    const double n = static_cast<double>(hot.size());
    double mean = 0;
    double var_h = 0;
    double var_e = 0;
    std::vector<double> diff(hot.size());
    for (std::size_t r = 0; r < hot.size(); ++r) {
        diff[r] = (hot[r] - 0.5) * (hot[r] - 0.5) - (eq[r] - 0.5) * (eq[r] - 0.5);
        mean += diff[r];
        var_h += (hot[r] - 0.5) * (hot[r] - 0.5);
        var_e += (eq[r] - 0.5) * (eq[r] - 0.5);
    }
    mean /= n;
    double s2 = 0;
    for (double d : diff) {
        s2 += (d - mean) * (d - mean);
    }
    const double se = std::sqrt(s2 / (n - 1) / n);
    const double z = mean / se;
    const bool ok = var_h < var_e && z < -2.0;
    report(9, ok,
           fmt("t_arg=%.3f mse_hot=%.3e mse_eq=%.3e paired z=%.2f", t_arg, var_h / n, var_e / n, z));
}

void alpha_zero()
{
    const QubitBathParams<double> closed{1.0, 1.0, 0.5, 0.0};
    int hits = 0;
    for (int i = 0; i < 10; ++i) {
        for (int j = 0; j < 10; ++j) {
            const double hot = 0.5 + 0.49 * i / 9;
            const double cold = 0.01 + 0.48 * j / 9;
            const QubitPair pair{closed, hot, cold};
            const auto grid = default_inversion_grid(pair.slowest_rate());
            const auto rec = detect_inversion(pair.trajectory(Preparation::hot), pair.trajectory(Preparation::cold),
                                              pair.stationary(), grid, 0.0, DistanceKind::scalar_abs);
            hits += rec.found() ? 1 : 0;
        }
    }
    report(10, hits == 0, fmt("inversions over 100 pairs: %.0f", hits));
}

} // namespace

int main()
{
    crossover();
    equilibrium_qfi();
    hierarchy();
    modal_vs_rk4();
    derivative_oracles();
    lemma_certificates();
    case_b();
    estimator_quality();
    protocol_advantage();
    alpha_zero();
    std::printf("acceptance: %d of 10 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
