#pragma once

// Numerical certificates for the Mpemba-advantage theorem: every explicit
// constant of the remainder, slow-mode and quadratic-form lemmas, evaluated on
// a concrete probe, with the slack of each inequality recorded.
//
// Norms are Euclidean for vectors and induced 2-norms (largest singular value)
// for matrices. V collects the right modes k >= 1 as columns, W the left modes
// k >= 1 as rows (zero-based mode indices, mode 0 stationary).

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mpemba/mpemba_detect.hpp"
#include "mpemba/probe.hpp"

namespace mpemba {

inline constexpr double kSlackTolerance = 1e-12;

struct LemmaConstants {
    int dim = 0;
    double a_max = 0;
    double v_max = 0;
    /// max_k ||dv_k/dT||, k >= 1.
    double v_prime_max = 0;
    /// max_k ||dw_k/dT||, k >= 1.
    double w_prime_max = 0;
    double gap_delta = 0;
    double lambda_max = 0;
    /// max over fast modes (k >= 2) of |d lambda_k / dT|.
    double lambda_t = 0;
    /// ||dR/dT||.
    double r_t = 0;
    double w_op_norm = 0;
    double v_op_norm = 0;
    double c1 = 0;
    double c_r1 = 0;
    double c_r2 = 0;
    double c_r = 0;
    /// (sum_{j != slow} ||w_j||^2)^{1/2}.
    double w_norm = 0;
    double d2 = 0;
    double e2 = 0;
    double m_low = 0;
    double m_high = 0;
    double deviation_norm = 0;
    double dT_stationary_norm = 0;
    double time = 0;
};

/// Constants of one preparation at time t (C_R depends on t). m_low/m_high are
/// left at zero; they come from lemma3_metric_bounds.
LemmaConstants lemma_constants(const ModalState& state, double t);

struct Lemma1Certificate {
    double t = 0;
    double fast_sum_norm = 0;
    double fast_sum_bound = 0;
    double fast_sum_slack = 0;
    double remainder_norm = 0;
    /// C_R1 e^{-lambda_3 t} + C_R2 e^{-lambda_2 t}.
    double remainder_bound = 0;
    double remainder_slack = 0;
    /// C_R (e^{-lambda_3 t} + A_max e^{-lambda_2 t}).
    double combined_bound = 0;
    double combined_slack = 0;
    LemmaConstants constants;

    double min_slack() const;
};

/// Remainder bound of the fast-mode sum and of the non-slow part of dp/dT.
Lemma1Certificate lemma1_remainder_check(const ModalState& state, double t);

/// Remainder vector R(t) = sum_{k>=2} da_k e v_k - sum_{k>=2} a_k t e dlambda_k v_k
/// + sum_{k>=1} a_k e dv_k.
VectorXd remainder_vector(const ModalState& state, double t);

struct SlowModeSensitivity {
    double s_of_t = 0;
    double b_of_t = 0;
    double a2 = 0;
    double dT_a2 = 0;
    double dT_lambda2 = 0;
};

struct Lemma2Certificate {
    double t = 0;
    SlowModeSensitivity slow;
    double lower_lhs = 0;
    double lower_rhs = 0;
    double lower_slack = 0;
    /// |S| <= (|da_2| + t |a_2| |dlambda_2|) e^{-lambda_2 t}.
    double upper_rhs = 0;
    double upper_slack = 0;
    double dT_a2_abs = 0;
    double dT_a2_bound = 0;
    double dT_a2_slack = 0;

    double min_slack() const;
};

Lemma2Certificate lemma2_slow_mode(const ModalState& state, double t);

struct MetricBounds {
    double m = 0;
    double M = 0;
};

/// m = min over points of min_i 1/p_i, M = max over points of max_i 1/p_i. For
/// a convex hull the extremes sit at the vertices, so passing the hull vertices
/// gives the bounds of the whole hull.
MetricBounds lemma3_metric_bounds(std::span<const VectorXd> points, double margin = 1e-6);

/// min(x'Gx - m|x|^2, M|x|^2 - x'Gx) with G = diag(1/p).
double quadratic_form_slack(const VectorXd& p, const VectorXd& x, const MetricBounds& bounds);

struct FiGapBound {
    double value = 0;
    double slow_norm = 0;
    double remainder_norm = 0;
    /// A positive bound is a statement about F_hot - F_cold; otherwise uninformative.
    bool informative = false;
};

FiGapBound lemma3_fi_gap_bound(double s_hot, double s_cold, const VectorXd& r_hot, const VectorXd& r_cold,
                               const VectorXd& v2, double m);

enum class HypothesisCase { closed_form_qubit, strong_cancellation, monotone_variation };
std::string to_string(HypothesisCase c);

struct TheoremCertificate {
    std::string model;
    bool applicable = false;
    std::string not_applicable_reason;
    InversionRecord inversion;
    std::optional<double> crossover_bound;

    HypothesisCase hypothesis = HypothesisCase::closed_form_qubit;
    double kappa0 = 0;

    std::optional<Lemma1Certificate> lemma1_hot;
    std::optional<Lemma1Certificate> lemma1_cold;
    std::optional<Lemma2Certificate> lemma2_hot;
    std::optional<Lemma2Certificate> lemma2_cold;
    std::optional<MetricBounds> metric;
    double metric_slack = 0;
    std::optional<FiGapBound> gap_bound;

    double fisher_hot = 0;
    double fisher_cold = 0;
    double fisher_equilibrium = 0;
    bool hot_exceeds_cold = false;
    bool cold_at_least_equilibrium = false;
    HierarchyReport hierarchy;

    /// Name of the first inequality that failed, in evaluation order.
    std::optional<std::string> first_violation;
    std::vector<std::string> counterexamples;
};

/// Runs inversion detection on the pair and, when an inversion exists,
/// evaluates every certificate at t*. `grid` defaults to the standard
/// inversion grid when empty.
TheoremCertificate verify_theorem(const QubitPair& pair, std::span<const double> grid = {},
                                  double delta_tol = 0.0, DistanceKind kind = DistanceKind::scalar_abs);
TheoremCertificate verify_theorem(const LambdaPair& pair, std::span<const double> grid = {},
                                  double delta_tol = 0.0, DistanceKind kind = DistanceKind::euclidean);

/// "key = value" lines, one per certificate field.
std::string to_record_text(const TheoremCertificate& cert);

} // namespace mpemba
