#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mpemba/probe.hpp"
#include "mpemba/qubit.hpp"
#include "mpemba/types.hpp"

namespace mpemba {

enum class DistanceKind { euclidean, total_variation, scalar_abs };

std::string to_string(DistanceKind kind);
DistanceKind parse_distance_kind(const std::string& name);

/// |p - p_eq| for the excited population of a qubit.
double thermal_distance(double p, double p_eq);

/// Distance of a population vector from the stationary vector. scalar_abs is
/// the excited-population distance and needs a one- or two-level vector.
double thermal_distance(const VectorXd& p, const VectorXd& pi, DistanceKind kind);

struct InversionRecord {
    /// First time at which D_hot < D_cold - delta, refined by bisection.
    std::optional<double> t_star;
    /// Grid point at which the inversion was first seen.
    std::optional<double> grid_time;
    double delta_tol = 0;
    DistanceKind norm_kind = DistanceKind::euclidean;
    /// Inversion holds at every sampled time after grid_time.
    bool persistent = false;

    bool found() const { return t_star.has_value(); }
};

/// Uniform grid of `points` samples on [0, 10 / lambda_slow].
std::vector<double> default_inversion_grid(double lambda_slow, int points = 2000);

InversionRecord detect_inversion(const TrajectoryFn& hot, const TrajectoryFn& cold, const VectorXd& pi,
                                 std::span<const double> grid, double delta_tol, DistanceKind kind);

/// ln[(p_hot - p_eq)/(p_cold - p_eq)] / (Gamma_hot - Gamma_cold); empty when
/// Gamma_hot <= Gamma_cold (no inversion), 0 for identical preparations.
std::optional<double> crossover_time_bound(const QubitBathParams<double>& params, double p0_hot, double p0_cold);

/// log10(F_hot / F_ref).
double qfi_gain(double fisher_hot, double fisher_ref);
std::vector<double> qfi_gain(std::span<const double> fisher_hot, std::span<const double> fisher_ref);

struct HierarchyRow {
    double t;
    double fisher_hot;
    double fisher_cold;
    bool hot_exceeds_cold;
    bool cold_at_least_equilibrium;
};

struct HierarchyReport {
    bool applicable = false;
    double fisher_equilibrium = 0;
    std::vector<HierarchyRow> rows;
    bool all_true = false;
    std::optional<double> first_violation;
    /// Sub-window of t >= t* on which both orderings hold, if any.
    std::optional<double> window_begin;
    std::optional<double> window_end;
};

/// Evaluates F_hot(t) > F_cold(t) >= F_eq for every grid t >= t_star. Not
/// applicable when no inversion time is supplied.
HierarchyReport theorem_hierarchy_check(const FisherFn& hot, const FisherFn& cold, double fisher_equilibrium,
                                        std::optional<double> t_star, std::span<const double> grid);

} // namespace mpemba
