#include "mpemba/mpemba_detect.hpp"

#include <algorithm>
#include <cmath>

namespace mpemba {

std::string to_string(DistanceKind kind)
{
    switch (kind) {
    case DistanceKind::euclidean:
        return "euclidean";
    case DistanceKind::total_variation:
        return "total_variation";
    case DistanceKind::scalar_abs:
        return "scalar_abs";
    }
    return "unknown";
}

DistanceKind parse_distance_kind(const std::string& name)
{
    if (name == "euclidean") {
        return DistanceKind::euclidean;
    }
    if (name == "total_variation") {
        return DistanceKind::total_variation;
    }
    if (name == "scalar_abs") {
        return DistanceKind::scalar_abs;
    }
    throw DomainError("unknown norm kind '" + name + "'");
}

double thermal_distance(double p, double p_eq)
{
    return std::abs(p - p_eq);
}

double thermal_distance(const VectorXd& p, const VectorXd& pi, DistanceKind kind)
{
    detail::require(p.size() == pi.size(), "population and stationary dimensions differ");
    const VectorXd diff = p - pi;
    switch (kind) {
    case DistanceKind::euclidean:
        return diff.norm();
    case DistanceKind::total_variation:
        // A one-component vector stands for (1 - p, p).
        return diff.size() == 1 ? std::abs(diff(0)) : 0.5 * diff.lpNorm<1>();
    case DistanceKind::scalar_abs:
        detail::require(diff.size() == 1 || diff.size() == 2, "scalar_abs distance needs a two-level probe");
        return std::abs(diff(diff.size() - 1));
    }
    return 0;
}

std::vector<double> default_inversion_grid(double lambda_slow, int points)
{
    detail::require(lambda_slow > 0, "slowest rate must be positive");
    detail::require(points >= 2, "grid needs at least two points");
    std::vector<double> grid(static_cast<std::size_t>(points));
    const double t_end = 10.0 / lambda_slow;
    for (int i = 0; i < points; ++i) {
        grid[static_cast<std::size_t>(i)] = t_end * i / (points - 1);
    }
    return grid;
}

InversionRecord detect_inversion(const TrajectoryFn& hot, const TrajectoryFn& cold, const VectorXd& pi,
                                 std::span<const double> grid, double delta_tol, DistanceKind kind)
{
    detail::require(!grid.empty(), "time grid is empty");
    detail::require(delta_tol >= 0, "tolerance must be non-negative");
    detail::require(std::is_sorted(grid.begin(), grid.end()), "time grid must be increasing");

    auto margin = [&](double t) {
        return thermal_distance(cold(t), pi, kind) - thermal_distance(hot(t), pi, kind) - delta_tol;
    };

    InversionRecord record;
    record.delta_tol = delta_tol;
    record.norm_kind = kind;

    const double d_hot0 = thermal_distance(hot(grid.front()), pi, kind);
    const double d_cold0 = thermal_distance(cold(grid.front()), pi, kind);
    if (d_hot0 < d_cold0) {
        throw DomainError("hot preparation starts closer to equilibrium than the cold one");
    }

    std::size_t first = grid.size();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (margin(grid[i]) > 0) {
            first = i;
            break;
        }
    }
    if (first == grid.size()) {
        return record;
    }

    double t_star = grid[first];
    if (first > 0) {
        double lo = grid[first - 1];
        double hi = grid[first];
        while (hi - lo > 1e-9) {
            const double mid = 0.5 * (lo + hi);
            if (margin(mid) > 0) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        t_star = hi;
    }
    record.t_star = t_star;
    record.grid_time = grid[first];
    record.persistent = std::all_of(grid.begin() + static_cast<std::ptrdiff_t>(first), grid.end(),
                                    [&](double t) { return margin(t) > 0; });
    return record;
}

std::optional<double> crossover_time_bound(const QubitBathParams<double>& params, double p0_hot, double p0_cold)
{
    const double p_eq = gibbs_population_qubit(params.omega0, params.temperature);
    detail::require(p0_hot >= p0_cold && p0_cold > p_eq, "crossover bound needs p0_hot >= p0_cold > p_eq");
    if (p0_hot == p0_cold) {
        return 0.0;
    }
    const double rate_hot = effective_rate(params, p0_hot);
    const double rate_cold = effective_rate(params, p0_cold);
    if (rate_hot <= rate_cold) {
        return std::nullopt;
    }
    return std::log((p0_hot - p_eq) / (p0_cold - p_eq)) / (rate_hot - rate_cold);
}

double qfi_gain(double fisher_hot, double fisher_ref)
{
    detail::require(fisher_ref > 0, "reference Fisher information must be positive");
    detail::require(fisher_hot >= 0, "Fisher information must be non-negative");
    return std::log10(fisher_hot / fisher_ref);
}

std::vector<double> qfi_gain(std::span<const double> fisher_hot, std::span<const double> fisher_ref)
{
    detail::require(fisher_hot.size() == fisher_ref.size(), "Fisher series lengths differ");
    std::vector<double> out(fisher_hot.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = qfi_gain(fisher_hot[i], fisher_ref[i]);
    }
    return out;
}

HierarchyReport theorem_hierarchy_check(const FisherFn& hot, const FisherFn& cold, double fisher_equilibrium,
                                        std::optional<double> t_star, std::span<const double> grid)
{
    HierarchyReport report;
    report.fisher_equilibrium = fisher_equilibrium;
    if (!t_star) {
        return report;
    }
    report.applicable = true;

    std::vector<double> times{*t_star};
    for (double t : grid) {
        if (t > *t_star) {
            times.push_back(t);
        }
    }

    report.all_true = true;
    bool in_window = false;
    bool window_closed = false;
    for (double t : times) {
        HierarchyRow row{t, hot(t), cold(t), false, false};
        row.hot_exceeds_cold = row.fisher_hot > row.fisher_cold;
        row.cold_at_least_equilibrium = row.fisher_cold >= fisher_equilibrium;
        const bool ok = row.hot_exceeds_cold && row.cold_at_least_equilibrium;
        if (!ok && report.all_true) {
            report.all_true = false;
            report.first_violation = t;
        }
        if (ok && !window_closed) {
            if (!in_window) {
                report.window_begin = t;
                in_window = true;
            }
            report.window_end = t;
        } else if (!ok && in_window) {
            window_closed = true;
        }
        report.rows.push_back(row);
    }
    return report;
}

} // namespace mpemba
