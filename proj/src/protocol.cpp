#include "mpemba/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/distributions/normal.hpp>

#include "mpemba/fisher.hpp"
#include "mpemba/random.hpp"

namespace mpemba {

double QubitProbeModel::initial(Preparation prep, double temperature) const
{
    switch (prep) {
    case Preparation::hot:
        return p0_hot;
    case Preparation::cold:
        return p0_cold;
    case Preparation::equilibrium:
        break;
    }
    return gibbs_population_qubit(omega0, temperature);
}

double QubitProbeModel::population(Preparation prep, double t, double temperature) const
{
    if (prep == Preparation::equilibrium) {
        return gibbs_population_qubit(omega0, temperature);
    }
    return evolve_population(params(temperature), initial(prep, temperature), t);
}

double QubitProbeModel::dT_population(Preparation prep, double t, double temperature) const
{
    if (prep == Preparation::equilibrium) {
        return dT_gibbs(omega0, temperature);
    }
    return mpemba::dT_population(params(temperature), initial(prep, temperature), t);
}

double QubitProbeModel::fisher(Preparation prep, double t, double temperature) const
{
    if (prep == Preparation::equilibrium) {
        return qfi_equilibrium(omega0, temperature);
    }
    return fisher_binary(population(prep, t, temperature), dT_population(prep, t, temperature));
}

ShotRecord sample_population(double p_true, long long shots, std::uint64_t seed, std::uint64_t cell)
{
    detail::require(p_true >= 0 && p_true <= 1, "population must lie in [0, 1]");
    detail::require(shots >= 1, "shots must be at least one");
    const Philox4x32 gen(seed);
    CellStream stream(gen, cell);
    ShotRecord rec;
    rec.shots = shots;
    rec.seed = seed;
    for (long long i = 0; i < shots; ++i) {
        if (stream.uniform() < p_true) {
            ++rec.successes;
        }
    }
    return rec;
}

ShotRecord noiseless_record(double p_true, long long shots)
{
    detail::require(p_true >= 0 && p_true <= 1, "population must lie in [0, 1]");
    ShotRecord rec;
    rec.shots = shots;
    rec.successes = std::llround(p_true * static_cast<double>(shots));
    rec.exact_fraction = p_true;
    return rec;
}

namespace {

ShotRecord draw(double p, long long shots, std::uint64_t seed, std::uint64_t cell, bool noiseless)
{
    return noiseless ? noiseless_record(p, shots) : sample_population(p, shots, seed, cell);
}

/// Clipped plug-in variance of a binomial fraction.
double fraction_variance(double p, long long shots)
{
    const double n = static_cast<double>(shots);
    const double q = std::clamp(p, 0.5 / n, 1 - 0.5 / n);
    return q * (1 - q) / n;
}

double interpolate(std::span<const double> x, std::span<const double> y, double at)
{
    if (at <= x.front()) {
        return y.front();
    }
    const auto it = std::upper_bound(x.begin(), x.end(), at);
    if (it == x.end()) {
        return y.back();
    }
    const auto hi = static_cast<std::size_t>(it - x.begin());
    const double w = (at - x[hi - 1]) / (x[hi] - x[hi - 1]);
    return (1 - w) * y[hi - 1] + w * y[hi];
}

/// Slope at x[j] of a polynomial fitted to the (up to) five nearest samples:
/// least-squares cubic by default, the interpolating quartic for exact data.
/// On a centred window both give the fourth-order difference stencil.
double local_slope(std::span<const double> x, std::span<const double> y, std::size_t j, bool exact = false)
{
    const std::size_t n = x.size();
    const std::size_t width = std::min<std::size_t>(5, n);
    std::size_t lo = j >= 2 ? j - 2 : 0;
    lo = std::min(lo, n - width);
    bool flat = true;
    for (std::size_t k = lo; k < lo + width; ++k) {
        flat = flat && y[k] == y[lo];
    }
    if (flat) {
        return 0.0;
    }
    const Eigen::Index rows = static_cast<Eigen::Index>(width);
    const Eigen::Index cols = exact ? rows : std::min<Eigen::Index>(rows, 4);
    MatrixXd design(rows, cols);
    VectorXd rhs(rows);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const auto k = lo + static_cast<std::size_t>(r);
        const double dx = x[k] - x[j];
        double power = 1;
        for (Eigen::Index c = 0; c < cols; ++c) {
            design(r, c) = power;
            power *= dx;
        }
        rhs(r) = y[k];
    }
    const VectorXd coef = design.colPivHouseholderQr().solve(rhs);
    return coef(1);
}

double sse(std::span<const double> a, std::span<const double> b)
{
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += (a[i] - b[i]) * (a[i] - b[i]);
    }
    return s;
}

} // namespace

std::vector<double> isotonic_fit(std::span<const double> values, std::span<const double> weights)
{
    detail::require(weights.empty() || weights.size() == values.size(), "weights and values differ in length");
    struct Block {
        double mean;
        double weight;
        std::size_t count;
    };
    std::vector<Block> blocks;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double w = weights.empty() ? 1.0 : weights[i];
        detail::require(w > 0, "weights must be positive");
        blocks.push_back({values[i], w, 1});
        while (blocks.size() > 1 && blocks[blocks.size() - 2].mean > blocks.back().mean) {
            const Block top = blocks.back();
            blocks.pop_back();
            Block& prev = blocks.back();
            const double total = prev.weight + top.weight;
            prev.mean = (prev.mean * prev.weight + top.mean * top.weight) / total;
            prev.weight = total;
            prev.count += top.count;
        }
    }
    std::vector<double> fit;
    fit.reserve(values.size());
    for (const auto& b : blocks) {
        fit.insert(fit.end(), b.count, b.mean);
    }
    return fit;
}

double CalibrationCurve::evaluate(double temperature) const
{
    detail::require(!knots.empty(), "calibration curve is empty");
    if (temperature < knots.front() || temperature > knots.back()) {
        throw DomainError("temperature outside the calibrated range");
    }
    return interpolate(knots, values, temperature);
}

CalibrationCurve calibrate_equilibrium(std::span<const double> temps, long long shots_per_temp, double omega0,
                                       std::uint64_t seed, bool noiseless)
{
    detail::require(temps.size() >= 3, "calibration needs at least three temperatures");
    detail::require(std::adjacent_find(temps.begin(), temps.end(), std::greater_equal<>()) == temps.end(),
                    "calibration temperatures must be strictly increasing");
    CalibrationCurve curve;
    curve.knots.assign(temps.begin(), temps.end());
    for (std::size_t j = 0; j < temps.size(); ++j) {
        const double p = gibbs_population_qubit(omega0, temps[j]);
        curve.raw.push_back(draw(p, shots_per_temp, seed, j, noiseless).fraction());
    }
    curve.values = isotonic_fit(curve.raw);
    return curve;
}

std::vector<InversionMapEntry> dynamical_calibration(const QubitProbeModel& model, std::span<const double> temps,
                                                     std::span<const double> time_grid, long long shots,
                                                     const DeltaPolicy& policy, std::uint64_t seed, bool noiseless)
{
    detail::require(model.p0_hot >= model.p0_cold, "hot preparation must lie above the cold one");
    detail::require(!time_grid.empty(), "time grid is empty");
    const std::size_t nt = time_grid.size();
    const std::uint64_t stride = 2 * nt + 1;

    double z = policy.z_floor;
    if (policy.kind == DeltaPolicy::Kind::statistical) {
        const boost::math::normal_distribution<double> normal;
        const double q = boost::math::quantile(normal, 1 - policy.family_rate / (2.0 * static_cast<double>(nt)));
        z = std::max(policy.z_floor, q);
    }

    std::vector<InversionMapEntry> out;
    for (std::size_t j = 0; j < temps.size(); ++j) {
        const double temp = temps[j];
        const std::uint64_t base = j * stride;
        const double p_eq = draw(model.population(Preparation::equilibrium, 0, temp), shots, seed, base, noiseless)
                                .fraction();
        InversionMapEntry entry{temp, std::nullopt, 0.0};
        for (std::size_t i = 0; i < nt; ++i) {
            const double t = time_grid[i];
            const double ph =
                draw(model.population(Preparation::hot, t, temp), shots, seed, base + 1 + 2 * i, noiseless).fraction();
            const double pc =
                draw(model.population(Preparation::cold, t, temp), shots, seed, base + 2 + 2 * i, noiseless).fraction();
            double delta = policy.value;
            if (policy.kind == DeltaPolicy::Kind::statistical) {
                if (noiseless) {
                    delta = 0;
                } else {
                    const double sh = ph >= p_eq ? 1.0 : -1.0;
                    const double sc = pc >= p_eq ? 1.0 : -1.0;
                    const double var = fraction_variance(ph, shots) + fraction_variance(pc, shots) +
                                       (sh - sc) * (sh - sc) * fraction_variance(p_eq, shots);
                    delta = z * std::sqrt(var);
                }
            }
            entry.delta = delta;
            if (std::abs(ph - p_eq) < std::abs(pc - p_eq) - delta) {
                entry.t_m = t;
                break;
            }
        }
        out.push_back(entry);
    }
    return out;
}

double FisherMap::argmax_time(double temperature) const
{
    detail::require(!temps.empty() && !times.empty(), "Fisher map is empty");
    std::size_t col = 0;
    for (std::size_t j = 1; j < temps.size(); ++j) {
        if (std::abs(temps[j] - temperature) < std::abs(temps[col] - temperature)) {
            col = j;
        }
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < times.size(); ++i) {
        if (values[i][col] > values[best][col]) {
            best = i;
        }
    }
    return times[best];
}

FisherMap fisher_map(const QubitProbeModel& model, Preparation prep, std::span<const double> temps,
                     std::span<const double> times, long long shots, std::uint64_t seed, bool noiseless)
{
    detail::require(temps.size() >= 5, "Fisher map needs at least five temperatures");
    detail::require(std::adjacent_find(temps.begin(), temps.end(), std::greater_equal<>()) == temps.end(),
                    "map temperatures must be strictly increasing");
    FisherMap map;
    map.preparation = prep;
    map.temps.assign(temps.begin(), temps.end());
    map.times.assign(times.begin(), times.end());
    const std::size_t nT = temps.size();

    for (std::size_t i = 0; i < times.size(); ++i) {
        std::vector<double> raw(nT);
        for (std::size_t j = 0; j < nT; ++j) {
            // One stream per row: common random numbers along the temperature axis.
            raw[j] = draw(model.population(prep, times[i], temps[j]), shots, seed, i, noiseless).fraction();
        }
        const std::vector<double> up = isotonic_fit(raw);
        std::vector<double> neg(nT);
        std::transform(raw.begin(), raw.end(), neg.begin(), std::negate<>());
        std::vector<double> down = isotonic_fit(neg);
        std::transform(down.begin(), down.end(), down.begin(), std::negate<>());

        const double sse_up = sse(raw, up);
        const double sse_down = sse(raw, down);
        double noise = 0;
        if (!noiseless) {
            for (double p : raw) {
                noise += fraction_variance(p, shots);
            }
            const double n = static_cast<double>(nT);
            noise *= n + 3 * std::sqrt(2 * n);
        }
        const double tolerance = noise + 1e-24;
        std::vector<double> fitted = raw;
        bool monotone = false;
        if (std::min(sse_up, sse_down) <= tolerance) {
            fitted = sse_up <= sse_down ? up : down;
            monotone = true;
        }
        map.monotone_rows.push_back(monotone);

        std::vector<double> row(nT);
        std::vector<bool> flags(nT, false);
        for (std::size_t j = 0; j < nT; ++j) {
            const double p = fitted[j];
            const double var = p * (1 - p);
            if (var < 1e-12) {
                flags[j] = true;
                row[j] = 0;
                continue;
            }
            const double slope = local_slope(temps, fitted, j, noiseless);
            row[j] = slope * slope / var;
        }
        map.values.push_back(std::move(row));
        map.flagged.push_back(std::move(flags));
    }
    return map;
}

double log_likelihood(std::span<const ShotRecord> records, const QubitProbeModel& model, double temperature)
{
    double total = 0;
    for (const auto& r : records) {
        const double p = model.population(r.preparation, r.time, temperature);
        const double n = r.fraction() * static_cast<double>(r.shots);
        const double m = static_cast<double>(r.shots) - n;
        const double tiny = std::numeric_limits<double>::min();
        if (n > 0) {
            total += n * std::log(std::max(p, tiny));
        }
        if (m > 0) {
            total += m * std::log(std::max(1 - p, tiny));
        }
    }
    return total;
}

namespace {

double score(std::span<const ShotRecord> records, const QubitProbeModel& model, double temperature)
{
    double total = 0;
    for (const auto& r : records) {
        const double p = model.population(r.preparation, r.time, temperature);
        const double dp = model.dT_population(r.preparation, r.time, temperature);
        const double n = static_cast<double>(r.shots);
        total += n * (r.fraction() - p) / (p * (1 - p)) * dp;
    }
    return total;
}

} // namespace

MleResult mle_temperature(std::span<const ShotRecord> records, const QubitProbeModel& model, double t_lo,
                          double t_hi)
{
    detail::require(!records.empty(), "no observations");
    detail::require(t_lo > 0 && t_hi > t_lo, "invalid temperature interval");

    constexpr int kGrid = 64;
    std::vector<double> grid(kGrid);
    std::vector<double> ll(kGrid);
    for (int k = 0; k < kGrid; ++k) {
        grid[k] = t_lo + (t_hi - t_lo) * k / (kGrid - 1);
        ll[k] = log_likelihood(records, model, grid[k]);
    }
    bool flat = true;
    for (const auto& r : records) {
        double lo = 1;
        double hi = 0;
        for (double t : grid) {
            const double p = model.population(r.preparation, r.time, t);
            lo = std::min(lo, p);
            hi = std::max(hi, p);
        }
        flat = flat && hi - lo < 1e-15;
    }
    if (flat) {
        throw NumericalError("likelihood is flat over the temperature interval");
    }

    const auto best = static_cast<std::size_t>(std::max_element(ll.begin(), ll.end()) - ll.begin());
    int peaks = 0;
    for (std::size_t k = 0; k < ll.size(); ++k) {
        const bool left = k == 0 || ll[k] > ll[k - 1];
        const bool right = k + 1 == ll.size() || ll[k] >= ll[k + 1];
        peaks += left && right ? 1 : 0;
    }

    double a = grid[best == 0 ? 0 : best - 1];
    double b = grid[std::min(best + 1, grid.size() - 1)];
    double t_hat;
    const double sa = score(records, model, a);
    const double sb = score(records, model, b);
    if (sa > 0 && sb < 0) {
        // Root of the score: far sharper than locating the flat top of L.
        for (int it = 0; it < 200 && b - a > 1e-15; ++it) {
            const double mid = 0.5 * (a + b);
            if (score(records, model, mid) > 0) {
                a = mid;
            } else {
                b = mid;
            }
        }
        t_hat = 0.5 * (a + b);
    } else {
        const double inv_phi = (std::sqrt(5.0) - 1) / 2;
        double c = b - inv_phi * (b - a);
        double d = a + inv_phi * (b - a);
        double fc = log_likelihood(records, model, c);
        double fd = log_likelihood(records, model, d);
        while (b - a > 1e-12) {
            if (fc > fd) {
                b = d;
                d = c;
                fd = fc;
                c = b - inv_phi * (b - a);
                fc = log_likelihood(records, model, c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + inv_phi * (b - a);
                fd = log_likelihood(records, model, d);
            }
        }
        t_hat = 0.5 * (a + b);
        if (ll[best] > log_likelihood(records, model, t_hat)) {
            t_hat = grid[best];
        }
    }

    MleResult res;
    res.t_hat = t_hat;
    res.log_likelihood = log_likelihood(records, model, t_hat);
    res.multimodal = peaks > 1;
    res.at_boundary = t_hat - t_lo < 1e-6 || t_hi - t_hat < 1e-6;
    double info = 0;
    double total_shots = 0;
    for (const auto& r : records) {
        const double n = static_cast<double>(r.shots);
        info += n * model.fisher(r.preparation, r.time, t_hat);
        total_shots += n;
    }
    res.fisher_at_hat = info / total_shots;
    res.stderr_ = info > 0 ? 1 / std::sqrt(info) : std::numeric_limits<double>::infinity();
    return res;
}

double effective_temperature(double p_measured, double omega0)
{
    detail::require(omega0 > 0, "omega0 must be positive");
    if (!(p_measured > 0)) {
        throw DomainError("effective temperature needs a positive population");
    }
    if (p_measured >= 0.5) {
        throw DomainError("population inversion: no positive temperature matches p >= 1/2");
    }
    return omega0 / std::log(1 / p_measured - 1);
}

std::vector<double> replicate_estimates(const QubitProbeModel& model, Preparation prep, double t, double t_true,
                                        long long shots, int replicas, std::uint64_t seed, double t_lo, double t_hi)
{
    const double p = model.population(prep, t, t_true);
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(replicas));
    for (int r = 0; r < replicas; ++r) {
        ShotRecord rec = sample_population(p, shots, seed, static_cast<std::uint64_t>(r));
        rec.time = t;
        rec.preparation = prep;
        const ShotRecord one[] = {rec};
        out.push_back(mle_temperature(one, model, t_lo, t_hi).t_hat);
    }
    return out;
}

} // namespace mpemba
