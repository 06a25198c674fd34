#include "mpemba/commands.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "mpemba/theorem.hpp"

namespace mpemba {

std::string format_number(double x)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace {

std::string inversion_block(const InversionRecord& rec)
{
    std::ostringstream out;
    out << "# inversion\n";
    if (!rec.found()) {
        out << "# result = no inversion\n";
    } else {
        out << "# t_star = " << format_number(*rec.t_star) << '\n';
        out << "# grid_time = " << format_number(*rec.grid_time) << '\n';
        out << "# persistent = " << (rec.persistent ? "true" : "false") << '\n';
    }
    out << "# delta_tol = " << format_number(rec.delta_tol) << '\n';
    out << "# norm_kind = " << to_string(rec.norm_kind) << '\n';
    return out.str();
}

struct Row {
    std::ostringstream& out;
    bool first = true;

    Row& operator<<(double x)
    {
        out << (first ? "" : ",") << format_number(x);
        first = false;
        return *this;
    }
    ~Row() { out << '\n'; }
};

std::uint64_t step_seed(std::uint64_t seed, std::uint64_t step)
{
    return seed ^ (step * 0x9E3779B97F4A7C15ull);
}

} // namespace

std::string relax_csv(const RunConfig& config)
{
    config.validate();
    const auto grid = config.time_grid();
    const auto kind = config.distance();
    std::ostringstream out;
    out << "t,p_hot,p_cold,p_eq,d_hot,d_cold\n";

    TrajectoryFn hot;
    TrajectoryFn cold;
    VectorXd pi;
    if (config.model == "qubit") {
        const auto pair = config.qubit_pair();
        hot = pair.trajectory(Preparation::hot);
        cold = pair.trajectory(Preparation::cold);
        pi = pair.stationary();
    } else {
        const auto pair = config.lambda_pair();
        hot = pair.trajectory(Preparation::hot);
        cold = pair.trajectory(Preparation::cold);
        pi = pair.stationary();
    }
    // Population columns report the highest level.
    const Eigen::Index top = pi.size() - 1;
    for (double t : grid) {
        const VectorXd ph = hot(t);
        const VectorXd pc = cold(t);
        Row{out} << t << ph(top) << pc(top) << pi(top) << thermal_distance(ph, pi, kind)
                 << thermal_distance(pc, pi, kind);
    }
    out << inversion_block(detect_inversion(hot, cold, pi, grid, config.delta_tol, kind));
    return out.str();
}

std::string qfi_csv(const RunConfig& config)
{
    config.validate();
    const auto grid = config.time_grid();
    std::ostringstream out;
    if (config.qfi_mode == "surface") {
        if (config.model != "qubit") {
            throw ConfigError("surface mode needs the qubit model");
        }
        const auto params = config.qubit_pair().params;
        out << "p0,t,F\n";
        for (int k = 0; k < config.p0_steps; ++k) {
            const double p0 = static_cast<double>(k) / (config.p0_steps - 1);
            for (double t : grid) {
                Row{out} << p0 << t << qfi_qubit_closed_form(params, p0, t);
            }
        }
        return out.str();
    }

    FisherFn hot;
    FisherFn cold;
    double f_eq = 0;
    if (config.model == "qubit") {
        const auto pair = config.qubit_pair();
        hot = pair.fisher(Preparation::hot);
        cold = pair.fisher(Preparation::cold);
        f_eq = pair.equilibrium_fisher();
    } else {
        const auto pair = config.lambda_pair();
        hot = pair.fisher(Preparation::hot);
        cold = pair.fisher(Preparation::cold);
        f_eq = pair.equilibrium_fisher();
    }
    out << "t,F_hot,F_cold,F_eq,gain_log10\n";
    for (double t : grid) {
        const double fh = hot(t);
        Row{out} << t << fh << cold(t) << f_eq << std::log10(fh / f_eq);
    }
    return out.str();
}

std::string theorem_text(const RunConfig& config)
{
    config.validate();
    const auto kind = config.distance();
    if (config.model == "qubit") {
        return to_record_text(verify_theorem(config.qubit_pair(), {}, config.delta_tol, kind));
    }
    return to_record_text(verify_theorem(config.lambda_pair(), {}, config.delta_tol, kind));
}

ProtocolOutputs protocol_bundle(const RunConfig& config)
{
    ProtocolOutputs res;
    std::vector<std::pair<std::string, std::string>> status;
    std::string step = "config";
    try {
        config.validate();
        if (config.model != "qubit") {
            throw ConfigError("the protocol runs on the qubit model");
        }
        status.emplace_back(step, "ok");
        const auto model = config.probe_model();
        const auto times = config.time_grid();
        const auto& temps = config.T_grid.points;

        step = "calibration";
        const auto curve = calibrate_equilibrium(config.calibration_grid.points, config.shots, config.omega0,
                                                 step_seed(config.seed, 1), config.noiseless);
        {
            std::ostringstream out;
            out << "T,p_raw,p_fit\n";
            for (std::size_t j = 0; j < curve.knots.size(); ++j) {
                Row{out} << curve.knots[j] << curve.raw[j] << curve.values[j];
            }
            res.files.push_back({"calibration.csv", out.str()});
        }
        status.emplace_back(step, "ok");

        step = "inversion_map";
        DeltaPolicy policy;
        policy.kind = config.delta_policy;
        policy.value = config.delta_tol;
        const auto inv = dynamical_calibration(model, temps, times, config.shots, policy, step_seed(config.seed, 2),
                                               config.noiseless);
        {
            std::ostringstream out;
            out << "T,t_M,delta\n";
            for (const auto& e : inv) {
                out << format_number(e.temperature) << ',' << (e.t_m ? format_number(*e.t_m) : "") << ','
                    << format_number(e.delta) << '\n';
            }
            res.files.push_back({"inversion_map.csv", out.str()});
        }
        status.emplace_back(step, "ok");

        step = "fisher_map";
        const auto map = fisher_map(model, config.preparation, temps, times, config.shots, step_seed(config.seed, 3),
                                    config.noiseless);
        {
            std::ostringstream out;
            out << "T,t,F\n";
            for (std::size_t i = 0; i < times.size(); ++i) {
                for (std::size_t j = 0; j < temps.size(); ++j) {
                    Row{out} << temps[j] << times[i] << map.values[i][j];
                }
            }
            res.files.push_back({"fisher_map.csv", out.str()});
        }
        status.emplace_back(step, "ok");

        step = "estimate";
        std::ostringstream out;
        out << "label,t,T_hat,stderr,log_likelihood,shots\n";
        auto estimate = [&](const std::string& label, Preparation prep, double t, std::uint64_t seed) {
            const double p = model.population(prep, t, config.temperature);
            ShotRecord rec = config.noiseless ? noiseless_record(p, config.shots)
                                              : sample_population(p, config.shots, seed, 0);
            rec.time = t;
            rec.preparation = prep;
            const ShotRecord records[] = {rec};
            const auto mle = mle_temperature(records, model, config.t_lo, config.t_hi);
            out << label << ',' << format_number(t) << ',' << format_number(mle.t_hat) << ','
                << format_number(mle.stderr_) << ',' << format_number(mle.log_likelihood) << ',' << config.shots
                << '\n';
        };
        const double t_arg = map.argmax_time(config.temperature);
        estimate("fisher_argmax", config.preparation, t_arg, step_seed(config.seed, 4));
        estimate("equilibrium", Preparation::equilibrium, t_arg, step_seed(config.seed, 5));
        res.files.push_back({"estimate.csv", out.str()});
        status.emplace_back(step, "ok");
    } catch (const DomainError& e) {
        res.failed_step = step;
        res.error = e.what();
        res.exit_code = kExitConfig;
    } catch (const NumericalError& e) {
        res.failed_step = step;
        res.error = e.what();
        res.exit_code = kExitNumerical;
    }

    std::ostringstream manifest;
    manifest << "seed = " << config.seed << '\n';
    manifest << "shots = " << config.shots << '\n';
    manifest << "noiseless = " << (config.noiseless ? "true" : "false") << '\n';
    for (const auto& [name, state] : status) {
        manifest << "step." << name << " = " << state << '\n';
    }
    if (res.failed_step) {
        manifest << "step." << *res.failed_step << " = failed\n";
        manifest << "error = " << res.error << '\n';
    }
    manifest << "exit_code = " << res.exit_code << '\n';
    res.files.push_back({"manifest.txt", manifest.str()});
    return res;
}

} // namespace mpemba
