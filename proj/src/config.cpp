#include "mpemba/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace mpemba {

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v)
{
    double out = 0;
    const auto* end = v.data() + v.size();
    const auto [ptr, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc() || ptr != end) {
        throw ConfigError("key '" + key + "': not a number: '" + v + "'");
    }
    return out;
}

long long to_integer(const std::string& key, const std::string& v)
{
    long long out = 0;
    const auto* end = v.data() + v.size();
    const auto [ptr, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc() || ptr != end) {
        throw ConfigError("key '" + key + "': not an integer: '" + v + "'");
    }
    return out;
}

std::vector<double> to_list(const std::string& key, const std::string& v)
{
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        out.push_back(to_double(key, trim(item)));
    }
    return out;
}

bool to_bool(const std::string& key, const std::string& v)
{
    if (v == "true" || v == "1" || v == "yes") {
        return true;
    }
    if (v == "false" || v == "0" || v == "no") {
        return false;
    }
    throw ConfigError("key '" + key + "': not a boolean: '" + v + "'");
}

Preparation to_preparation(const std::string& key, const std::string& v)
{
    if (v == "hot") {
        return Preparation::hot;
    }
    if (v == "cold") {
        return Preparation::cold;
    }
    if (v == "equilibrium") {
        return Preparation::equilibrium;
    }
    throw ConfigError("key '" + key + "': unknown preparation '" + v + "'");
}

using Setter = std::function<void(RunConfig&, const std::string& key, const std::string& value)>;

const std::map<std::string, Setter>& setters()
{
    static const std::map<std::string, Setter> table = {
        {"model", [](RunConfig& c, auto&, auto& v) { c.model = v; }},
        {"omega0", [](RunConfig& c, auto& k, auto& v) { c.omega0 = to_double(k, v); }},
        {"gamma", [](RunConfig& c, auto& k, auto& v) { c.gamma = to_double(k, v); }},
        {"temperature", [](RunConfig& c, auto& k, auto& v) { c.temperature = to_double(k, v); }},
        {"alpha", [](RunConfig& c, auto& k, auto& v) { c.alpha = to_double(k, v); }},
        {"p0_hot", [](RunConfig& c, auto& k, auto& v) { c.p0_hot = to_double(k, v); }},
        {"p0_cold", [](RunConfig& c, auto& k, auto& v) { c.p0_cold = to_double(k, v); }},
        {"e1", [](RunConfig& c, auto& k, auto& v) { c.e1 = to_double(k, v); }},
        {"e2", [](RunConfig& c, auto& k, auto& v) { c.e2 = to_double(k, v); }},
        {"e3", [](RunConfig& c, auto& k, auto& v) { c.e3 = to_double(k, v); }},
        {"kappa1", [](RunConfig& c, auto& k, auto& v) { c.kappa1 = to_double(k, v); }},
        {"kappa2", [](RunConfig& c, auto& k, auto& v) { c.kappa2 = to_double(k, v); }},
        {"hot", [](RunConfig& c, auto& k, auto& v) { c.hot = to_list(k, v); }},
        {"cold", [](RunConfig& c, auto& k, auto& v) { c.cold = to_list(k, v); }},
        {"t_max", [](RunConfig& c, auto& k, auto& v) { c.t_max = to_double(k, v); }},
        {"t_steps", [](RunConfig& c, auto& k, auto& v) { c.t_steps = static_cast<int>(to_integer(k, v)); }},
        {"norm_kind",
         [](RunConfig& c, auto& k, auto& v) {
             try {
                 c.norm_kind = parse_distance_kind(v);
             } catch (const DomainError& e) {
                 throw ConfigError("key '" + k + "': " + e.what());
             }
         }},
        {"delta_tol",
         [](RunConfig& c, auto& k, auto& v) {
             c.delta_tol = to_double(k, v);
             c.delta_policy = DeltaPolicy::Kind::fixed;
         }},
        {"delta_policy",
         [](RunConfig& c, auto& k, auto& v) {
             if (v == "fixed") {
                 c.delta_policy = DeltaPolicy::Kind::fixed;
             } else if (v == "statistical") {
                 c.delta_policy = DeltaPolicy::Kind::statistical;
             } else {
                 throw ConfigError("key '" + k + "': unknown policy '" + v + "'");
             }
         }},
        {"shots", [](RunConfig& c, auto& k, auto& v) { c.shots = to_integer(k, v); }},
        {"seed",
         [](RunConfig& c, auto& k, auto& v) {
             const long long s = to_integer(k, v);
             if (s < 0) {
                 throw ConfigError("key '" + k + "': seed must be non-negative");
             }
             c.seed = static_cast<std::uint64_t>(s);
         }},
        {"noiseless", [](RunConfig& c, auto& k, auto& v) { c.noiseless = to_bool(k, v); }},
        {"qfi_mode", [](RunConfig& c, auto&, auto& v) { c.qfi_mode = v; }},
        {"p0_steps", [](RunConfig& c, auto& k, auto& v) { c.p0_steps = static_cast<int>(to_integer(k, v)); }},
        {"calibration_grid", [](RunConfig& c, auto&, auto& v) { c.calibration_grid = GridSpec::parse(v); }},
        {"T_grid", [](RunConfig& c, auto&, auto& v) { c.T_grid = GridSpec::parse(v); }},
        {"preparation", [](RunConfig& c, auto& k, auto& v) { c.preparation = to_preparation(k, v); }},
        {"t_lo", [](RunConfig& c, auto& k, auto& v) { c.t_lo = to_double(k, v); }},
        {"t_hi", [](RunConfig& c, auto& k, auto& v) { c.t_hi = to_double(k, v); }},
        {"output_path", [](RunConfig& c, auto&, auto& v) { c.output_path = v; }},
    };
    return table;
}

void check(bool cond, const std::string& msg)
{
    if (!cond) {
        throw ConfigError(msg);
    }
}

VectorXd to_vector(const std::vector<double>& v)
{
    return Eigen::Map<const VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

} // namespace

GridSpec GridSpec::parse(const std::string& text)
{
    GridSpec g;
    const std::string t = trim(text);
    if (std::count(t.begin(), t.end(), ':') == 2) {
        const auto a = t.find(':');
        const auto b = t.find(':', a + 1);
        const double lo = to_double("grid", trim(t.substr(0, a)));
        const double hi = to_double("grid", trim(t.substr(a + 1, b - a - 1)));
        const long long n = to_integer("grid", trim(t.substr(b + 1)));
        check(n >= 2 && hi > lo, "grid '" + text + "' needs n >= 2 and hi > lo");
        for (long long i = 0; i < n; ++i) {
            g.points.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1));
        }
    } else {
        g.points = to_list("grid", t);
    }
    check(!g.points.empty(), "grid '" + text + "' is empty");
    return g;
}

RunConfig parse_config(const std::string& text, RunConfig base)
{
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line.erase(hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const auto it = setters().find(key);
        if (it == setters().end()) {
            throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        }
        it->second(base, key, value);
    }
    return base;
}

RunConfig load_config(const std::string& path, RunConfig base)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot read config file '" + path + "'");
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), std::move(base));
}

void RunConfig::validate() const
{
    check(model == "qubit" || model == "lambda", "model must be 'qubit' or 'lambda'");
    check(t_steps >= 2, "t_steps must be at least 2");
    check(t_max > 0, "t_max must be positive");
    check(temperature > 0, "temperature must be positive");
    check(delta_tol >= 0, "delta_tol must be non-negative");
    check(shots >= 1, "shots must be at least 1");
    check(qfi_mode == "trajectory" || qfi_mode == "surface", "qfi_mode must be 'trajectory' or 'surface'");
    check(p0_steps >= 2, "p0_steps must be at least 2");
    check(t_lo > 0 && t_hi > t_lo, "estimation interval needs 0 < t_lo < t_hi");
    try {
        if (model == "qubit") {
            QubitBathParams<double>{omega0, gamma, temperature, alpha}.validate();
            check(p0_hot >= 0 && p0_hot <= 1 && p0_cold >= 0 && p0_cold <= 1, "p0_hot and p0_cold must lie in [0, 1]");
            check(p0_hot >= p0_cold, "p0_hot must not lie below p0_cold");
            effective_rate(qubit_pair().params, p0_hot);
            effective_rate(qubit_pair().params, p0_cold);
        } else {
            check(hot.size() == 3 && cold.size() == 3, "hot and cold must be population triples");
            for (const auto* v : {&hot, &cold}) {
                double sum = 0;
                for (double x : *v) {
                    check(x >= 0, "populations must be non-negative");
                    sum += x;
                }
                check(std::abs(sum - 1) < 1e-9, "populations must sum to 1");
            }
            check(kappa1 > 0 && kappa2 > 0, "couplings must be positive");
            check(!norm_kind || *norm_kind != DistanceKind::scalar_abs, "scalar_abs needs the qubit model");
            lambda_pair().spec.rate_matrix();
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
}

std::vector<double> RunConfig::time_grid() const
{
    std::vector<double> g(static_cast<std::size_t>(t_steps));
    for (int i = 0; i < t_steps; ++i) {
        g[static_cast<std::size_t>(i)] = t_max * i / (t_steps - 1);
    }
    return g;
}

DistanceKind RunConfig::distance() const
{
    if (norm_kind) {
        return *norm_kind;
    }
    return model == "qubit" ? DistanceKind::scalar_abs : DistanceKind::euclidean;
}

QubitPair RunConfig::qubit_pair() const
{
    return {{omega0, gamma, temperature, alpha}, p0_hot, p0_cold};
}

LambdaPair RunConfig::lambda_pair() const
{
    return {{e1, e2, e3, kappa1, kappa2, temperature}, to_vector(hot), to_vector(cold)};
}

QubitProbeModel RunConfig::probe_model() const
{
    return {omega0, gamma, alpha, p0_hot, p0_cold};
}

} // namespace mpemba
