#include "lasernoise/params.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "lasernoise/steady.hpp"

namespace lasernoise {

DerivedRates derive_rates(const ModelParams& p)
{
    require_valid(p);

    DerivedRates d;
    d.d = p.gamma_2 * (1.0 + p.nu * p.nu / (p.gamma_perp * p.gamma_perp));
    d.c_a = p.g_a * p.g_a / p.gamma_perp;
    d.c_b = p.g_b * p.g_b / p.gamma_perp;
    d.zeta_ab = p.xi_a * p.g_b * p.g_b / (p.g_a * p.g_a);
    d.zeta_ba = p.xi_b * p.g_a * p.g_a / (p.g_b * p.g_b);
    d.kprime_a = p.kappa_a - p.kappa_ap;
    d.kprime_b = p.kappa_b - p.kappa_bp;
    d.R_b = std::sqrt(p.xi_a / p.xi_b) * p.R_a;
    d.r_a = 2.0 * p.g_a * p.g_a * p.R_a / p.gamma_perp;
    d.r_b = 2.0 * p.g_b * p.g_b * d.R_b / p.gamma_perp;
    d.R_3 = std::sqrt(p.xi_a) * p.R_a;
    d.R_1 = p.R_a - d.R_3;
    d.R_2 = d.R_b - d.R_3;
    d.R_total = d.R_1 + d.R_2 + d.R_3;
    return d;
}

ValidityReport check_params(const ModelParams& p)
{
    ValidityReport rep;
    auto err = [&rep](const std::string& m) {
        rep.ok = false;
        rep.errors.push_back(m);
    };

    if (!(p.kappa_a > 0.0)) err("kappa_a must be positive");
    if (!(p.kappa_b > 0.0)) err("kappa_b must be positive");
    if (!(p.kappa_ap >= 0.0)) err("kappa_ap must be non-negative");
    if (!(p.kappa_bp >= 0.0)) err("kappa_bp must be non-negative");
    if (!(p.kappa_a > p.kappa_ap))
        err("kappa_a must exceed kappa_ap (threshold degenerates otherwise)");
    if (!(p.kappa_b > p.kappa_bp))
        err("kappa_b must exceed kappa_bp (threshold degenerates otherwise)");
    if (!(p.g_a > 0.0)) err("g_a must be positive");
    if (!(p.g_b > 0.0)) err("g_b must be positive");
    if (!(p.gamma_2 > 0.0)) err("gamma_2 must be positive");
    if (!(p.gamma_1 > 0.0)) err("gamma_1 must be positive");
    if (!(p.gamma_perp > 0.0)) err("gamma_perp must be positive");
    if (!(p.gamma_c >= 0.0)) err("gamma_c must be non-negative");
    if (!(p.xi_a > 0.0 && p.xi_a <= 1.0)) err("xi_a must lie in (0, 1]");
    if (!(p.xi_b > 0.0 && p.xi_b <= 1.0)) err("xi_b must lie in (0, 1]");
    if (!(p.p >= 0.0 && p.p <= 1.0)) err("p must lie in [0, 1]");
    if (!(p.R_a >= 0.0)) err("R_a must be non-negative");
    if (std::abs(std::abs(p.s_a) - 1.0) > 1e-12 ||
        std::abs(std::abs(p.s_b) - 1.0) > 1e-12)
        err("dichroism signs must be +1 or -1");
    if (!std::isfinite(p.nu)) err("nu must be finite");
    if (!std::isfinite(p.omega_ap) || !std::isfinite(p.omega_bp))
        err("birefringence frequencies must be finite");

    if (rep.ok) {
        // Advisory time-scale hierarchy: cavity decay slowest, dephasing and
        // lower-level decay fastest.  A separation below a factor of 5 makes
        // the adiabatic arguments behind the collective model questionable.
        const double kmax =
            std::max(std::max(p.kappa_a, p.kappa_b),
                     std::max(p.kappa_ap, p.kappa_bp));
        auto warn = [&rep](const std::string& m) { rep.warnings.push_back(m); };
        if (p.gamma_2 < 5.0 * kmax)
            warn("hierarchy: gamma_2 is not well separated from the cavity "
                 "decay rates (expected kappa, kappa_p << gamma_2)");
        if (p.gamma_perp < 5.0 * p.gamma_2)
            warn("hierarchy: gamma_perp is not well separated from gamma_2 "
                 "(expected gamma_2 << gamma_perp)");
        if (p.gamma_1 < 5.0 * p.gamma_2)
            warn("hierarchy: gamma_1 is not well separated from gamma_2 "
                 "(expected gamma_2 << gamma_1)");
    }
    return rep;
}

void require_valid(const ModelParams& p)
{
    const ValidityReport rep = check_params(p);
    if (rep.ok) return;
    std::string msg = "invalid parameters:";
    for (const auto& e : rep.errors) msg += "\n  - " + e;
    throw ConfigError(msg);
}

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_number(const std::string& text, const std::string& where)
{
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &pos);
    } catch (const std::exception&) {
        throw ConfigError(where + ": cannot parse '" + text + "' as a number");
    }
    if (trim(text.substr(pos)) != "")
        throw ConfigError(where + ": trailing characters after number in '" +
                          text + "'");
    return v;
}

using FieldMap = std::map<std::string, double ModelParams::*>;

const FieldMap& field_map()
{
    static const FieldMap m = {
        {"kappa_a", &ModelParams::kappa_a},
        {"kappa_b", &ModelParams::kappa_b},
        {"kappa_ap", &ModelParams::kappa_ap},
        {"kappa_bp", &ModelParams::kappa_bp},
        {"omega_ap", &ModelParams::omega_ap},
        {"omega_bp", &ModelParams::omega_bp},
        {"g_a", &ModelParams::g_a},
        {"g_b", &ModelParams::g_b},
        {"gamma_2", &ModelParams::gamma_2},
        {"gamma_1", &ModelParams::gamma_1},
        {"gamma_perp", &ModelParams::gamma_perp},
        {"gamma_c", &ModelParams::gamma_c},
        {"nu", &ModelParams::nu},
        {"xi_a", &ModelParams::xi_a},
        {"xi_b", &ModelParams::xi_b},
        {"R_a", &ModelParams::R_a},
        {"p", &ModelParams::p},
    };
    return m;
}

} // namespace

ParsedConfig parse_config_text(const std::string& text,
                               const std::string& origin)
{
    ParsedConfig cfg;
    std::set<std::string> seen;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;

        const std::string where = origin + ":" + std::to_string(lineno);
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(where + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError(where + ": empty key");
        if (!seen.insert(key).second)
            throw ConfigError(where + ": duplicate key '" + key + "'");

        if (key == "pump_ratio") {
            cfg.pump_ratio = parse_number(value, where);
            continue;
        }
        const auto it = field_map().find(key);
        if (it == field_map().end())
            throw ConfigError(where + ": unknown key '" + key + "'");
        cfg.params.*(it->second) = parse_number(value, where);
    }
    if (cfg.pump_ratio && seen.count("R_a"))
        throw ConfigError(origin + ": set either R_a or pump_ratio, not both");
    return cfg;
}

ParsedConfig parse_config_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), path);
}

ModelParams resolve_pump(const ParsedConfig& cfg)
{
    ModelParams p = cfg.params;
    if (cfg.pump_ratio) {
        p.R_a = 0.0; // thresholds do not depend on the pump
        const auto [rbar_a, rbar_b] = threshold(p, derive_rates(p));
        (void)rbar_b;
        p.R_a = *cfg.pump_ratio * rbar_a;
    }
    require_valid(p);
    return p;
}

ModelParams reference_params(double pump_ratio)
{
    ModelParams p; // defaults are the symmetric reference values
    const auto [rbar_a, rbar_b] = threshold(p, derive_rates(p));
    (void)rbar_b;
    p.R_a = pump_ratio * rbar_a;
    return p;
}

} // namespace lasernoise
