#include "lasernoise/output.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace lasernoise {

std::string format_g17(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string format_complex(const Complex& z)
{
    std::string out = format_g17(z.real());
    out += (std::signbit(z.imag()) ? "-" : "+");
    out += format_g17(std::abs(z.imag()));
    out += "i";
    return out;
}

std::vector<std::pair<std::string, std::string>>
param_echo(const ModelParams& p)
{
    auto g = [](double v) { return format_g17(v); };
    return {
        {"kappa_a", g(p.kappa_a)},       {"kappa_b", g(p.kappa_b)},
        {"kappa_ap", g(p.kappa_ap)},     {"kappa_bp", g(p.kappa_bp)},
        {"omega_ap", g(p.omega_ap)},     {"omega_bp", g(p.omega_bp)},
        {"g_a", g(p.g_a)},               {"g_b", g(p.g_b)},
        {"gamma_2", g(p.gamma_2)},       {"gamma_1", g(p.gamma_1)},
        {"gamma_perp", g(p.gamma_perp)}, {"gamma_c", g(p.gamma_c)},
        {"nu", g(p.nu)},                 {"xi_a", g(p.xi_a)},
        {"xi_b", g(p.xi_b)},             {"R_a", g(p.R_a)},
        {"p", g(p.p)},                   {"s_a", g(p.s_a)},
        {"s_b", g(p.s_b)},
    };
}

namespace {

void append_header(std::string& out, const ModelParams& p,
                   const std::vector<std::string>& extra)
{
    for (const auto& [k, v] : param_echo(p))
        out += "# " + k + " = " + v + "\n";
    for (const auto& line : extra) out += "# " + line + "\n";
}

std::string json_escape(const std::string& s)
{
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out;
}

} // namespace

std::string spectrum_csv(const ModelParams& p,
                         const std::vector<SpectrumPoint>& pts,
                         const std::vector<std::string>& extra_header)
{
    std::string out;
    append_header(out, p, extra_header);
    out += "Omega,C_aa,C_bb,C_ab,d_aa,d_bb,d_ab\n";
    for (const auto& pt : pts) {
        out += format_g17(pt.Omega);
        out += ',';
        out += format_g17(pt.C_aa);
        out += ',';
        out += format_g17(pt.C_bb);
        out += ',';
        out += format_g17(pt.C_ab);
        out += ',';
        out += format_complex(pt.d_aa);
        out += ',';
        out += format_complex(pt.d_bb);
        out += ',';
        out += format_complex(pt.d_ab);
        out += '\n';
    }
    return out;
}

std::string spectrum_jsonl(const ModelParams& p,
                           const std::vector<SpectrumPoint>& pts,
                           const std::vector<std::string>& extra_header)
{
    std::string out;
    append_header(out, p, extra_header);
    for (const auto& pt : pts) {
        out += "{\"Omega\":" + format_g17(pt.Omega);
        out += ",\"C_aa\":" + format_g17(pt.C_aa);
        out += ",\"C_bb\":" + format_g17(pt.C_bb);
        out += ",\"C_ab\":" + format_g17(pt.C_ab);
        out += ",\"d_aa\":\"" + format_complex(pt.d_aa) + "\"";
        out += ",\"d_bb\":\"" + format_complex(pt.d_bb) + "\"";
        out += ",\"d_ab\":\"" + format_complex(pt.d_ab) + "\"}\n";
    }
    return out;
}

std::string steady_text(const ModelParams& p, const DerivedRates& d,
                        const SteadyState& s, const ValidityReport& rep)
{
    const auto [rbar_a, rbar_b] = threshold(p, d);
    std::string out;
    append_header(out, p, {});
    auto line = [&](const std::string& k, const std::string& v) {
        out += k + " = " + v + "\n";
    };
    line("threshold_Rbar_a", format_g17(rbar_a));
    line("threshold_Rbar_b", format_g17(rbar_b));
    line("pump_R_a", format_g17(p.R_a));
    line("pump_ratio_a", format_g17(rbar_a > 0 ? p.R_a / rbar_a : 0.0));
    line("lasing_a", s.lasing_a ? "yes" : "no");
    line("lasing_b", s.lasing_b ? "yes" : "no");
    line("I_a", format_g17(s.I_a));
    line("I_b", format_g17(s.I_b));
    line("a_plus", format_complex(s.a_plus));
    line("a_minus", format_complex(s.a_minus));
    line("b_plus", format_complex(s.b_plus));
    line("b_minus", format_complex(s.b_minus));
    line("M2_plus", format_g17(s.M2_plus));
    line("M2_minus", format_g17(s.M2_minus));
    line("N2_plus", format_g17(s.N2_plus));
    line("N2_minus", format_g17(s.N2_minus));
    line("L2_plus", format_g17(s.L2_plus));
    line("L2_minus", format_g17(s.L2_minus));
    line("script_M", format_g17(s.script_M));
    line("script_N", format_g17(s.script_N));
    line("P_plus", format_complex(s.P_plus));
    line("P_minus", format_complex(s.P_minus));
    line("Q_plus", format_complex(s.Q_plus));
    line("Q_minus", format_complex(s.Q_minus));
    line("Xi_plus", format_complex(s.Xi_plus));
    line("Xi_minus", format_complex(s.Xi_minus));
    line("delta_omega_a", format_g17(s.delta_omega_a));
    line("delta_omega_b", format_g17(s.delta_omega_b));
    line("refined", s.refined ? "yes" : "no");
    line("newton_residual", format_g17(s.newton_residual));
    line("saturation_scale", format_g17(rep.saturation_scale));
    line("saturation_ok", rep.saturation_ok ? "yes" : "no");
    for (const auto& w : rep.warnings) out += "warning: " + w + "\n";
    return out;
}

std::string verification_text(const FullVerification& v)
{
    std::string out;
    auto line = [&](const std::string& k, double value) {
        out += k + " = " + format_g17(value) + "\n";
    };
    line("jacobian_residual", v.report.jacobian_residual);
    line("lyapunov_residual", v.report.lyapunov_residual);
    line("stability_margin", v.report.stability_margin);
    line("shot_noise_deviation", v.report.shot_noise_deviation);
    line("gauge_deviation", v.report.gauge_deviation);
    out += std::string("spectra_checked = ") +
           (v.spectra_checked ? "yes" : "no") + "\n";
    out += std::string("passed = ") + (v.passed ? "yes" : "no") + "\n";
    for (const auto& n : v.notes) out += "note: " + n + "\n";
    return out;
}

std::string verification_jsonl(const FullVerification& v)
{
    std::string out = "{";
    out += "\"jacobian_residual\":" + format_g17(v.report.jacobian_residual);
    out += ",\"lyapunov_residual\":" + format_g17(v.report.lyapunov_residual);
    out += ",\"stability_margin\":" + format_g17(v.report.stability_margin);
    out += ",\"shot_noise_deviation\":" +
           format_g17(v.report.shot_noise_deviation);
    out += ",\"gauge_deviation\":" + format_g17(v.report.gauge_deviation);
    out += std::string(",\"spectra_checked\":") +
           (v.spectra_checked ? "true" : "false");
    out += std::string(",\"passed\":") + (v.passed ? "true" : "false");
    out += ",\"notes\":[";
    for (std::size_t i = 0; i < v.notes.size(); ++i) {
        if (i) out += ",";
        out += "\"" + json_escape(v.notes[i]) + "\"";
    }
    out += "]}\n";
    return out;
}

void write_file(const std::string& path, const std::string& content)
{
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open output file: " + path);
    f.write(content.data(),
            static_cast<std::streamsize>(content.size()));
    if (!f.good()) throw IoError("write failed: " + path);
}

} // namespace lasernoise
