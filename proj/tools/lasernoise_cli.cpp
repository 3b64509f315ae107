// Command-line front end: steady states, photocurrent noise spectra,
// parameter sweeps, verification oracles and the exact toy-model
// cross-check of the correlated-loss mechanism.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lasernoise/fluctuation.hpp"
#include "lasernoise/output.hpp"
#include "lasernoise/params.hpp"
#include "lasernoise/steady.hpp"
#include "lasernoise/toymodel.hpp"
#include "lasernoise/verification.hpp"

namespace {

using namespace lasernoise;

struct CommonOpts {
    std::string config_path;
    std::string out_path;
    std::string format = "csv";
    std::string dichroism_sign = "plus";
    double omega_min = 1e-4;
    double omega_max = 1e6;
    int omega_points = 400;
    bool log_grid = true;
};

void add_model_options(CLI::App* cmd, CommonOpts& o)
{
    cmd->add_option("--config", o.config_path, "parameter file (key = value)")
        ->required();
    cmd->add_option("--dichroism-sign", o.dichroism_sign,
                    "sign convention of the dichroic cross coupling: 'plus' "
                    "(mode a lases in the symmetric channel, default) or "
                    "'minus' (conventions swapped)")
        ->check(CLI::IsMember({"plus", "minus"}));
}

void add_grid_options(CLI::App* cmd, CommonOpts& o)
{
    cmd->add_option("--out", o.out_path, "output file (default: stdout)");
    cmd->add_option("--format", o.format, "output format")
        ->check(CLI::IsMember({"csv", "jsonl"}));
    cmd->add_option("--omega-min", o.omega_min, "lowest frequency");
    cmd->add_option("--omega-max", o.omega_max, "highest frequency");
    cmd->add_option("--omega-points", o.omega_points, "number of grid points");
    auto* log = cmd->add_flag("--log", "logarithmic frequency grid (default)");
    cmd->add_flag("--linear", "linear frequency grid")->excludes(log);
}

ModelParams load_params(const CommonOpts& o)
{
    ParsedConfig cfg = parse_config_file(o.config_path);
    if (o.dichroism_sign == "minus") {
        cfg.params.s_a = -1.0;
        cfg.params.s_b = +1.0;
    }
    return resolve_pump(cfg);
}

std::vector<double> grid_from(const CLI::App* cmd, const CommonOpts& o)
{
    if (o.omega_points < 2 || o.omega_points > 1000000)
        throw ConfigError("--omega-points must be in [2, 1e6]");
    const bool linear = cmd->count("--linear") > 0;
    return make_omega_grid(o.omega_min, o.omega_max, o.omega_points, !linear);
}

void emit(const CommonOpts& o, const std::string& content)
{
    if (o.out_path.empty())
        std::cout << content;
    else
        write_file(o.out_path, content);
}

std::vector<SpectrumPoint> run_spectrum(const ModelParams& p,
                                        const std::vector<double>& grid)
{
    const DerivedRates d = derive_rates(p);
    const SteadyState s = refine_steady(closed_form_steady(p, d), p, d);
    const SpectrumProblem prob = SpectrumProblem::prepare(
        build_drift(s, p, d), build_diffusion(s, p, d), s, p);
    return sweep(grid, prob);
}

int cmd_steady(const CommonOpts& o)
{
    const ModelParams p = load_params(o);
    const DerivedRates d = derive_rates(p);
    const SteadyState s = refine_steady(closed_form_steady(p, d), p, d);
    const ValidityReport rep = check_validity(p, s);
    const std::string text = steady_text(p, d, s, rep);
    std::cout << text;
    if (!o.out_path.empty()) write_file(o.out_path, text);
    return 0;
}

int cmd_spectrum(const CLI::App* cmd, const CommonOpts& o)
{
    const ModelParams p = load_params(o);
    const std::vector<double> grid = grid_from(cmd, o);
    const std::vector<SpectrumPoint> pts = run_spectrum(p, grid);
    emit(o, o.format == "jsonl" ? spectrum_jsonl(p, pts)
                                : spectrum_csv(p, pts));
    return 0;
}

struct SweepSpec {
    std::string var;
    std::vector<std::string> tokens; // original value spellings (for names)
    std::vector<double> values;
};

SweepSpec parse_sweep(const std::string& arg)
{
    const auto eq = arg.find('=');
    if (eq == std::string::npos)
        throw ConfigError("--sweep expects VAR=v1,v2,...");
    SweepSpec spec;
    spec.var = arg.substr(0, eq);
    if (spec.var != "pump_ratio" && spec.var != "xi" && spec.var != "p" &&
        spec.var != "g")
        throw ConfigError("sweep variable must be one of pump_ratio, xi, p, g");
    std::string rest = arg.substr(eq + 1);
    std::size_t pos = 0;
    while (pos <= rest.size()) {
        const auto comma = rest.find(',', pos);
        const std::string tok =
            rest.substr(pos, comma == std::string::npos ? std::string::npos
                                                        : comma - pos);
        if (tok.empty()) throw ConfigError("empty value in --sweep list");
        try {
            std::size_t used = 0;
            const double v = std::stod(tok, &used);
            if (used != tok.size()) throw std::invalid_argument(tok);
            spec.tokens.push_back(tok);
            spec.values.push_back(v);
        } catch (const std::exception&) {
            throw ConfigError("malformed sweep value: " + tok);
        }
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    if (spec.values.empty()) throw ConfigError("empty --sweep value list");
    return spec;
}

int cmd_sweep(const CLI::App* cmd, const CommonOpts& o,
              const std::string& sweep_arg)
{
    if (o.out_path.empty())
        throw ConfigError("sweep writes one file per value; --out is "
                          "required as the base path");
    const SweepSpec spec = parse_sweep(sweep_arg);
    const ModelParams base = load_params(o);
    const std::vector<double> grid = grid_from(cmd, o);

    // Base path: insert the variable tag before the extension.
    std::string stem = o.out_path, ext;
    const auto dot = o.out_path.rfind('.');
    const auto slash = o.out_path.rfind('/');
    if (dot != std::string::npos &&
        (slash == std::string::npos || dot > slash)) {
        stem = o.out_path.substr(0, dot);
        ext = o.out_path.substr(dot);
    } else {
        ext = (o.format == "jsonl") ? ".jsonl" : ".csv";
    }

    const auto [rbar_a, rbar_b] = threshold(base, derive_rates(base));
    (void)rbar_b;
    std::string index;
    index += "# sweep_variable = " + spec.var + "\n";
    index += "value,file\n";
    for (std::size_t i = 0; i < spec.values.size(); ++i) {
        ModelParams p = base;
        const double v = spec.values[i];
        if (spec.var == "pump_ratio")
            p.R_a = v * rbar_a;
        else if (spec.var == "xi")
            p.xi_a = p.xi_b = v;
        else if (spec.var == "p")
            p.p = v;
        else // g: pump rate stays at its configured absolute value
            p.g_a = p.g_b = v;

        const std::vector<SpectrumPoint> pts = run_spectrum(p, grid);
        const std::vector<std::string> extra = {
            "sweep_variable = " + spec.var,
            "sweep_value = " + spec.tokens[i]};
        const std::string file =
            stem + "_" + spec.var + "-" + spec.tokens[i] + ext;
        write_file(file, o.format == "jsonl"
                             ? spectrum_jsonl(p, pts, extra)
                             : spectrum_csv(p, pts, extra));
        index += spec.tokens[i] + "," + file + "\n";
    }
    write_file(stem + "_index.csv", index);
    return 0;
}

int cmd_validate(const CommonOpts& o)
{
    const ModelParams p = load_params(o);
    const FullVerification v = run_verification(p);
    std::cout << verification_text(v);
    if (!o.out_path.empty()) write_file(o.out_path, verification_jsonl(v));
    return v.passed ? 0 : 4;
}

int cmd_toy_verify(const ToyConfig& cfg)
{
    const ToyExtraction ex = extract_effective_coefficients(cfg);
    auto line = [&](const std::string& k, double v) {
        std::cout << k << " = " << format_g17(v) << "\n";
    };
    line("dispersive_fitted", ex.dispersive_fitted);
    line("dispersive_analytic", ex.dispersive_analytic);
    line("kerr_fitted", ex.kerr_fitted);
    line("kerr_analytic", ex.kerr_analytic);
    line("sym_mode_decay_fitted", ex.sym_decay_fitted);
    line("sym_mode_decay_analytic", ex.sym_decay_analytic);
    for (const auto& r : ex.runs) {
        std::cout << "run alpha = " << format_g17(r.alpha)
                  << ": n_mean = " << format_g17(r.n_mean)
                  << ", phase_rate = " << format_g17(r.phase_rate)
                  << ", fit_rms = " << format_g17(r.phase_fit_residual)
                  << ", sym_decay = " << format_g17(r.sym_decay_rate) << "\n";
    }
    std::cout << "inconclusive = " << (ex.inconclusive ? "yes" : "no") << "\n";
    for (const auto& w : ex.warnings) std::cout << "warning: " << w << "\n";
    return ex.inconclusive ? 4 : 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Steady states and quantum photocurrent-noise spectra of "
                 "two lasers coupled through a shared gain region"};
    app.require_subcommand(1);

    CommonOpts o;
    std::string sweep_arg;
    ToyConfig toy;
    double toy_alpha = 0.4;

    CLI::App* c_steady = app.add_subcommand(
        "steady", "compute and print the stationary operating point");
    add_model_options(c_steady, o);
    c_steady->add_option("--out", o.out_path, "also write the report here");

    CLI::App* c_spectrum = app.add_subcommand(
        "spectrum", "photocurrent noise spectra over a frequency grid");
    add_model_options(c_spectrum, o);
    add_grid_options(c_spectrum, o);

    CLI::App* c_sweep = app.add_subcommand(
        "sweep", "repeat the spectrum over a list of parameter values");
    add_model_options(c_sweep, o);
    add_grid_options(c_sweep, o);
    c_sweep
        ->add_option("--sweep", sweep_arg,
                     "VAR=v1,v2,... with VAR one of pump_ratio, xi, p, g")
        ->required();

    CLI::App* c_validate = app.add_subcommand(
        "validate", "run the independent verification oracles");
    add_model_options(c_validate, o);
    c_validate->add_option("--out", o.out_path,
                           "write a machine-readable report here");

    CLI::App* c_toy = app.add_subcommand(
        "toy-verify", "integrate the exact two-mode/one-emitter master "
                      "equation and extract effective coefficients");
    c_toy->add_option("--toy-g", toy.g, "emitter-mode coupling");
    c_toy->add_option("--toy-gamma-perp", toy.gamma_perp, "dephasing rate");
    c_toy->add_option("--toy-gamma-2", toy.gamma_2, "emitter decay rate");
    c_toy->add_option("--toy-alpha", toy_alpha,
                      "initial coherent amplitude per mode");
    c_toy->add_option("--toy-cutoff", toy.fock_cutoff, "Fock cutoff");
    c_toy->add_option("--toy-dt", toy.dt, "integrator step");
    c_toy->add_option("--toy-t-final", toy.t_final, "integration time");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2; // bad usage is a config error
    }

    try {
        if (c_steady->parsed()) return cmd_steady(o);
        if (c_spectrum->parsed()) return cmd_spectrum(c_spectrum, o);
        if (c_sweep->parsed()) return cmd_sweep(c_sweep, o, sweep_arg);
        if (c_validate->parsed()) return cmd_validate(o);
        if (c_toy->parsed()) {
            toy.alpha_a = toy_alpha;
            toy.alpha_b = toy_alpha;
            return cmd_toy_verify(toy);
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 2;
    } catch (const UnstableDriftError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
