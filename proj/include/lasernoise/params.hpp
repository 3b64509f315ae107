#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lasernoise/errors.hpp"

namespace lasernoise {

// Physical parameters of two coupled two-polarization lasers whose gain media
// overlap in a shared region.  All rates are in units of kappa_a = 1;
// frequencies are angular.  Pump rates are per spin branch.
struct ModelParams {
    // Cavity field decay rates of modes a and b.
    double kappa_a = 1.0;
    double kappa_b = 1.0;
    // Linear dichroism (anisotropic loss) coupling the two circular
    // components of each mode.  Must satisfy 0 <= kappa_xp < kappa_x.
    double kappa_ap = 0.5;
    double kappa_bp = 0.5;
    // Linear birefringence (anisotropic phase) accompanying the dichroism.
    double omega_ap = 0.0;
    double omega_bp = 0.0;
    // Emitter-field coupling constants of the two modes.
    double g_a = 0.1;
    double g_b = 0.1;
    // Upper-level decay, lower-level decay, dephasing, spin-flip rates.
    double gamma_2 = 10.0;
    double gamma_1 = 1.0e4;
    double gamma_perp = 1.0e3;
    double gamma_c = 100.0;
    // Detuning of the common emitter line from the cavity frame frequency.
    double nu = 0.0;
    // Fraction of the a-region (resp. b-region) gain shared with the other
    // mode; in (0, 1].
    double xi_a = 0.8;
    double xi_b = 0.8;
    // Pump rate per spin branch into the full a-coupled gain region.  The
    // pump of mode b is slaved: R_b = sqrt(xi_a/xi_b) * R_a.
    double R_a = 0.0;
    // Pump statistics: 0 = Poissonian, 1 = fully regularized (quiet) pump.
    double p = 0.0;
    // Sign of the dichroic cross coupling per mode (internal convention, not
    // a config key; the CLI exposes it as --dichroism-sign).  With s_a = +1
    // the low-loss channel of mode a is the symmetric (x-polarized)
    // combination; s_b = -1 makes mode b lase in the antisymmetric
    // (y-polarized) channel, so both lasing channels see loss
    // kappa_x - kappa_xp.
    double s_a = +1.0;
    double s_b = -1.0;
};

// Rates derived from ModelParams that appear throughout the stationary and
// fluctuation analysis.
struct DerivedRates {
    double d = 0.0;        // gamma_2 * (1 + nu^2/gamma_perp^2)
    double c_a = 0.0;      // g_a^2 / gamma_perp (saturation coefficient)
    double c_b = 0.0;      // g_b^2 / gamma_perp
    double r_a = 0.0;      // 2 g_a^2 R_a / gamma_perp (gain rate)
    double r_b = 0.0;      // 2 g_b^2 R_b / gamma_perp
    double zeta_ab = 0.0;  // xi_a * g_b^2 / g_a^2 (cross-saturation ratio)
    double zeta_ba = 0.0;  // xi_b * g_a^2 / g_b^2
    double kprime_a = 0.0; // kappa_a - kappa_ap (loss of the lasing channel)
    double kprime_b = 0.0; // kappa_b - kappa_bp
    double R_b = 0.0;      // sqrt(xi_a/xi_b) * R_a
    double R_1 = 0.0;      // pump into the exclusive region of mode a
    double R_2 = 0.0;      // pump into the exclusive region of mode b
    double R_3 = 0.0;      // pump into the shared region = sqrt(xi_a) * R_a
    double R_total = 0.0;  // R_1 + R_2 + R_3
};

// Throws ConfigError on violated hard invariants (non-positive rates,
// kappa_xp >= kappa_x, xi or p out of range, negative pump).
DerivedRates derive_rates(const ModelParams& p);

// Outcome of a validity assessment.  Hard errors make the parameter set
// unusable; warnings flag regimes where the time-scale hierarchy or the
// weak-saturation linearization becomes questionable.
struct ValidityReport {
    bool ok = true;              // no hard errors
    bool saturation_ok = true;   // saturation ratio <= 0.1 (set by the
                                 // steady-state aware overload)
    std::vector<std::string> errors;
    std::vector<std::string> warnings;
    // max over lasing modes of c_x*(I_x + zeta_xy*I_y)/d; 0 when unknown.
    double saturation_scale = 0.0;
};

// Parameter-only checks: hard range/positivity invariants as errors, the
// rate hierarchy kappa, kappa_p << gamma_2 << gamma_perp, gamma_1 as
// warnings (advisory) when the separation drops below a factor of 5.
ValidityReport check_params(const ModelParams& p);

// Throws ConfigError when check_params reports errors.
void require_valid(const ModelParams& p);

// A parsed configuration: the parameter set plus an optional pump expressed
// relative to the first lasing threshold of mode a.
struct ParsedConfig {
    ModelParams params;
    std::optional<double> pump_ratio;
};

// Reads a flat "key = value" config file (UTF-8, '#' comments, blank lines
// ignored).  Keys are exactly the ModelParams field names plus "pump_ratio"
// (R_a relative to the mode-a threshold) as an alternative to R_a.  Unknown
// or duplicate keys, malformed numbers, and supplying both R_a and
// pump_ratio are errors with line-numbered diagnostics.
ParsedConfig parse_config_file(const std::string& path);

// Same parser operating on an in-memory string (used by tests).
ParsedConfig parse_config_text(const std::string& text,
                               const std::string& origin = "<string>");

// Applies pump_ratio if present: R_a = pump_ratio * threshold of mode a.
ModelParams resolve_pump(const ParsedConfig& cfg);

// The symmetric reference parameter set used throughout the validation
// battery, pumped at the given multiple of the mode-a threshold.
ModelParams reference_params(double pump_ratio = 1.01);

} // namespace lasernoise
