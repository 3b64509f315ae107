#pragma once

#include <complex>
#include <utility>

#include <Eigen/Dense>

#include "lasernoise/basis.hpp"
#include "lasernoise/params.hpp"

namespace lasernoise {

using Complex = std::complex<double>;

// Stationary operating point of the coupled-laser model.  Amplitudes use the
// real gauge: a_plus = a_minus = sqrt(I_a/2) for the x-polarized survivor of
// mode a and b_plus = -b_minus = -sqrt(I_b/2) for the y-polarized survivor
// of mode b (signs follow s_a, s_b).
struct SteadyState {
    double I_a = 0.0, I_b = 0.0;            // modal intensities
    Complex a_plus{}, a_minus{}, b_plus{}, b_minus{};
    // Upper-level population differences per region and spin branch:
    // M2 exclusive a-region, N2 exclusive b-region, L2 shared region.
    double M2_plus = 0.0, M2_minus = 0.0;
    double N2_plus = 0.0, N2_minus = 0.0;
    double L2_plus = 0.0, L2_minus = 0.0;
    // Collective polarizations per region and spin branch.
    Complex P_plus{}, P_minus{}, Q_plus{}, Q_minus{}, Xi_plus{}, Xi_minus{};
    bool lasing_a = false, lasing_b = false;
    bool refined = false;                    // true after Newton refinement
    // Collective saturated inversions available to each mode
    // (script_M = M2 + L2 share of mode a, analogously script_N).
    double script_M = 0.0, script_N = 0.0;
    // Frame pulls of the two lasing frequencies (nonzero when nu != 0).
    double delta_omega_a = 0.0, delta_omega_b = 0.0;
    // Final residual of the Newton solve (0 for closed-form states).
    double newton_residual = 0.0;
};

// First lasing thresholds (Rbar_a in units of R_a, Rbar_b in units of R_b):
// Rbar_x = d * gamma_perp * (kappa_x - kappa_xp) / g_x^2.
std::pair<double, double> threshold(const ModelParams& p,
                                    const DerivedRates& d);

// Stationary intensities with mode-competition clamping: solves the coupled
// saturation system, drops modes whose intensity would be negative, and
// re-checks that dropped modes stay below their (cross-saturated) threshold.
struct Intensities {
    double I_a = 0.0, I_b = 0.0;
    bool lasing_a = false, lasing_b = false;
};
Intensities stationary_intensities(const ModelParams& p,
                                   const DerivedRates& d);

// Stationary state from the closed forms: intensities from the coupled
// saturation system, populations from the loss-clamp condition with the
// region split L2 = (sqrt(xi_a)*script_M + sqrt(xi_b)*script_N)/2 and
// M2 = script_M - L2, N2 = script_N - L2 (so each mode's total saturated
// inversion is exact), polarizations slaved through
// X = (inversion) * g * (field) / (gamma_perp + i nu).
SteadyState closed_form_steady(const ModelParams& p, const DerivedRates& d);

// Deterministic time derivative of all 26 collective variables (ordering per
// BasisIndex) in the frame rotating at the empty-cavity frequency, shifted
// by the optional frame pulls.  All 26 entries are treated as independent
// coordinates (adjoint entries are not derived by conjugation), which makes
// the finite-difference Jacobian of this function well defined.
Eigen::VectorXcd collective_rhs(const Eigen::VectorXcd& state,
                                const ModelParams& p, const DerivedRates& d,
                                double delta_omega_a = 0.0,
                                double delta_omega_b = 0.0);

// Packs a SteadyState into the 26-vector of mean values.
Eigen::VectorXcd pack_state(const SteadyState& s);

// Damped Newton refinement of the stationary point on the spin-symmetric
// collective system (fields, slaved polarizations, collective inversions,
// frame pulls; 14 real unknowns).  The full region- and spin-resolved
// equations admit no strictly linearly polarized root at xi > 0 (the shared
// region cannot satisfy both loss clamps exactly), so refinement operates on
// the collective reduction whose root the closed forms solve; see README.
// Residual of that system is driven to <= 1e-10 * max(R_a, gamma_2 * pop
// scale).  Below threshold the exact dark state is returned.
SteadyState refine_steady(const SteadyState& initial, const ModelParams& p,
                          const DerivedRates& d);

// Residual vector of the spin-symmetric collective system at a given state
// (exposed for tests; refine_steady drives this to zero).
Eigen::VectorXd collective_residual(const SteadyState& s,
                                    const ModelParams& p,
                                    const DerivedRates& d);

// Saturation-validity assessment at a computed steady state: reports
// c_x*(I_x + zeta_xy*I_y)/d per mode and flags ratios above 0.1, on top of
// the parameter-only checks.
ValidityReport check_validity(const ModelParams& p, const SteadyState& s);

} // namespace lasernoise
