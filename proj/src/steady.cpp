#include "lasernoise/steady.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace lasernoise {

namespace {
constexpr Complex kI{0.0, 1.0};
} // namespace

std::pair<double, double> threshold(const ModelParams& p,
                                    const DerivedRates& d)
{
    const double rbar_a = d.d * p.gamma_perp * d.kprime_a / (p.g_a * p.g_a);
    const double rbar_b = d.d * p.gamma_perp * d.kprime_b / (p.g_b * p.g_b);
    return {rbar_a, rbar_b};
}

namespace {

// Collective inversion pinned by the loss clamp of a lasing mode.
double clamp_inversion_a(const ModelParams& p, const DerivedRates& d)
{
    return d.kprime_a * p.gamma_perp * d.d / (p.g_a * p.g_a * p.gamma_2);
}
double clamp_inversion_b(const ModelParams& p, const DerivedRates& d)
{
    return d.kprime_b * p.gamma_perp * d.d / (p.g_b * p.g_b * p.gamma_2);
}

// Gauge signatures of the surviving linear polarization per circular
// component: x_minus = s_x * x_plus, with the b amplitude chosen negative
// on the plus branch when s_b = -1 (fixes the overall free phase).
struct GaugeSigns {
    double a_p = 1.0, a_m = 1.0, b_p = 1.0, b_m = 1.0;
};
GaugeSigns gauge_signs(const ModelParams& p)
{
    GaugeSigns s;
    s.a_p = 1.0;
    s.a_m = p.s_a;
    s.b_p = (p.s_b < 0.0) ? -1.0 : 1.0;
    s.b_m = p.s_b * s.b_p;
    return s;
}

} // namespace

Intensities stationary_intensities(const ModelParams& p,
                                   const DerivedRates& d)
{
    const double Mbar = clamp_inversion_a(p, d);
    const double Nbar = clamp_inversion_b(p, d);
    // Above threshold, the loss clamp turns the saturation balance into a
    // linear system for the intensities:
    //   I_a + zeta_ab I_b = A,  I_b + zeta_ba I_a = B.
    const double A = (d.d / d.c_a) * (p.R_a / (p.gamma_2 * Mbar) - 1.0);
    const double B = (d.d / d.c_b) * (d.R_b / (p.gamma_2 * Nbar) - 1.0);

    Intensities out;
    if (A > 0.0 && B > 0.0) {
        const double det = 1.0 - d.zeta_ab * d.zeta_ba;
        if (std::abs(det) < 1e-14)
            throw NumericalError(
                "degenerate mode competition: xi_a * xi_b = 1 with both modes "
                "above threshold leaves the intensity split undetermined");
        const double Ia = (A - d.zeta_ab * B) / det;
        const double Ib = (B - d.zeta_ba * A) / det;
        if (Ia > 0.0 && Ib > 0.0) {
            out = {Ia, Ib, true, true};
            return out;
        }
        // One mode is suppressed by cross saturation; fall through to the
        // single-mode candidates.
    }
    if (A > 0.0 && B <= d.zeta_ba * A) {
        out = {A, 0.0, true, false};
        return out;
    }
    if (B > 0.0 && A <= d.zeta_ab * B) {
        out = {0.0, B, false, true};
        return out;
    }
    return out; // dark: both below (cross-saturated) threshold
}

SteadyState closed_form_steady(const ModelParams& p, const DerivedRates& d)
{
    SteadyState s;
    const Intensities in = stationary_intensities(p, d);
    s.I_a = in.I_a;
    s.I_b = in.I_b;
    s.lasing_a = in.lasing_a;
    s.lasing_b = in.lasing_b;

    const double sat_a = (d.c_a / d.d) * (s.I_a + d.zeta_ab * s.I_b);
    const double sat_b = (d.c_b / d.d) * (s.I_b + d.zeta_ba * s.I_a);
    s.script_M = s.lasing_a ? clamp_inversion_a(p, d)
                            : (p.R_a / p.gamma_2) / (1.0 + sat_a);
    s.script_N = s.lasing_b ? clamp_inversion_b(p, d)
                            : (d.R_b / p.gamma_2) / (1.0 + sat_b);

    // Region split of the collective inversions: the shared-region value is
    // the average of the two modes' proportional shares, and the exclusive
    // regions absorb the remainder so that M2 + L2 = script_M and
    // N2 + L2 = script_N hold exactly (both gain clamps stay satisfiable).
    const double sqa = std::sqrt(p.xi_a);
    const double sqb = std::sqrt(p.xi_b);
    const double L2 = 0.5 * (sqa * s.script_M + sqb * s.script_N);
    const double M2 = s.script_M - L2;
    const double N2 = s.script_N - L2;
    s.M2_plus = s.M2_minus = M2;
    s.N2_plus = s.N2_minus = N2;
    s.L2_plus = s.L2_minus = L2;

    const GaugeSigns gs = gauge_signs(p);
    const double alpha = std::sqrt(s.I_a / 2.0);
    const double beta = std::sqrt(s.I_b / 2.0);
    s.a_plus = gs.a_p * alpha;
    s.a_minus = gs.a_m * alpha;
    s.b_plus = gs.b_p * beta;
    s.b_minus = gs.b_m * beta;

    const Complex den = p.gamma_perp + kI * p.nu;
    s.P_plus = p.g_a * M2 * s.a_plus / den;
    s.P_minus = p.g_a * M2 * s.a_minus / den;
    s.Q_plus = p.g_b * N2 * s.b_plus / den;
    s.Q_minus = p.g_b * N2 * s.b_minus / den;
    s.Xi_plus = L2 * (p.g_a * s.a_plus + p.g_b * s.b_plus) / den;
    s.Xi_minus = L2 * (p.g_a * s.a_minus + p.g_b * s.b_minus) / den;

    // Mode pulling of the lasing frequencies at nonzero detuning.
    const double nfac = p.gamma_perp * p.gamma_perp + p.nu * p.nu;
    s.delta_omega_a =
        s.lasing_a ? p.g_a * p.g_a * s.script_M * p.nu / nfac : 0.0;
    s.delta_omega_b =
        s.lasing_b ? p.g_b * p.g_b * s.script_N * p.nu / nfac : 0.0;

    s.refined = false;
    s.newton_residual = 0.0;
    return s;
}

Eigen::VectorXcd pack_state(const SteadyState& s)
{
    Eigen::VectorXcd x(kFullDim);
    x[IdxAp] = s.a_plus;
    x[IdxAm] = s.a_minus;
    x[IdxBp] = s.b_plus;
    x[IdxBm] = s.b_minus;
    x[IdxApD] = std::conj(s.a_plus);
    x[IdxAmD] = std::conj(s.a_minus);
    x[IdxBpD] = std::conj(s.b_plus);
    x[IdxBmD] = std::conj(s.b_minus);
    x[IdxPp] = s.P_plus;
    x[IdxPm] = s.P_minus;
    x[IdxQp] = s.Q_plus;
    x[IdxQm] = s.Q_minus;
    x[IdxXip] = s.Xi_plus;
    x[IdxXim] = s.Xi_minus;
    x[IdxPpD] = std::conj(s.P_plus);
    x[IdxPmD] = std::conj(s.P_minus);
    x[IdxQpD] = std::conj(s.Q_plus);
    x[IdxQmD] = std::conj(s.Q_minus);
    x[IdxXipD] = std::conj(s.Xi_plus);
    x[IdxXimD] = std::conj(s.Xi_minus);
    x[IdxM2p] = s.M2_plus;
    x[IdxM2m] = s.M2_minus;
    x[IdxN2p] = s.N2_plus;
    x[IdxN2m] = s.N2_minus;
    x[IdxL2p] = s.L2_plus;
    x[IdxL2m] = s.L2_minus;
    return x;
}

Eigen::VectorXcd collective_rhs(const Eigen::VectorXcd& x,
                                const ModelParams& p, const DerivedRates& d,
                                double dwa, double dwb)
{
    if (x.size() != kFullDim)
        throw NumericalError("collective_rhs expects a 26-entry state");

    Eigen::VectorXcd f(kFullDim);
    const Complex cross_a = p.s_a * Complex(p.kappa_ap, p.omega_ap);
    const Complex cross_b = p.s_b * Complex(p.kappa_bp, p.omega_bp);
    const Complex pol_decay = -Complex(p.gamma_perp, p.nu);
    const double dwm = 0.5 * (dwa + dwb);

    // Field equations: cavity decay, dichroic/birefringent cross coupling,
    // gain from the same-spin polarizations of the own and shared regions.
    f[IdxAp] = (-p.kappa_a + kI * dwa) * x[IdxAp] + cross_a * x[IdxAm] +
               p.g_a * (x[IdxPp] + x[IdxXip]);
    f[IdxAm] = (-p.kappa_a + kI * dwa) * x[IdxAm] + cross_a * x[IdxAp] +
               p.g_a * (x[IdxPm] + x[IdxXim]);
    f[IdxBp] = (-p.kappa_b + kI * dwb) * x[IdxBp] + cross_b * x[IdxBm] +
               p.g_b * (x[IdxQp] + x[IdxXip]);
    f[IdxBm] = (-p.kappa_b + kI * dwb) * x[IdxBm] + cross_b * x[IdxBp] +
               p.g_b * (x[IdxQm] + x[IdxXim]);
    f[IdxApD] = (-p.kappa_a - kI * dwa) * x[IdxApD] +
                std::conj(cross_a) * x[IdxAmD] +
                p.g_a * (x[IdxPpD] + x[IdxXipD]);
    f[IdxAmD] = (-p.kappa_a - kI * dwa) * x[IdxAmD] +
                std::conj(cross_a) * x[IdxApD] +
                p.g_a * (x[IdxPmD] + x[IdxXimD]);
    f[IdxBpD] = (-p.kappa_b - kI * dwb) * x[IdxBpD] +
                std::conj(cross_b) * x[IdxBmD] +
                p.g_b * (x[IdxQpD] + x[IdxXipD]);
    f[IdxBmD] = (-p.kappa_b - kI * dwb) * x[IdxBmD] +
                std::conj(cross_b) * x[IdxBpD] +
                p.g_b * (x[IdxQmD] + x[IdxXimD]);

    // Polarization equations: dephasing/detuning decay plus inversion-driven
    // source from the same region and spin.
    f[IdxPp] = (pol_decay + kI * dwa) * x[IdxPp] + p.g_a * x[IdxM2p] * x[IdxAp];
    f[IdxPm] = (pol_decay + kI * dwa) * x[IdxPm] + p.g_a * x[IdxM2m] * x[IdxAm];
    f[IdxQp] = (pol_decay + kI * dwb) * x[IdxQp] + p.g_b * x[IdxN2p] * x[IdxBp];
    f[IdxQm] = (pol_decay + kI * dwb) * x[IdxQm] + p.g_b * x[IdxN2m] * x[IdxBm];
    const Complex u_p = p.g_a * x[IdxAp] + p.g_b * x[IdxBp];
    const Complex u_m = p.g_a * x[IdxAm] + p.g_b * x[IdxBm];
    const Complex u_pD = p.g_a * x[IdxApD] + p.g_b * x[IdxBpD];
    const Complex u_mD = p.g_a * x[IdxAmD] + p.g_b * x[IdxBmD];
    f[IdxXip] = (pol_decay + kI * dwm) * x[IdxXip] + x[IdxL2p] * u_p;
    f[IdxXim] = (pol_decay + kI * dwm) * x[IdxXim] + x[IdxL2m] * u_m;
    const Complex pol_decay_c = -Complex(p.gamma_perp, -p.nu);
    f[IdxPpD] =
        (pol_decay_c - kI * dwa) * x[IdxPpD] + p.g_a * x[IdxM2p] * x[IdxApD];
    f[IdxPmD] =
        (pol_decay_c - kI * dwa) * x[IdxPmD] + p.g_a * x[IdxM2m] * x[IdxAmD];
    f[IdxQpD] =
        (pol_decay_c - kI * dwb) * x[IdxQpD] + p.g_b * x[IdxN2p] * x[IdxBpD];
    f[IdxQmD] =
        (pol_decay_c - kI * dwb) * x[IdxQmD] + p.g_b * x[IdxN2m] * x[IdxBmD];
    f[IdxXipD] = (pol_decay_c - kI * dwm) * x[IdxXipD] + x[IdxL2p] * u_pD;
    f[IdxXimD] = (pol_decay_c - kI * dwm) * x[IdxXimD] + x[IdxL2m] * u_mD;

    // Population-difference equations: pump, decay, spin-flip mixing, and
    // stimulated exchange with the same-region polarization (the minus sign
    // makes populations saturate with intensity).
    f[IdxM2p] = d.R_1 - p.gamma_2 * x[IdxM2p] -
                p.gamma_c * (x[IdxM2p] - x[IdxM2m]) -
                p.g_a * (x[IdxApD] * x[IdxPp] + x[IdxPpD] * x[IdxAp]);
    f[IdxM2m] = d.R_1 - p.gamma_2 * x[IdxM2m] -
                p.gamma_c * (x[IdxM2m] - x[IdxM2p]) -
                p.g_a * (x[IdxAmD] * x[IdxPm] + x[IdxPmD] * x[IdxAm]);
    f[IdxN2p] = d.R_2 - p.gamma_2 * x[IdxN2p] -
                p.gamma_c * (x[IdxN2p] - x[IdxN2m]) -
                p.g_b * (x[IdxBpD] * x[IdxQp] + x[IdxQpD] * x[IdxBp]);
    f[IdxN2m] = d.R_2 - p.gamma_2 * x[IdxN2m] -
                p.gamma_c * (x[IdxN2m] - x[IdxN2p]) -
                p.g_b * (x[IdxBmD] * x[IdxQm] + x[IdxQmD] * x[IdxBm]);
    f[IdxL2p] = d.R_3 - p.gamma_2 * x[IdxL2p] -
                p.gamma_c * (x[IdxL2p] - x[IdxL2m]) -
                (u_pD * x[IdxXip] + x[IdxXipD] * u_p);
    f[IdxL2m] = d.R_3 - p.gamma_2 * x[IdxL2m] -
                p.gamma_c * (x[IdxL2m] - x[IdxL2p]) -
                (u_mD * x[IdxXim] + x[IdxXimD] * u_m);
    return f;
}

namespace {

// Spin-symmetric collective stationarity system.  Unknowns (14 real):
//   x0 alpha, x1 beta, x2/x3 P, x4/x5 Q, x6/x7 Xi+, x8/x9 Xi-,
//   x10 script_M, x11 script_N, x12 dw_a, x13 dw_b.
// Equations: projected field rows of both modes, slaving of the three
// polarizations, and the two saturated inversion balances.
struct SymSystem {
    const ModelParams& p;
    const DerivedRates& d;
    GaugeSigns gs;
    bool solve_a = true, solve_b = true;

    Eigen::VectorXd residual(const Eigen::VectorXd& x) const
    {
        const double alpha = x[0], beta = x[1];
        const Complex P(x[2], x[3]), Q(x[4], x[5]);
        const Complex Xp(x[6], x[7]), Xm(x[8], x[9]);
        const double sM = x[10], sN = x[11];
        const double dwa = x[12], dwb = x[13];
        const double dwm = 0.5 * (dwa + dwb);

        const double sqa = std::sqrt(p.xi_a);
        const double sqb = std::sqrt(p.xi_b);
        const double L2 = 0.5 * (sqa * sM + sqb * sN);
        const double M2 = sM - L2;
        const double N2 = sN - L2;
        const double Ia = 2.0 * alpha * alpha;
        const double Ib = 2.0 * beta * beta;
        const Complex pol = -Complex(p.gamma_perp, p.nu);

        const Complex u_p = p.g_a * gs.a_p * alpha + p.g_b * gs.b_p * beta;
        const Complex u_m = p.g_a * gs.a_m * alpha + p.g_b * gs.b_m * beta;

        const Complex e1 =
            Complex(-p.kappa_a + p.kappa_ap, p.omega_ap + dwa) * alpha +
            p.g_a * (P + 0.5 * (gs.a_p * Xp + gs.a_m * Xm));
        const Complex e2 =
            Complex(-p.kappa_b + p.kappa_bp, p.omega_bp + dwb) * beta +
            p.g_b * (Q + 0.5 * (gs.b_p * Xp + gs.b_m * Xm));
        const Complex e3 = (pol + kI * dwa) * P + p.g_a * M2 * alpha;
        const Complex e4 = (pol + kI * dwb) * Q + p.g_b * N2 * beta;
        const Complex e5 = (pol + kI * dwm) * Xp + L2 * u_p;
        const Complex e6 = (pol + kI * dwm) * Xm + L2 * u_m;
        const double e7 =
            p.R_a -
            p.gamma_2 * sM * (1.0 + (d.c_a / d.d) * (Ia + d.zeta_ab * Ib));
        const double e8 =
            d.R_b -
            p.gamma_2 * sN * (1.0 + (d.c_b / d.d) * (Ib + d.zeta_ba * Ia));

        Eigen::VectorXd f(14);
        f << e1.real(), e1.imag(), e2.real(), e2.imag(), e3.real(), e3.imag(),
            e4.real(), e4.imag(), e5.real(), e5.imag(), e6.real(), e6.imag(),
            e7, e8;

        // Dark modes: their field/polarization/frame-pull unknowns are
        // frozen at zero; replace the degenerate rows by pinning equations.
        if (!solve_a) {
            f[0] = x[0];
            f[1] = x[12];
            f[4] = x[2];
            f[5] = x[3];
        }
        if (!solve_b) {
            f[2] = x[1];
            f[3] = x[13];
            f[6] = x[4];
            f[7] = x[5];
        }
        if (!solve_a && !solve_b) {
            f[8] = x[6];
            f[9] = x[7];
            f[10] = x[8];
            f[11] = x[9];
        }
        return f;
    }
};

Eigen::VectorXd unknowns_from_state(const SteadyState& s, const GaugeSigns& gs)
{
    Eigen::VectorXd x(14);
    const Complex P = 0.5 * (gs.a_p * s.P_plus + gs.a_m * s.P_minus);
    const Complex Q = 0.5 * (gs.b_p * s.Q_plus + gs.b_m * s.Q_minus);
    x << (gs.a_p * s.a_plus).real(), (gs.b_p * s.b_plus).real(), P.real(),
        P.imag(), Q.real(), Q.imag(), s.Xi_plus.real(), s.Xi_plus.imag(),
        s.Xi_minus.real(), s.Xi_minus.imag(), s.script_M, s.script_N,
        s.delta_omega_a, s.delta_omega_b;
    return x;
}

SteadyState state_from_unknowns(const Eigen::VectorXd& x,
                                const ModelParams& p, const DerivedRates& d,
                                bool lasing_a, bool lasing_b)
{
    const GaugeSigns gs = gauge_signs(p);
    SteadyState s;
    const double alpha = x[0], beta = x[1];
    s.I_a = 2.0 * alpha * alpha;
    s.I_b = 2.0 * beta * beta;
    s.lasing_a = lasing_a;
    s.lasing_b = lasing_b;
    s.a_plus = gs.a_p * alpha;
    s.a_minus = gs.a_m * alpha;
    s.b_plus = gs.b_p * beta;
    s.b_minus = gs.b_m * beta;
    const Complex P(x[2], x[3]), Q(x[4], x[5]);
    s.P_plus = gs.a_p * P;
    s.P_minus = gs.a_m * P;
    s.Q_plus = gs.b_p * Q;
    s.Q_minus = gs.b_m * Q;
    s.Xi_plus = Complex(x[6], x[7]);
    s.Xi_minus = Complex(x[8], x[9]);
    s.script_M = x[10];
    s.script_N = x[11];
    const double sqa = std::sqrt(p.xi_a);
    const double sqb = std::sqrt(p.xi_b);
    const double L2 = 0.5 * (sqa * s.script_M + sqb * s.script_N);
    s.M2_plus = s.M2_minus = s.script_M - L2;
    s.N2_plus = s.N2_minus = s.script_N - L2;
    s.L2_plus = s.L2_minus = L2;
    s.delta_omega_a = x[12];
    s.delta_omega_b = x[13];
    (void)d;
    return s;
}

} // namespace

Eigen::VectorXd collective_residual(const SteadyState& s,
                                    const ModelParams& p,
                                    const DerivedRates& d)
{
    SymSystem sys{p, d, gauge_signs(p), s.lasing_a, s.lasing_b};
    return sys.residual(unknowns_from_state(s, sys.gs));
}

SteadyState refine_steady(const SteadyState& initial, const ModelParams& p,
                          const DerivedRates& d)
{
    if (!initial.lasing_a && !initial.lasing_b) {
        // Dark state: the closed form is the exact fixed point.
        SteadyState s = initial;
        s.refined = true;
        s.newton_residual = 0.0;
        return s;
    }

    SymSystem sys{p, d, gauge_signs(p), initial.lasing_a, initial.lasing_b};
    Eigen::VectorXd x = unknowns_from_state(initial, sys.gs);
    const double scale =
        std::max({p.R_a, d.R_b,
                  p.gamma_2 * (std::abs(initial.script_M) +
                               std::abs(initial.script_N)),
                  1.0});
    const double tol = 1e-10 * scale;

    Eigen::VectorXd f = sys.residual(x);
    for (int iter = 0; iter < 100; ++iter) {
        if (f.lpNorm<Eigen::Infinity>() <= tol) break;

        // Central finite-difference Jacobian of the 14-dim system.
        Eigen::MatrixXd J(14, 14);
        for (int j = 0; j < 14; ++j) {
            const double h = 1e-7 * std::max(1.0, std::abs(x[j]));
            Eigen::VectorXd xp = x, xm = x;
            xp[j] += h;
            xm[j] -= h;
            J.col(j) = (sys.residual(xp) - sys.residual(xm)) / (2.0 * h);
        }
        const Eigen::VectorXd step = J.colPivHouseholderQr().solve(-f);
        if (!step.allFinite())
            throw NumericalError("steady-state refinement: singular Jacobian");

        // Backtracking damping on the residual norm.
        const double f0 = f.norm();
        double lambda = 1.0;
        bool accepted = false;
        while (lambda >= 1e-4) {
            const Eigen::VectorXd xt = x + lambda * step;
            const Eigen::VectorXd ft = sys.residual(xt);
            if (ft.norm() <= (1.0 - 0.25 * lambda) * f0 || ft.norm() <= tol) {
                x = xt;
                f = ft;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if (!accepted)
            throw NumericalError(
                "steady-state refinement: line search stalled at residual " +
                std::to_string(f0));
    }
    if (f.lpNorm<Eigen::Infinity>() > tol) {
        std::ostringstream msg;
        msg << "steady-state refinement did not converge: residual "
            << f.lpNorm<Eigen::Infinity>() << " > tolerance " << tol;
        throw NumericalError(msg.str());
    }

    SteadyState s =
        state_from_unknowns(x, p, d, initial.lasing_a, initial.lasing_b);
    s.refined = true;
    s.newton_residual = f.lpNorm<Eigen::Infinity>();
    return s;
}

ValidityReport check_validity(const ModelParams& p, const SteadyState& s)
{
    ValidityReport rep = check_params(p);
    const DerivedRates d = derive_rates(p);
    const double ratio_a = (d.c_a / d.d) * (s.I_a + d.zeta_ab * s.I_b);
    const double ratio_b = (d.c_b / d.d) * (s.I_b + d.zeta_ba * s.I_a);
    rep.saturation_scale = std::max(ratio_a, ratio_b);
    if (rep.saturation_scale > 0.1) {
        rep.saturation_ok = false;
        std::ostringstream msg;
        msg << "saturation ratio " << rep.saturation_scale
            << " exceeds 0.1: the weak-saturation linearization is "
               "questionable at this pump";
        rep.warnings.push_back(msg.str());
    }
    return rep;
}

} // namespace lasernoise
