#include "lasernoise/fluctuation.hpp"

#include <atomic>
#include <cmath>
#include <future>
#include <sstream>
#include <thread>

namespace lasernoise {

namespace {
constexpr Complex kI{0.0, 1.0};
} // namespace

Eigen::MatrixXcd build_drift(const SteadyState& s, const ModelParams& p,
                             const DerivedRates& d)
{
    (void)d;
    const Eigen::VectorXcd x = pack_state(s);
    Eigen::MatrixXcd D = Eigen::MatrixXcd::Zero(kFullDim, kFullDim);

    const Complex cross_a = p.s_a * Complex(p.kappa_ap, p.omega_ap);
    const Complex cross_b = p.s_b * Complex(p.kappa_bp, p.omega_bp);
    const Complex pol = -Complex(p.gamma_perp, p.nu);
    const double dwa = s.delta_omega_a, dwb = s.delta_omega_b;
    const double dwm = 0.5 * (dwa + dwb);
    const Complex u_p = p.g_a * x[IdxAp] + p.g_b * x[IdxBp];
    const Complex u_m = p.g_a * x[IdxAm] + p.g_b * x[IdxBm];

    // --- field rows ---
    D(IdxAp, IdxAp) = -p.kappa_a + kI * dwa;
    D(IdxAp, IdxAm) = cross_a;
    D(IdxAp, IdxPp) = p.g_a;
    D(IdxAp, IdxXip) = p.g_a;
    D(IdxAm, IdxAm) = -p.kappa_a + kI * dwa;
    D(IdxAm, IdxAp) = cross_a;
    D(IdxAm, IdxPm) = p.g_a;
    D(IdxAm, IdxXim) = p.g_a;
    D(IdxBp, IdxBp) = -p.kappa_b + kI * dwb;
    D(IdxBp, IdxBm) = cross_b;
    D(IdxBp, IdxQp) = p.g_b;
    D(IdxBp, IdxXip) = p.g_b;
    D(IdxBm, IdxBm) = -p.kappa_b + kI * dwb;
    D(IdxBm, IdxBp) = cross_b;
    D(IdxBm, IdxQm) = p.g_b;
    D(IdxBm, IdxXim) = p.g_b;

    D(IdxApD, IdxApD) = -p.kappa_a - kI * dwa;
    D(IdxApD, IdxAmD) = std::conj(cross_a);
    D(IdxApD, IdxPpD) = p.g_a;
    D(IdxApD, IdxXipD) = p.g_a;
    D(IdxAmD, IdxAmD) = -p.kappa_a - kI * dwa;
    D(IdxAmD, IdxApD) = std::conj(cross_a);
    D(IdxAmD, IdxPmD) = p.g_a;
    D(IdxAmD, IdxXimD) = p.g_a;
    D(IdxBpD, IdxBpD) = -p.kappa_b - kI * dwb;
    D(IdxBpD, IdxBmD) = std::conj(cross_b);
    D(IdxBpD, IdxQpD) = p.g_b;
    D(IdxBpD, IdxXipD) = p.g_b;
    D(IdxBmD, IdxBmD) = -p.kappa_b - kI * dwb;
    D(IdxBmD, IdxBpD) = std::conj(cross_b);
    D(IdxBmD, IdxQmD) = p.g_b;
    D(IdxBmD, IdxXimD) = p.g_b;

    // --- polarization rows ---
    D(IdxPp, IdxPp) = pol + kI * dwa;
    D(IdxPp, IdxAp) = p.g_a * x[IdxM2p];
    D(IdxPp, IdxM2p) = p.g_a * x[IdxAp];
    D(IdxPm, IdxPm) = pol + kI * dwa;
    D(IdxPm, IdxAm) = p.g_a * x[IdxM2m];
    D(IdxPm, IdxM2m) = p.g_a * x[IdxAm];
    D(IdxQp, IdxQp) = pol + kI * dwb;
    D(IdxQp, IdxBp) = p.g_b * x[IdxN2p];
    D(IdxQp, IdxN2p) = p.g_b * x[IdxBp];
    D(IdxQm, IdxQm) = pol + kI * dwb;
    D(IdxQm, IdxBm) = p.g_b * x[IdxN2m];
    D(IdxQm, IdxN2m) = p.g_b * x[IdxBm];
    D(IdxXip, IdxXip) = pol + kI * dwm;
    D(IdxXip, IdxAp) = p.g_a * x[IdxL2p];
    D(IdxXip, IdxBp) = p.g_b * x[IdxL2p];
    D(IdxXip, IdxL2p) = u_p;
    D(IdxXim, IdxXim) = pol + kI * dwm;
    D(IdxXim, IdxAm) = p.g_a * x[IdxL2m];
    D(IdxXim, IdxBm) = p.g_b * x[IdxL2m];
    D(IdxXim, IdxL2m) = u_m;

    const Complex pol_c = std::conj(pol);
    D(IdxPpD, IdxPpD) = pol_c - kI * dwa;
    D(IdxPpD, IdxApD) = p.g_a * x[IdxM2p];
    D(IdxPpD, IdxM2p) = p.g_a * x[IdxApD];
    D(IdxPmD, IdxPmD) = pol_c - kI * dwa;
    D(IdxPmD, IdxAmD) = p.g_a * x[IdxM2m];
    D(IdxPmD, IdxM2m) = p.g_a * x[IdxAmD];
    D(IdxQpD, IdxQpD) = pol_c - kI * dwb;
    D(IdxQpD, IdxBpD) = p.g_b * x[IdxN2p];
    D(IdxQpD, IdxN2p) = p.g_b * x[IdxBpD];
    D(IdxQmD, IdxQmD) = pol_c - kI * dwb;
    D(IdxQmD, IdxBmD) = p.g_b * x[IdxN2m];
    D(IdxQmD, IdxN2m) = p.g_b * x[IdxBmD];
    const Complex u_pD = p.g_a * x[IdxApD] + p.g_b * x[IdxBpD];
    const Complex u_mD = p.g_a * x[IdxAmD] + p.g_b * x[IdxBmD];
    D(IdxXipD, IdxXipD) = pol_c - kI * dwm;
    D(IdxXipD, IdxApD) = p.g_a * x[IdxL2p];
    D(IdxXipD, IdxBpD) = p.g_b * x[IdxL2p];
    D(IdxXipD, IdxL2p) = u_pD;
    D(IdxXimD, IdxXimD) = pol_c - kI * dwm;
    D(IdxXimD, IdxAmD) = p.g_a * x[IdxL2m];
    D(IdxXimD, IdxBmD) = p.g_b * x[IdxL2m];
    D(IdxXimD, IdxL2m) = u_mD;

    // --- population rows ---
    const double gd = -p.gamma_2 - p.gamma_c;
    D(IdxM2p, IdxM2p) = gd;
    D(IdxM2p, IdxM2m) = p.gamma_c;
    D(IdxM2p, IdxAp) = -p.g_a * x[IdxPpD];
    D(IdxM2p, IdxApD) = -p.g_a * x[IdxPp];
    D(IdxM2p, IdxPp) = -p.g_a * x[IdxApD];
    D(IdxM2p, IdxPpD) = -p.g_a * x[IdxAp];
    D(IdxM2m, IdxM2m) = gd;
    D(IdxM2m, IdxM2p) = p.gamma_c;
    D(IdxM2m, IdxAm) = -p.g_a * x[IdxPmD];
    D(IdxM2m, IdxAmD) = -p.g_a * x[IdxPm];
    D(IdxM2m, IdxPm) = -p.g_a * x[IdxAmD];
    D(IdxM2m, IdxPmD) = -p.g_a * x[IdxAm];
    D(IdxN2p, IdxN2p) = gd;
    D(IdxN2p, IdxN2m) = p.gamma_c;
    D(IdxN2p, IdxBp) = -p.g_b * x[IdxQpD];
    D(IdxN2p, IdxBpD) = -p.g_b * x[IdxQp];
    D(IdxN2p, IdxQp) = -p.g_b * x[IdxBpD];
    D(IdxN2p, IdxQpD) = -p.g_b * x[IdxBp];
    D(IdxN2m, IdxN2m) = gd;
    D(IdxN2m, IdxN2p) = p.gamma_c;
    D(IdxN2m, IdxBm) = -p.g_b * x[IdxQmD];
    D(IdxN2m, IdxBmD) = -p.g_b * x[IdxQm];
    D(IdxN2m, IdxQm) = -p.g_b * x[IdxBmD];
    D(IdxN2m, IdxQmD) = -p.g_b * x[IdxBm];
    D(IdxL2p, IdxL2p) = gd;
    D(IdxL2p, IdxL2m) = p.gamma_c;
    D(IdxL2p, IdxAp) = -p.g_a * x[IdxXipD];
    D(IdxL2p, IdxBp) = -p.g_b * x[IdxXipD];
    D(IdxL2p, IdxApD) = -p.g_a * x[IdxXip];
    D(IdxL2p, IdxBpD) = -p.g_b * x[IdxXip];
    D(IdxL2p, IdxXip) = -u_pD;
    D(IdxL2p, IdxXipD) = -u_p;
    D(IdxL2m, IdxL2m) = gd;
    D(IdxL2m, IdxL2p) = p.gamma_c;
    D(IdxL2m, IdxAm) = -p.g_a * x[IdxXimD];
    D(IdxL2m, IdxBm) = -p.g_b * x[IdxXimD];
    D(IdxL2m, IdxAmD) = -p.g_a * x[IdxXim];
    D(IdxL2m, IdxBmD) = -p.g_b * x[IdxXim];
    D(IdxL2m, IdxXim) = -u_mD;
    D(IdxL2m, IdxXimD) = -u_m;

    return D;
}

Eigen::MatrixXcd build_diffusion(const SteadyState& s, const ModelParams& p,
                                 const DerivedRates& d,
                                 const DiffusionOptions& opts)
{
    Eigen::MatrixXcd Df = Eigen::MatrixXcd::Zero(kFullDim, kFullDim);

    // Field vacuum block: <f f^dag> pairs only, dichroic cross terms on the
    // opposite circular component.
    Df(IdxAp, IdxApD) = 2.0 * p.kappa_a;
    Df(IdxAp, IdxAmD) = 2.0 * p.kappa_ap;
    Df(IdxAm, IdxAmD) = 2.0 * p.kappa_a;
    Df(IdxAm, IdxApD) = 2.0 * p.kappa_ap;
    Df(IdxBp, IdxBpD) = 2.0 * p.kappa_b;
    Df(IdxBp, IdxBmD) = 2.0 * p.kappa_bp;
    Df(IdxBm, IdxBmD) = 2.0 * p.kappa_b;
    Df(IdxBm, IdxBpD) = 2.0 * p.kappa_bp;

    // Population noise: pump partition noise across all regions (scaled by
    // the regularity p), plus decay and spin-flip noise within each region.
    const double region_pump[3] = {d.R_1, d.R_2, d.R_3};
    const double pop_bar[6] = {s.M2_plus, s.M2_minus, s.N2_plus,
                               s.N2_minus, s.L2_plus, s.L2_minus};
    auto pop_region = [](int k) { return k / 2; };  // 0..5 -> region 0..2
    auto pop_spin_partner = [](int k) { return k ^ 1; };
    for (int i = 0; i < 6; ++i) {
        for (int j = 0; j < 6; ++j) {
            Complex val = 0.0;
            if (d.R_total > 0.0)
                val -= 0.5 * p.p * region_pump[pop_region(i)] *
                       region_pump[pop_region(j)] / d.R_total;
            if (i == j)
                val += region_pump[pop_region(i)] + p.gamma_2 * pop_bar[i] +
                       p.gamma_c * (pop_bar[i] + pop_bar[pop_spin_partner(i)]);
            else if (pop_region(i) == pop_region(j))
                val -= p.gamma_c * (pop_bar[i] + pop_bar[j]);
            Df(IdxM2p + i, IdxM2p + j) = val;
        }
    }

    // Polarization noise, normally ordered (<F^dag F> positions), sourced by
    // the same-region populations and pump.
    const Complex pol_bar[6] = {s.P_plus, s.P_minus, s.Q_plus,
                                s.Q_minus, s.Xi_plus, s.Xi_minus};
    for (int k = 0; k < 6; ++k) {
        const int reg = pop_region(k);
        const double own = pop_bar[k];
        const double opp = pop_bar[pop_spin_partner(k)];
        Df(IdxPpD + k, IdxPp + k) =
            (2.0 * p.gamma_perp - p.gamma_2 - p.gamma_c) * own +
            p.gamma_c * opp + region_pump[reg];
        if (opts.include_gamma1)
            Df(IdxPp + k, IdxPpD + k) =
                (2.0 * p.gamma_perp - p.gamma_1) * opts.Y1_bar;

        // Polarization-population cross noise and its Hermitian mirror.
        const int pop_same = IdxM2p + 2 * reg + (k % 2);
        const int pop_opp = IdxM2p + 2 * reg + 1 - (k % 2);
        Df(IdxPp + k, pop_same) = (p.gamma_2 + p.gamma_c) * pol_bar[k];
        Df(IdxPp + k, pop_opp) = -p.gamma_c * pol_bar[k];
        Df(pop_same, IdxPpD + k) =
            (p.gamma_2 + p.gamma_c) * std::conj(pol_bar[k]);
        Df(pop_opp, IdxPpD + k) = -p.gamma_c * std::conj(pol_bar[k]);
    }

    return Df;
}

Eigen::MatrixXcd spectral_source(const Eigen::MatrixXcd& diffusion)
{
    Eigen::MatrixXcd S = diffusion;
    S.topRows(8).setZero();
    S.leftCols(8).setZero();
    return S;
}

Eigen::MatrixXd reduction_basis(const ModelParams& p)
{
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(kFullDim, 16);
    const double r = 1.0 / std::sqrt(2.0);
    // Surviving spin combination per mode: minus component weighted by the
    // dichroism sign (the low-loss linear polarization of that mode).
    const double wa = p.s_a * r;
    const double wb = p.s_b * r;
    int c = 0;
    // field combinations and adjoints
    B(IdxAp, c) = r; B(IdxAm, c) = wa; ++c;
    B(IdxBm, c) = r; B(IdxBp, c) = wb; ++c;
    B(IdxApD, c) = r; B(IdxAmD, c) = wa; ++c;
    B(IdxBmD, c) = r; B(IdxBpD, c) = wb; ++c;
    // matching polarization combinations and adjoints
    B(IdxPp, c) = r; B(IdxPm, c) = wa; ++c;
    B(IdxQm, c) = r; B(IdxQp, c) = wb; ++c;
    B(IdxPpD, c) = r; B(IdxPmD, c) = wa; ++c;
    B(IdxQmD, c) = r; B(IdxQpD, c) = wb; ++c;
    // shared-region polarizations, both spins, and adjoints
    B(IdxXip, c) = 1.0; ++c;
    B(IdxXim, c) = 1.0; ++c;
    B(IdxXipD, c) = 1.0; ++c;
    B(IdxXimD, c) = 1.0; ++c;
    // spin-symmetric population combinations; both shared-region spins
    B(IdxM2p, c) = r; B(IdxM2m, c) = r; ++c;
    B(IdxN2p, c) = r; B(IdxN2m, c) = r; ++c;
    B(IdxL2p, c) = 1.0; ++c;
    B(IdxL2m, c) = 1.0; ++c;
    return B;
}

std::pair<Eigen::VectorXcd, Eigen::VectorXcd>
gauge_tangents(const SteadyState& s, const ModelParams& p)
{
    const Eigen::VectorXcd x = pack_state(s);
    Eigen::VectorXcd g1 = Eigen::VectorXcd::Zero(kFullDim);
    Eigen::VectorXcd g2 = Eigen::VectorXcd::Zero(kFullDim);

    // Global phase: every annihilation-like variable rotates together.
    for (int k = 0; k < 4; ++k) {
        g1[k] = kI * x[k];
        g1[k + 4] = -kI * x[k + 4];
    }
    for (int k = 8; k < 14; ++k) {
        g1[k] = kI * x[k];
        g1[k + 6] = -kI * x[k + 6];
    }

    // Relative phase: mode a rotates by +theta/2, mode b by -theta/2; the
    // shared-region polarization follows its source term.
    const Complex half = 0.5 * kI;
    g2[IdxAp] = half * x[IdxAp];
    g2[IdxAm] = half * x[IdxAm];
    g2[IdxBp] = -half * x[IdxBp];
    g2[IdxBm] = -half * x[IdxBm];
    g2[IdxPp] = half * x[IdxPp];
    g2[IdxPm] = half * x[IdxPm];
    g2[IdxQp] = -half * x[IdxQp];
    g2[IdxQm] = -half * x[IdxQm];
    const Complex den = p.gamma_perp + kI * p.nu;
    const double L2p = s.L2_plus, L2m = s.L2_minus;
    g2[IdxXip] =
        half * L2p * (p.g_a * s.a_plus - p.g_b * s.b_plus) / den;
    g2[IdxXim] =
        half * L2m * (p.g_a * s.a_minus - p.g_b * s.b_minus) / den;
    for (int k = 0; k < 4; ++k) g2[k + 4] = std::conj(g2[k]);
    for (int k = 8; k < 14; ++k) g2[k + 6] = std::conj(g2[k]);
    return {g1, g2};
}

StabilityReport check_stability(const Eigen::MatrixXcd& D_red,
                                const SteadyState& s, const ModelParams& p)
{
    StabilityReport rep;
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(D_red);
    if (es.info() != Eigen::Success)
        throw NumericalError("eigenvalue computation of the drift failed");
    rep.eigenvalues = es.eigenvalues();

    const double scale = rep.eigenvalues.cwiseAbs().maxCoeff();
    const double pos_tol = 1e-9 * scale;
    const double zero_tol = 1e-7 * scale;

    // Orthonormal basis of the reduced phase-family tangent span.
    const Eigen::MatrixXd B = reduction_basis(p);
    const auto [g1, g2] = gauge_tangents(s, p);
    Eigen::MatrixXcd T(D_red.rows(), 2);
    T.col(0) = B.transpose() * g1;
    T.col(1) = B.transpose() * g2;
    const double tnorm = T.norm();
    Eigen::MatrixXcd Q;
    if (tnorm > 1e-12) {
        Eigen::HouseholderQR<Eigen::MatrixXcd> qr(T);
        Q = qr.householderQ() * Eigen::MatrixXcd::Identity(T.rows(), 2);
    }

    double margin = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < rep.eigenvalues.size(); ++k) {
        const Complex lam = rep.eigenvalues[k];
        bool gauge = false;
        if (Q.size() > 0 && std::abs(lam) <= zero_tol) {
            const Eigen::VectorXcd w = es.eigenvectors().col(k).normalized();
            const double overlap = (Q.adjoint() * w).norm();
            if (overlap >= 0.98) gauge = true;
        }
        if (gauge) {
            rep.gauge_indices.push_back(k);
            continue;
        }
        margin = std::max(margin, lam.real());
    }
    rep.stability_margin = margin;
    rep.stable = margin <= pos_tol;
    return rep;
}

SpectrumProblem SpectrumProblem::prepare(const Eigen::MatrixXcd& D,
                                         const Eigen::MatrixXcd& Diff,
                                         const SteadyState& s,
                                         const ModelParams& p)
{
    SpectrumProblem sp;
    const Eigen::MatrixXd B = reduction_basis(p);
    sp.D_red_ = B.transpose() * D * B;
    sp.S_red_ = B.transpose() * spectral_source(Diff) * B;
    sp.stability_ = check_stability(sp.D_red_, s, p);
    if (!sp.stability_.stable) {
        std::ostringstream msg;
        msg << "drift matrix is unstable at this operating point: "
               "non-gauge eigenvalue with Re = "
            << sp.stability_.stability_margin;
        throw UnstableDriftError(msg.str());
    }

    // Measurement vectors: amplitude quadrature of each mode, adapted to the
    // stationary phases (v[k] = conj(mean_k)/(2 sqrt(I/2)) on the field
    // entries plus the mirrored adjoint entries).  This reduces to constant
    // +-1/2 weights in the real gauge and keeps the measured intensity
    // fluctuation aligned with the mean field under any phase convention,
    // so spectra are invariant under stationary phase flips.  A dark mode
    // has no mean field to beat against: its vector stays zero and the
    // normalized spectrum is exactly the shot-noise floor.
    Eigen::VectorXcd va = Eigen::VectorXcd::Zero(kFullDim);
    Eigen::VectorXcd vb = Eigen::VectorXcd::Zero(kFullDim);
    const double amp_a = std::sqrt(s.I_a / 2.0);
    const double amp_b = std::sqrt(s.I_b / 2.0);
    if (amp_a > 0.0) {
        const double den = 2.0 * amp_a;
        va[IdxAp] = std::conj(s.a_plus) / den;
        va[IdxAm] = std::conj(s.a_minus) / den;
        va[IdxApD] = s.a_plus / den;
        va[IdxAmD] = s.a_minus / den;
    }
    if (amp_b > 0.0) {
        const double den = 2.0 * amp_b;
        vb[IdxBp] = std::conj(s.b_plus) / den;
        vb[IdxBm] = std::conj(s.b_minus) / den;
        vb[IdxBpD] = s.b_plus / den;
        vb[IdxBmD] = s.b_minus / den;
    }
    sp.v_a_ = B.transpose() * va;
    sp.v_b_ = B.transpose() * vb;
    sp.kprime_a_ = p.kappa_a - p.kappa_ap;
    sp.kprime_b_ = p.kappa_b - p.kappa_bp;
    return sp;
}

SpectrumPoint SpectrumProblem::at(double Omega) const
{
    const int n = static_cast<int>(D_red_.rows());
    const Eigen::MatrixXcd Id = Eigen::MatrixXcd::Identity(n, n);
    // d_xy = v_x^T M(W) S M(-W)^T v_y with M(W) = (-iW - D)^{-1}: solve the
    // two transposed systems and sandwich the source.
    const Eigen::MatrixXcd A1t = (-kI * Omega * Id - D_red_).transpose();
    const Eigen::MatrixXcd A2t = (kI * Omega * Id - D_red_).transpose();
    Eigen::FullPivLU<Eigen::MatrixXcd> lu1(A1t), lu2(A2t);
    if (!lu1.isInvertible() || !lu2.isInvertible()) {
        std::ostringstream msg;
        msg << "resolvent singular at Omega = " << Omega;
        throw NumericalError(msg.str());
    }
    const Eigen::VectorXcd la = lu1.solve(v_a_);
    const Eigen::VectorXcd lb = lu1.solve(v_b_);
    const Eigen::VectorXcd ma = lu2.solve(v_a_);
    const Eigen::VectorXcd mb = lu2.solve(v_b_);

    SpectrumPoint pt;
    pt.Omega = Omega;
    pt.d_aa = la.transpose() * S_red_ * ma;
    pt.d_bb = lb.transpose() * S_red_ * mb;
    pt.d_ab = la.transpose() * S_red_ * mb;
    pt.C_aa = 1.0 + 4.0 * kprime_a_ * pt.d_aa.real();
    pt.C_bb = 1.0 + 4.0 * kprime_b_ * pt.d_bb.real();
    if (pt.C_aa <= 0.0 || pt.C_bb <= 0.0)
        throw NumericalError("non-positive photocurrent spectrum encountered; "
                             "linearized model out of its validity range");
    pt.C_ab = 4.0 * std::sqrt(kprime_a_ * kprime_b_) * pt.d_ab.real() /
              std::sqrt(pt.C_aa * pt.C_bb);
    return pt;
}

SpectrumPoint spectrum_at(double Omega, const Eigen::MatrixXcd& D,
                          const Eigen::MatrixXcd& Diff, const SteadyState& s,
                          const ModelParams& p)
{
    return SpectrumProblem::prepare(D, Diff, s, p).at(Omega);
}

std::vector<SpectrumPoint> sweep(const std::vector<double>& omega_grid,
                                 const SpectrumProblem& problem)
{
    if (omega_grid.empty()) throw ConfigError("frequency grid is empty");
    for (std::size_t i = 0; i < omega_grid.size(); ++i) {
        if (omega_grid[i] <= 0.0)
            throw ConfigError("frequency grid must be strictly positive");
        if (i > 0 && omega_grid[i] <= omega_grid[i - 1])
            throw ConfigError("frequency grid must be strictly increasing");
    }

    std::vector<SpectrumPoint> out(omega_grid.size());
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const unsigned workers =
        static_cast<unsigned>(std::min<std::size_t>(hw, omega_grid.size()));
    std::atomic<std::size_t> next{0};
    std::vector<std::future<void>> tasks;
    tasks.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        tasks.push_back(std::async(std::launch::async, [&]() {
            for (std::size_t i = next.fetch_add(1); i < omega_grid.size();
                 i = next.fetch_add(1))
                out[i] = problem.at(omega_grid[i]);
        }));
    }
    for (auto& t : tasks) t.get(); // rethrows worker exceptions
    return out;
}

std::vector<double> make_omega_grid(double omega_min, double omega_max, int n,
                                    bool logarithmic)
{
    if (n < 1) throw ConfigError("grid needs at least one point");
    if (omega_max < omega_min)
        throw ConfigError("omega_max must be >= omega_min");
    if (logarithmic && omega_min <= 0.0)
        throw ConfigError("logarithmic grid requires omega_min > 0");

    std::vector<double> grid(n);
    if (n == 1) {
        grid[0] = omega_min;
        return grid;
    }
    for (int i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / (n - 1);
        grid[i] = logarithmic
                      ? omega_min * std::pow(omega_max / omega_min, t)
                      : omega_min + t * (omega_max - omega_min);
    }
    return grid;
}

} // namespace lasernoise
