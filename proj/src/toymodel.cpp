#include "lasernoise/toymodel.hpp"

#include <cmath>
#include <future>
#include <sstream>

namespace lasernoise {

namespace {

constexpr ToyComplex kI{0.0, 1.0};

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& X, const Eigen::MatrixXcd& Y)
{
    Eigen::MatrixXcd out(X.rows() * Y.rows(), X.cols() * Y.cols());
    for (Eigen::Index i = 0; i < X.rows(); ++i)
        for (Eigen::Index j = 0; j < X.cols(); ++j)
            out.block(i * Y.rows(), j * Y.cols(), Y.rows(), Y.cols()) =
                X(i, j) * Y;
    return out;
}

// tr(X * rho) without forming the product.
ToyComplex trace_prod(const Eigen::MatrixXcd& X, const Eigen::MatrixXcd& rho)
{
    return (X.transpose().cwiseProduct(rho)).sum();
}

void validate_config(const ToyConfig& c)
{
    if (c.fock_cutoff < 2)
        throw ConfigError("toy model needs fock_cutoff >= 2");
    if (c.g < 0.0 || c.gamma_perp <= 0.0 || c.gamma_2 < 0.0)
        throw ConfigError("toy model rates must be non-negative "
                          "(gamma_perp strictly positive)");
    const double amp2 = std::max(std::norm(c.alpha_a), std::norm(c.alpha_b));
    if (c.fock_cutoff < 4.0 * amp2)
        throw ConfigError("fock_cutoff too small for the requested coherent "
                          "amplitude (need N >= 4*max |alpha|^2)");
}

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double rms_residual = 0.0;
};

LinearFit fit_line(const std::vector<double>& t, const std::vector<double>& y)
{
    const std::size_t n = t.size();
    LinearFit f;
    if (n < 2) return f;
    double st = 0, sy = 0, stt = 0, sty = 0;
    for (std::size_t i = 0; i < n; ++i) {
        st += t[i];
        sy += y[i];
        stt += t[i] * t[i];
        sty += t[i] * y[i];
    }
    const double den = n * stt - st * st;
    if (den == 0.0) return f;
    f.slope = (n * sty - st * sy) / den;
    f.intercept = (sy - f.slope * st) / n;
    double ss = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - (f.intercept + f.slope * t[i]);
        ss += r * r;
    }
    f.rms_residual = std::sqrt(ss / n);
    return f;
}

} // namespace

ToyOperators build_toy_operators(const ToyConfig& config)
{
    const int nf = config.fock_cutoff + 1;
    Eigen::MatrixXcd a1 = Eigen::MatrixXcd::Zero(nf, nf);
    for (int n = 1; n < nf; ++n) a1(n - 1, n) = std::sqrt(double(n));
    const Eigen::MatrixXcd idf = Eigen::MatrixXcd::Identity(nf, nf);
    const Eigen::MatrixXcd ide = Eigen::MatrixXcd::Identity(2, 2);

    Eigen::MatrixXcd sm = Eigen::MatrixXcd::Zero(2, 2);
    sm(0, 1) = 1.0; // |lower><upper|
    Eigen::MatrixXcd sz = Eigen::MatrixXcd::Zero(2, 2);
    sz(0, 0) = -1.0;
    sz(1, 1) = 1.0;

    ToyOperators ops;
    ops.A = kron(ide, kron(a1, idf));
    ops.B = kron(ide, kron(idf, a1));
    ops.Sm = kron(sm, kron(idf, idf));
    ops.Sz = kron(sz, kron(idf, idf));
    const Eigen::MatrixXcd ab = ops.A + ops.B;
    ops.H = config.g * (ops.Sm.adjoint() * ab + ab.adjoint() * ops.Sm);
    return ops;
}

DensityState initial_state(const ToyConfig& config)
{
    validate_config(config);
    const int nf = config.fock_cutoff + 1;

    auto coherent = [&](ToyComplex alpha) {
        Eigen::VectorXcd v(nf);
        v[0] = 1.0;
        for (int n = 1; n < nf; ++n)
            v[n] = v[n - 1] * alpha / std::sqrt(double(n));
        return v;
    };
    const Eigen::VectorXcd ca = coherent(config.alpha_a);
    const Eigen::VectorXcd cb = coherent(config.alpha_b);
    Eigen::VectorXcd emitter = Eigen::VectorXcd::Zero(2);
    emitter[config.emitter_excited ? 1 : 0] = 1.0;

    const int dim = 2 * nf * nf;
    Eigen::VectorXcd psi(dim);
    for (int e = 0; e < 2; ++e)
        for (int na = 0; na < nf; ++na)
            for (int nb = 0; nb < nf; ++nb)
                psi[e * nf * nf + na * nf + nb] = emitter[e] * ca[na] * cb[nb];
    psi.normalize();

    DensityState st;
    st.rho = psi * psi.adjoint();
    st.t = 0.0;
    return st;
}

Eigen::MatrixXcd lindblad_rhs(const Eigen::MatrixXcd& rho,
                              const ToyConfig& config,
                              const ToyOperators& ops)
{
    const Eigen::Index dim = rho.rows();
    const Eigen::Index m = dim / 2;

    // -i[H, rho], assembled so the Hermitian part is preserved exactly.
    const Eigen::MatrixXcd hr = ops.H * rho;
    Eigen::MatrixXcd out = -kI * (hr - hr.adjoint());

    // gamma_perp * L(sigma_z): sigma_z rho sigma_z is an elementwise sign
    // mask between the emitter blocks; sigma_z^2 = 1.
    const Eigen::VectorXd zdiag = ops.Sz.diagonal().real();
    out.noalias() += (2.0 * config.gamma_perp) *
                     ((zdiag * zdiag.transpose()).cast<ToyComplex>()
                          .cwiseProduct(rho) -
                      rho);

    // gamma_2 * L(sigma_-): sigma_- rho sigma_+ copies the upper-upper block
    // into the lower-lower block; sigma_+ sigma_- projects onto the upper
    // emitter level.
    out.topLeftCorner(m, m) +=
        2.0 * config.gamma_2 * rho.bottomRightCorner(m, m);
    out.bottomRows(m) -= config.gamma_2 * rho.bottomRows(m);
    out.rightCols(m) -= config.gamma_2 * rho.rightCols(m);
    return out;
}

Eigen::MatrixXcd lindblad_rhs(const Eigen::MatrixXcd& rho,
                              const ToyConfig& config)
{
    return lindblad_rhs(rho, config, build_toy_operators(config));
}

DensityState evolve(DensityState state, const ToyConfig& config,
                    double t_final, double dt, ToyTrajectory* record)
{
    validate_config(config);
    const double dt_max =
        0.05 / std::max({config.gamma_perp, config.gamma_2,
                         config.g * std::sqrt(double(config.fock_cutoff))});
    if (dt <= 0.0 || dt > dt_max) {
        std::ostringstream msg;
        msg << "toy integrator step " << dt << " exceeds stability bound "
            << dt_max;
        throw ConfigError(msg.str());
    }

    const ToyOperators ops = build_toy_operators(config);
    const int nf = config.fock_cutoff + 1;
    const Eigen::MatrixXcd n_total_op =
        (ops.A + ops.B).adjoint() * (ops.A + ops.B);

    const long long nsteps = std::llround((t_final - state.t) / dt);
    const long long steps_per_record = std::max(
        1LL, std::llround(config.record_interval / dt));

    bool leak_warned = false;
    auto sample_now = [&](DensityState& st) {
        ToySample s;
        s.t = st.t;
        s.a_mean = trace_prod(ops.A, st.rho);
        s.b_mean = trace_prod(ops.B, st.rho);
        s.sym_mean = (s.a_mean + s.b_mean) / std::sqrt(2.0);
        s.n_total = trace_prod(n_total_op, st.rho).real();
        s.trace_dev = std::abs(st.rho.trace() - ToyComplex(1.0, 0.0));
        s.herm_dev = (st.rho - st.rho.adjoint()).cwiseAbs().maxCoeff();

        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(
            0.5 * (st.rho + st.rho.adjoint()), Eigen::EigenvaluesOnly);
        s.min_eigenvalue = es.eigenvalues().minCoeff();
        if (s.min_eigenvalue < -1e-8) {
            std::ostringstream msg;
            msg << "density matrix lost positivity at t = " << st.t
                << " (min eigenvalue " << s.min_eigenvalue << ")";
            throw NumericalError(msg.str());
        }

        double leak = 0.0;
        for (int e = 0; e < 2; ++e)
            for (int na = 0; na < nf; ++na)
                for (int nb = 0; nb < nf; ++nb)
                    if (na == nf - 1 || nb == nf - 1) {
                        const int idx = e * nf * nf + na * nf + nb;
                        leak += st.rho(idx, idx).real();
                    }
        s.top_layer_pop = leak;
        if (record) {
            if (leak > 1e-6 && !leak_warned) {
                std::ostringstream msg;
                msg << "Fock-cutoff leakage " << leak << " at t = " << st.t
                    << " exceeds 1e-6; increase fock_cutoff";
                record->warnings.push_back(msg.str());
                leak_warned = true;
            }
            record->samples.push_back(s);
        }
    };

    sample_now(state);

    Eigen::MatrixXcd k1, k2, k3, k4;
    for (long long step = 0; step < nsteps; ++step) {
        k1 = lindblad_rhs(state.rho, config, ops);
        k2 = lindblad_rhs(state.rho + (0.5 * dt) * k1, config, ops);
        k3 = lindblad_rhs(state.rho + (0.5 * dt) * k2, config, ops);
        k4 = lindblad_rhs(state.rho + dt * k3, config, ops);
        state.rho += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        state.t += dt;

        const double trace_dev =
            std::abs(state.rho.trace() - ToyComplex(1.0, 0.0));
        if (trace_dev > 1e-8) {
            std::ostringstream msg;
            msg << "trace drift " << trace_dev << " at t = " << state.t
                << " exceeds 1e-8";
            throw NumericalError(msg.str());
        }
        const double herm_dev =
            (state.rho - state.rho.adjoint()).cwiseAbs().maxCoeff();
        if (herm_dev > 1e-10) {
            std::ostringstream msg;
            msg << "Hermiticity drift " << herm_dev << " at t = " << state.t
                << " exceeds 1e-10";
            throw NumericalError(msg.str());
        }

        if ((step + 1) % steps_per_record == 0 || step + 1 == nsteps)
            sample_now(state);
    }
    return state;
}

ToyExtraction extract_effective_coefficients(const ToyConfig& base)
{
    validate_config(base);
    if (base.g > 0.02 * base.gamma_perp)
        throw ConfigError("coefficient extraction requires the adiabatic "
                          "regime g <= 0.02*gamma_perp");
    if (!base.emitter_excited)
        throw ConfigError("coefficient extraction starts from the excited "
                          "emitter");
    if (base.gamma_2 <= 0.0)
        throw ConfigError("coefficient extraction needs gamma_2 > 0 for a "
                          "finite transient");

    ToyExtraction ex;
    ex.dispersive_analytic = 2.0 * base.g * base.g / base.gamma_perp;
    ex.kerr_analytic = 4.0 * std::pow(base.g, 4) / std::pow(base.gamma_perp, 3);
    ex.sym_decay_analytic =
        2.0 * base.g * base.g / (4.0 * base.gamma_perp + base.gamma_2);
    if (base.g == 0.0) return ex; // decoupled modes: all coefficients zero

    const double transient = 5.0 / base.gamma_2;
    const double amp_scales[2] = {1.0, 1.75};

    auto run_one = [&](double scale) {
        ToyConfig cfg = base;
        cfg.alpha_a = base.alpha_a * scale;
        cfg.alpha_b = base.alpha_b * scale;
        ToyTrajectory traj;
        evolve(initial_state(cfg), cfg, cfg.t_final, cfg.dt, &traj);

        std::vector<double> ts, phases, logsym, ns;
        double prev_phase = 0.0;
        bool first = true;
        for (const ToySample& s : traj.samples) {
            if (s.t < transient) continue;
            double ph = std::arg(s.a_mean);
            if (!first) { // unwrap against the previous sample
                while (ph - prev_phase > M_PI) ph -= 2.0 * M_PI;
                while (ph - prev_phase < -M_PI) ph += 2.0 * M_PI;
            }
            first = false;
            prev_phase = ph;
            ts.push_back(s.t);
            phases.push_back(ph);
            ns.push_back(s.n_total);
            logsym.push_back(std::log(std::max(std::abs(s.sym_mean), 1e-300)));
        }
        ToyRunFit fit;
        fit.alpha = std::abs(cfg.alpha_a);
        const LinearFit pf = fit_line(ts, phases);
        fit.phase_rate = pf.slope;
        fit.phase_fit_residual = pf.rms_residual;
        double nsum = 0.0;
        for (double v : ns) nsum += v;
        fit.n_mean = ns.empty() ? 0.0 : nsum / ns.size();
        fit.sym_decay_rate = -fit_line(ts, logsym).slope;
        return std::make_pair(fit, traj.warnings);
    };

    auto fut = std::async(std::launch::async, run_one, amp_scales[1]);
    auto [fit0, warn0] = run_one(amp_scales[0]);
    auto [fit1, warn1] = fut.get();
    ex.runs = {fit0, fit1};
    ex.warnings = warn0;
    ex.warnings.insert(ex.warnings.end(), warn1.begin(), warn1.end());

    // Phase rate vs photon number: intercept -> dispersive, slope -> Kerr.
    const double dn = fit1.n_mean - fit0.n_mean;
    if (std::abs(dn) < 1e-12) {
        ex.inconclusive = true;
        ex.warnings.push_back("photon numbers of the two runs coincide; "
                              "Kerr slope undetermined");
        return ex;
    }
    const double slope = (fit1.phase_rate - fit0.phase_rate) / dn;
    const double intercept = fit0.phase_rate - slope * fit0.n_mean;
    ex.dispersive_fitted = std::abs(intercept);
    ex.kerr_fitted = std::abs(slope);
    ex.sym_decay_fitted = 0.5 * (fit0.sym_decay_rate + fit1.sym_decay_rate);
    if (fit0.phase_fit_residual > 1e-3 || fit1.phase_fit_residual > 1e-3) {
        ex.inconclusive = true;
        ex.warnings.push_back("phase-drift fit residual above 1e-3 rad; "
                              "coefficients inconclusive");
    }
    return ex;
}

} // namespace lasernoise
