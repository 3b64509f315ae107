#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "lasernoise/basis.hpp"
#include "lasernoise/params.hpp"
#include "lasernoise/steady.hpp"

namespace lasernoise {

// Analytic linearization of collective_rhs around the steady state: the
// 26x26 complex drift matrix in the BasisIndex ordering.  Block structure:
// field rows couple to fields (decay + dichroic cross coupling) and to the
// same-spin polarizations; polarization rows couple to fields and population
// differences; population rows couple to fields and polarizations through
// the stimulated-exchange terms and to each other through spin flips.
Eigen::MatrixXcd build_drift(const SteadyState& s, const ModelParams& p,
                             const DerivedRates& d);

// Optional noise contributions that are dropped by default.
struct DiffusionOptions {
    // Re-enable the lower-level (gamma_1-proportional) polarization noise
    // with a user-supplied stationary lower-level population estimate.  The
    // default pipeline eliminates the lower level and sets this to zero.
    bool include_gamma1 = false;
    double Y1_bar = 0.0;
};

// Ordered two-time noise correlators <Z_i(t) Z_j(tau)> = Diff[i][j] delta:
// field vacuum block (2 kappa_x on <f f^dag>, 2 kappa_xp on the dichroic
// cross pairs), pump partition noise across regions (scaled by the pump
// regularity p), population decay and spin-flip noise, normally ordered
// polarization noise, and polarization-population cross noise; Hermitian
// closure <B^dag A^dag> = conj<A B> applied to every listed entry.
Eigen::MatrixXcd build_diffusion(const SteadyState& s, const ModelParams& p,
                                 const DerivedRates& d,
                                 const DiffusionOptions& opts = {});

// Source matrix actually entering the photocurrent spectra: the diffusion
// matrix with the field-vacuum block removed (rows and columns 0..7 zeroed).
// The detection normalization C = 1 + 4 kappa' Re d already accounts for
// vacuum shot noise through the explicit "1"; keeping the field block in the
// spectral source would double-count vacuum (an empty cavity would show
// C > 1, and far-below-threshold spectra would not be flat).
Eigen::MatrixXcd spectral_source(const Eigen::MatrixXcd& diffusion);

// Orthonormal 26x16 basis of the dynamically relevant subspace at a
// linearly polarized operating point: the surviving spin combination of
// each field/polarization sector (fixed by the dichroism signs: e.g.
// (e0 + s_a e1)/sqrt(2) for mode a), both shared-region polarizations,
// and the spin-symmetric population combinations.  The complementary spin
// combinations host the static polarization-pattern instability of the
// shared-gain model and are not excited by the measured quadratures;
// spectra are evaluated on this subspace (see README).
Eigen::MatrixXd reduction_basis(const ModelParams& p);

// Tangent vectors of the two-parameter stationary phase family (global and
// relative optical phase) at the steady state, in full 26-dim coordinates.
// These span the exact zero modes of the reduced drift above threshold.
std::pair<Eigen::VectorXcd, Eigen::VectorXcd>
gauge_tangents(const SteadyState& s, const ModelParams& p);

struct StabilityReport {
    Eigen::VectorXcd eigenvalues;     // of the reduced drift
    std::vector<int> gauge_indices;   // eigenvalues identified as phase modes
    double stability_margin = 0.0;    // max Re eigenvalue excluding gauge
    bool stable = false;
};

// Eigenvalue gate for the reduced drift: every eigenvalue must have a
// negative real part except the (up to two) zero modes whose eigenvectors
// lie in the span of the phase-family tangents.  A literal "all real parts
// negative" gate is unsatisfiable for any free-running laser (the optical
// phases are marginal), so the gauge modes are exempted explicitly.
StabilityReport check_stability(const Eigen::MatrixXcd& D_red,
                                const SteadyState& s, const ModelParams& p);

struct SpectrumPoint {
    double Omega = 0.0;
    double C_aa = 0.0, C_bb = 0.0, C_ab = 0.0;
    Complex d_aa{}, d_bb{}, d_ab{};
};

// A prepared spectrum evaluation: reduced drift and source, measurement
// vectors, loss rates, and the stability report.  Evaluation at a frequency
// is a pure const method, safe to call concurrently.
class SpectrumProblem {
  public:
    // Builds the reduced system from full matrices and gates on stability
    // (throws UnstableDriftError naming the offending eigenvalue).
    static SpectrumProblem prepare(const Eigen::MatrixXcd& D,
                                   const Eigen::MatrixXcd& Diff,
                                   const SteadyState& s, const ModelParams& p);

    SpectrumPoint at(double Omega) const;

    const Eigen::MatrixXcd& reduced_drift() const { return D_red_; }
    const Eigen::MatrixXcd& reduced_source() const { return S_red_; }
    const StabilityReport& stability() const { return stability_; }
    const Eigen::VectorXcd& v_a() const { return v_a_; }
    const Eigen::VectorXcd& v_b() const { return v_b_; }

  private:
    Eigen::MatrixXcd D_red_, S_red_;
    Eigen::VectorXcd v_a_, v_b_;
    double kprime_a_ = 0.0, kprime_b_ = 0.0;
    StabilityReport stability_;
};

// One-shot evaluation (prepares internally; prefer SpectrumProblem for
// sweeps).  The measurement vector of each mode projects onto its amplitude
// quadrature: v_x[field k] = conj(mean_k) / (2 sqrt(I_x/2)) plus the mirrored
// adjoint entries, which reduces to (e0+e1+e4+e5)/2 for mode a in the real
// gauge and makes the result invariant under stationary phase flips.
SpectrumPoint spectrum_at(double Omega, const Eigen::MatrixXcd& D,
                          const Eigen::MatrixXcd& Diff, const SteadyState& s,
                          const ModelParams& p);

// Evaluates the prepared problem over a strictly increasing positive grid.
// Points are independent and dispatched to a thread pool; output order
// follows the grid.
std::vector<SpectrumPoint> sweep(const std::vector<double>& omega_grid,
                                 const SpectrumProblem& problem);

// Logarithmic or linear frequency grid with n points (n >= 1).
std::vector<double> make_omega_grid(double omega_min, double omega_max, int n,
                                    bool logarithmic);

} // namespace lasernoise
