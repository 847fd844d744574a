#ifndef OLDB_SEMIGROUP_HPP
#define OLDB_SEMIGROUP_HPP

#include <complex>
#include <vector>

#include <Eigen/Core>

#include "oldb/field.hpp"

namespace oldb {

/// Linearized per-frequency dynamics of the pair w = (u, Gamma) at radial
/// wavenumber r: dw/dt = A(r) w with A(r) = [[-r^2, r], [-c r, 0]].
/// c = 1/2 (half_coupling, the self-consistent choice: div D(u) = Laplace(u)/2
/// for solenoidal u) gives the damped wave equation
/// W_tt - Laplace(W_t) - Laplace(W)/2 = 0; c = 1 mirrors the unhalved
/// convention, kept switchable for comparison.
Eigen::Matrix2d symbol_matrix(Real r, bool half_coupling = true);

enum class SpectralRegime { Oscillatory, Degenerate, Overdamped };

struct EigenBranches {
    Complex lambda_plus;
    Complex lambda_minus;
    SpectralRegime regime;
};

/// Eigenvalues of A(r). Oscillatory for 0 < r < 2*sqrt(c) (Re = -r^2/2),
/// degenerate at r = 2*sqrt(c), overdamped beyond with lambda_plus -> -c as
/// r -> infinity. The overdamped small root is computed cancellation-free and
/// the large root via the product identity lambda+ lambda- = c r^2.
EigenBranches eigen_branches(Real r, bool half_coupling = true);

/// Closed-form exp(t A(r)), branch-uniform: exp(mu t) [C I + S t (A - mu I)]
/// with mu = -r^2/2 and C, S the cos/cosh pair evaluated through stable
/// expm1/sinc forms (series near the degenerate root).
Eigen::Matrix2d semigroup_matrix(Real r, Real t, bool half_coupling = true);

struct Mode2 {
    Complex u;
    Complex gamma;
};

Mode2 semigroup_apply(Real r, Real t, const Mode2& state0, bool half_coupling = true);

/// Radial initial datum u0(xi) = amplitude * |xi|^theta on |xi| <= r_cut,
/// optionally with a Gamma component of the same shape.
struct RadialProfile {
    Real theta;
    Real r_cut;
    Real amplitude;
    int dim;
    Real gamma_amplitude = 0.0;

    RadialProfile(Real theta, Real r_cut, Real amplitude, int dim, Real gamma_amplitude = 0.0);
};

struct DecayCurvePoint {
    Real t;
    Real value;
    Real error_estimate;
};

/// || Lambda^alpha W(t) ||_{L^2(R^n)} of the evolved profile, by adaptive
/// radial quadrature (Gaussian substitution x = r sqrt(1+t) on the
/// oscillatory band). Requires alpha + theta + n/2 > 0 for integrability.
std::vector<DecayCurvePoint> l2_decay_curve(const RadialProfile& profile, Real alpha,
                                            std::span<const Real> times,
                                            bool half_coupling = true, Real rel_tol = 1e-10);

struct DecayPrediction {
    int n;
    Real s;
    Real alpha;
    Real q;
    Real p;
    Real rate;
};

/// n/4 + ((alpha+s)q - n)/(2q), with the q = infinity limit n/4 + (alpha+s)/2.
/// No admissibility checks; see predicted_rate for the validated form.
Real decay_rate_formula(int n, Real s, Real alpha, Real q);

/// Validated reference decay exponent. Throws std::invalid_argument naming
/// the violated constraint when (n, s, alpha, q, p) leave the admissible
/// window.
DecayPrediction predicted_rate(int n, Real s, Real alpha, Real q, Real p = 2.0);

}  // namespace oldb

#endif
