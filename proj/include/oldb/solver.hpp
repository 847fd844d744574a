#ifndef OLDB_SOLVER_HPP
#define OLDB_SOLVER_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "oldb/field.hpp"
#include "oldb/littlewood_paley.hpp"

namespace oldb {

/// Velocity-stress pair at one time instant. u is mean-free and
/// divergence-free, tau mean-free with structural symmetry; both maintain
/// conjugate symmetry. b is the slip parameter of the bilinear stress term.
struct SolverState {
    Real t = 0;
    Real b = 0;
    SpectralField u;
    SpectralField tau;

    SolverState(const Grid& grid, Real b = 0);
    const Grid& grid() const { return u.grid(); }
};

struct StepControl {
    Real dt;
    Real cfl = 0.5;
    int order = 3;  // 2 or 3
    bool dealias = true;
};

class BlowupError : public std::runtime_error {
  public:
    explicit BlowupError(Real last_good_time);
    Real last_good_time() const { return t_; }

  private:
    Real t_;
};

/// F(tau, grad u) = tau Omega(u) - Omega(u) tau + b (D(u) tau + tau D(u)),
/// evaluated pointwise in physical space from dealiased inputs and
/// re-dealiased. The result is symmetric by construction.
SpectralField nonlinear_F(const SpectralField& tau, const SpectralField& u, Real b);

struct Rhs {
    SpectralField du;
    SpectralField dtau;
};

/// Nonstiff right-hand side: du = P(-u.grad u + div tau),
/// dtau = -u.grad tau - F(tau, grad u) + D(u). The viscous term is handled
/// by the integrating factor inside step(), not here.
Rhs rhs(const SolverState& state);

/// Advance by control.dt with an integrating-factor Runge-Kutta scheme
/// (exact exp(-|k|^2 h) viscous factor, explicit transport/coupling).
/// Substeps internally when the CFL bound requires a smaller h. Re-projects
/// u, restores conjugate symmetry and mean-freeness after every substep.
/// Throws BlowupError on non-finite coefficients.
SolverState step(const SolverState& state, const StepControl& control);

struct DiagnosticsSpec {
    std::vector<std::pair<Real, Real>> alpha_q;  // (alpha, q) norm requests
    Real s = 0.75;   // index of the B^{-s}_{2,1} monitor
    Real p = 2.0;    // high-frequency integrability index
};

struct DiagnosticsRecord {
    Real t = 0;
    Real energy = 0;            // (||u||^2 + ||tau||^2)/2
    Real dissipation = 0;       // ||grad u||^2
    Real div_residual = 0;      // max |k.u| / coefficient norm of u
    Real sym_residual = 0;      // conjugate-symmetry residual
    std::vector<Real> u_norms;      // ||Lambda^a u||_{L^q} per requested pair
    std::vector<Real> gamma_norms;  // ||Lambda^a Gamma||_{L^q}
    Real besov_low = 0;         // ||(u,Gamma)||^l in B^{n/2-1}_{2,1}
    Real besov_high_u = 0;      // ||u||^h in B^{n/p-1}_{p,1}
    Real besov_high_gamma = 0;  // ||Gamma||^h in B^{n/p}_{p,1}
    Real besov_negs = 0;        // ||(u,tau)|| in B^{-s}_{2,1}
};

DiagnosticsRecord diagnostics(const SolverState& state, const DiagnosticsSpec& spec,
                              const DyadicPartition& part);

/// Solenoidal random-phase datum with spectral profile amplitude * |k|^theta
/// on 0 < |k| <= r_cut. tau_factor > 0 adds a stress whose solenoidal
/// divergence part Gamma has the same profile scaled by tau_factor, with
/// phases independent of u. Fully deterministic in (seed, mode), independent
/// of grid resolution.
struct InitialDataParams {
    Real amplitude = 1e-3;
    Real theta = -0.25;
    Real r_cut = 1.0;
    Real tau_factor = 0.0;
    std::uint64_t seed = 1;
};

SolverState make_decay_initial_data(const Grid& grid, const InitialDataParams& params, Real b);

/// Smallness functional ||(u,tau)||^l_{B^{n/2-1}_{2,1}} + ||u||^h_{B^{n/p-1}_{p,1}}
/// + ||tau||^h_{B^{n/p}_{p,1}} of the current state.
Real smallness_x0(const SolverState& state, const DyadicPartition& part, Real p);

/// Energy functional ||(u,Gamma)||^l_{B^{n/2-1}_{2,1}} + ||u||^h_{B^{n/p-1}_{p,1}}
/// + ||Gamma||^h_{B^{n/p}_{p,1}} whose decay the runs monitor.
Real lyapunov_functional(const SolverState& state, const DyadicPartition& part, Real p);

/// Pressure reconstruction for output: solves -Lap p = div(u.grad u - div tau).
SpectralField pressure_field(const SolverState& state);

// Checkpoint file: "OLDB", u32 version, u32 n, u32 N, f64 L, f64 t, f64 b,
// then per component (u_1..u_n, upper-triangular tau in row-major order) the
// complex coefficients as little-endian (re, im) f64 pairs in row-major
// lattice order.
void save_checkpoint(const std::string& path, const SolverState& state);
SolverState load_checkpoint(const std::string& path);

}  // namespace oldb

#endif
