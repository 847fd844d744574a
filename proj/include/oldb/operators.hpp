#ifndef OLDB_OPERATORS_HPP
#define OLDB_OPERATORS_HPP

#include "oldb/field.hpp"

namespace oldb {

/// Fourier multiplier |k|^alpha. alpha == 0 is the identity. For alpha != 0
/// the k=0 coefficient is set to zero; a negative alpha additionally requires
/// the input to be mean-free.
SpectralField lambda_power(const SpectralField& f, Real alpha);

/// Leray projection P = I - grad laplace^-1 div, mode-wise v - k (k.v)/|k|^2.
/// The k=0 component passes through unchanged.
SpectralField leray_project(const SpectralField& v);

/// Gamma = Lambda^-1 P div tau, the solenoidal part of the stress divergence.
SpectralField gamma_from_tau(const SpectralField& tau);

SpectralField gradient(const SpectralField& f);            // scalar -> vector
SpectralField jacobian(const SpectralField& u);            // vector -> tensor, (i,j) = d_j u_i
SpectralField divergence(const SpectralField& f);          // vector -> scalar, sym tensor -> vector
SpectralField sym_grad(const SpectralField& u);            // D(u) = (grad u + grad u^T)/2
SpectralField skew_grad(const SpectralField& u);           // Omega(u) = (grad u - grad u^T)/2

/// Zero every coefficient whose index exceeds dealias_fraction * N/2 on any axis.
SpectralField dealias(const SpectralField& f);
void dealias_in_place(SpectralField& f);

// Lattice norms. Spectral (Parseval) forms take the field in Fourier space;
// lattice forms take physical values and use midpoint quadrature.
Real l2_norm(const SpectralField& f);
Real h1_seminorm_sq(const SpectralField& f);               // sum |k|^2 |c|^2 * L^n
Real lattice_lp_norm(std::span<const ArrayXr> values, const Grid& grid, Rank rank, Real p);
/// || Lambda^alpha f ||_{L^q}; q = 2 is evaluated spectrally, otherwise by
/// inverse transform and midpoint quadrature (q may be infinity).
Real lambda_lq_norm(const SpectralField& f, Real alpha, Real q);

/// max_k |k . u(k)|, the spectral divergence residual of a vector field.
Real divergence_residual(const SpectralField& u);
/// max over modes and components of |c(k) - conj(c(-k))|.
Real reality_residual(const SpectralField& f);

/// Pointwise squared magnitude of physical values; symmetric tensors count
/// off-diagonal entries twice (Frobenius norm of the full matrix).
ArrayXr magnitude_squared(std::span<const ArrayXr> values, Rank rank, int dim);

}  // namespace oldb

#endif
