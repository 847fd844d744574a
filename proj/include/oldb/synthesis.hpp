#ifndef OLDB_SYNTHESIS_HPP
#define OLDB_SYNTHESIS_HPP

#include <cstdint>

#include "oldb/field.hpp"

namespace oldb {

/// Random-phase unit-amplitude scalar field supported on k_lo <= |k| <= k_hi.
/// Deterministic in (seed, mode) and independent of the grid resolution, so
/// the same field can be synthesized on refinements of the lattice.
SpectralField random_band_scalar(const Grid& grid, Real k_lo, Real k_hi, std::uint64_t seed);

/// Divergence-free counterpart with random solenoidal polarization.
SpectralField random_band_solenoidal(const Grid& grid, Real k_lo, Real k_hi, std::uint64_t seed);

}  // namespace oldb

#endif
