#ifndef OLDB_FIELD_HPP
#define OLDB_FIELD_HPP

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace oldb {

using Real = double;
using Complex = std::complex<Real>;
using ArrayXr = Eigen::ArrayXd;
using ArrayXc = Eigen::ArrayXcd;
using ArrayXi = Eigen::ArrayXi;

inline constexpr Real pi = 3.14159265358979323846;

/// Periodic box [0,L)^n sampled on N points per axis. Wavenumber of lattice
/// index m along an axis is k = (2*pi/L) * m' with m' the symmetric integer
/// (m' = m for m <= N/2, m - N otherwise).
struct Grid {
    int dim;
    int points;
    Real length;
    Real dealias_fraction;

    Grid(int n, int N, Real L, Real dealias = 2.0 / 3.0);

    std::size_t size() const;                // N^n lattice sites
    Real dk() const { return 2.0 * pi * (1.0 / length); }
    Real cell_volume() const;                // (L/N)^n
    int symmetric_index(int m) const;        // m -> m' in [-N/2, N/2)

    bool operator==(const Grid& o) const {
        return dim == o.dim && points == o.points && length == o.length &&
               dealias_fraction == o.dealias_fraction;
    }
};

/// Precomputed per-lattice-site wavenumber data, cached per grid.
struct GridTables {
    std::vector<ArrayXr> kcomp;  // k_a at each site, a < dim
    ArrayXr ksq;                 // |k|^2
    ArrayXr kabs;                // |k|
    ArrayXr inv_ksq;             // 1/|k|^2, zero at k=0
    ArrayXr inv_kabs;            // 1/|k|, zero at k=0
    ArrayXr dealias_mask;        // 1 if |m'_a| <= fraction*N/2 on every axis
    Eigen::ArrayXi conj_index;   // flat index of -k
};

const GridTables& tables(const Grid& grid);

enum class Rank { Scalar, Vector, SymTensor, Tensor };

int component_count(Rank rank, int dim);
/// Upper-triangle flat index of a symmetric tensor entry, i <= j.
int sym_index(int i, int j, int dim);
/// Quadrature weight of a stored component (2 for off-diagonal sym entries).
Real component_weight(Rank rank, int comp, int dim);

/// Complex Fourier coefficients of a real field on a periodic lattice.
/// Symmetric tensors store the upper triangle only, so tau_ij = tau_ji holds
/// structurally. Conjugate symmetry c(-k) = conj(c(k)) is the reality
/// invariant; enforce_reality() restores it after round-off.
class SpectralField {
  public:
    SpectralField(const Grid& grid, Rank rank);

    const Grid& grid() const { return grid_; }
    Rank rank() const { return rank_; }
    int components() const { return static_cast<int>(comp_.size()); }

    ArrayXc& comp(int c) { return comp_[c]; }
    const ArrayXc& comp(int c) const { return comp_[c]; }
    ArrayXc& sym(int i, int j) { return comp_[sym_index(i, j, grid_.dim)]; }
    const ArrayXc& sym(int i, int j) const { return comp_[sym_index(i, j, grid_.dim)]; }

    bool all_finite() const;

  private:
    Grid grid_;
    Rank rank_;
    std::vector<ArrayXc> comp_;
};

// Transforms. Forward scales by N^-n so coefficients are the trigonometric
// interpolation coefficients: f(x) = sum_k c(k) exp(i k.x).
SpectralField transform_forward(const Grid& grid, std::span<const ArrayXr> values, Rank rank);
SpectralField transform_forward(const Grid& grid, const ArrayXr& values);  // scalar
std::vector<ArrayXr> transform_inverse(const SpectralField& f);
ArrayXr transform_inverse_component(const SpectralField& f, int c);

/// Restore c(-k) = conj(c(k)) by averaging with the mirrored coefficient.
void enforce_reality(SpectralField& f);
void set_mean_zero(SpectralField& f);

}  // namespace oldb

#endif
