#ifndef OLDB_LITTLEWOOD_PALEY_HPP
#define OLDB_LITTLEWOOD_PALEY_HPP

#include <vector>

#include "oldb/field.hpp"

namespace oldb {

/// Homogeneous dyadic partition of unity. chi is a smooth cutoff equal to 1
/// on [0, 3/4] and supported in [0, 4/3]; phi(r) = chi(r/2) - chi(r) is
/// supported in [3/4, 8/3] and sums to 1 over dyadic rescalings:
/// sum_j phi(2^-j r) = 1 for every r > 0. The transition of chi is the
/// normalized integral of the standard C-infinity bump exp(-1/(1-x^2)).
///
/// Block multiplier tables are tabulated for every j whose annulus meets the
/// grid's wavenumber lattice. [j_min_resolvable, j_max_resolvable] is the
/// band the box genuinely resolves; norms report the j range actually used.
class DyadicPartition {
  public:
    DyadicPartition(const Grid& grid, int j0 = 0);

    static Real chi(Real r);
    static Real phi(Real r);

    const Grid& grid() const { return grid_; }
    int j0() const { return j0_; }
    int table_lo() const { return table_lo_; }
    int table_hi() const { return table_hi_; }
    int j_min_resolvable() const { return j_min_res_; }
    int j_max_resolvable() const { return j_max_res_; }

    const ArrayXr& phi_table(int j) const;

    /// Frequency-localized piece Delta_j f.
    SpectralField block(const SpectralField& f, int j) const;
    /// Low-frequency part S_{j0+1} f (chi filter at scale j0+1).
    SpectralField low_cut(const SpectralField& f) const;
    /// High-frequency complement f - low_cut(f), exact by construction.
    SpectralField high_cut(const SpectralField& f) const;

    /// max over nonzero lattice modes of |sum_j phi(2^-j |k|) - 1|.
    Real partition_residual() const;

  private:
    Grid grid_;
    int j0_;
    int table_lo_, table_hi_;
    int j_min_res_, j_max_res_;
    std::vector<ArrayXr> phi_tables_;
    ArrayXr lowcut_table_;
};

enum class BesovSide { Full, Low, High };

/// Homogeneous Besov norm parameters for B^s_{p,1}. Low sums blocks j <= j0,
/// High sums j >= j0 - 1, mirroring the overlapping low/high split.
struct BesovSpec {
    Real s;
    Real p;
    BesovSide side = BesovSide::Full;
};

struct BesovNormDetail {
    Real value;
    int j_lo;  // truncation actually used
    int j_hi;
};

/// L^p norm of one dyadic block of the joint field (|f1|^2+...+|fm|^2)^(1/2).
Real block_lp_norm(std::span<const SpectralField* const> fields, const DyadicPartition& part,
                   int j, Real p);

Real besov_norm(std::span<const SpectralField* const> fields, const DyadicPartition& part,
                const BesovSpec& spec);
Real besov_norm(const SpectralField& f, const DyadicPartition& part, const BesovSpec& spec);
BesovNormDetail besov_norm_detail(std::span<const SpectralField* const> fields,
                                  const DyadicPartition& part, const BesovSpec& spec);

/// Running Chemin-Lerner norms: per-block L^1-in-time (trapezoidal) and
/// sup-in-time accumulation of ||Delta_j f(t)||_{L^p}. The partition must
/// outlive the accumulator.
class CheminLernerAccumulator {
  public:
    enum class Mode { L1, Sup };

    CheminLernerAccumulator(const DyadicPartition& part, Real p);

    void update(std::span<const SpectralField* const> fields, Real t);
    void update(const SpectralField& f, Real t);

    Real norm(Real s, Mode mode) const;

  private:
    const DyadicPartition* part_;
    Real p_;
    Real prev_t_ = 0;
    bool has_prev_ = false;
    std::vector<Real> prev_, integral_, sup_;
};

/// Empirical LHS/RHS ratio of the bilinear product estimate
/// ||uv||_{B^{s1+s2-n/q}_{p,1}} <= C ||u||_{B^{s1}_{q,1}} ||v||_{B^{s2}_{p,1}}.
/// Index constraints are validated and named on violation. Inputs must be
/// band-limited enough that the lattice product is alias-free.
Real lemma_ratio_product(const SpectralField& u, const SpectralField& v, Real s1, Real s2,
                         Real p, Real q, const DyadicPartition& part);

/// Empirical ratio for the transport commutator estimate
/// sum_j 2^{js} ||[Delta_j, u.grad]v||_{L^q} <= C ||grad u||_{B^{n/p}_{p,1}} ||v||_{B^s_{q,1}}
/// for divergence-free u.
Real lemma_ratio_commutator(const SpectralField& u, const SpectralField& v, Real s, Real p,
                            Real q, const DyadicPartition& part);

}  // namespace oldb

#endif
