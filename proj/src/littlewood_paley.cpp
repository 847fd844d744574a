#include "oldb/littlewood_paley.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "oldb/operators.hpp"

namespace oldb {

namespace {

Real bump(Real x) {
    if (std::abs(x) >= 1.0) return 0.0;
    return std::exp(-1.0 / (1.0 - x * x));
}

// Bump supported on the chi transition zone (3/4, 4/3).
Real transition_bump(Real r) { return bump((r - 25.0 / 24.0) * (24.0 / 7.0)); }

using gauss30 = boost::math::quadrature::gauss<Real, 30>;

Real transition_denominator() {
    static const Real denom = gauss30::integrate(transition_bump, 0.75, 4.0 / 3.0);
    return denom;
}

}  // namespace

Real DyadicPartition::chi(Real r) {
    if (r <= 0.75) return 1.0;
    if (r >= 4.0 / 3.0) return 0.0;
    return gauss30::integrate(transition_bump, r, 4.0 / 3.0) / transition_denominator();
}

Real DyadicPartition::phi(Real r) {
    if (r <= 0.75 || r >= 8.0 / 3.0) return 0.0;
    return chi(0.5 * r) - chi(r);
}

DyadicPartition::DyadicPartition(const Grid& grid, int j0) : grid_(grid), j0_(j0) {
    const Real dk = grid.dk();
    const Real kmax_corner = dk * (grid.points / 2) * std::sqrt(Real(grid.dim));

    j_min_res_ = static_cast<int>(std::ceil(std::log2(dk))) - 1;
    j_max_res_ = static_cast<int>(std::floor(
                     std::log2(pi * grid.points * grid.dealias_fraction / grid.length))) + 1;
    if (j0 < j_min_res_ || j0 > j_max_res_) {
        std::ostringstream msg;
        msg << "make_partition: j0 = " << j0 << " outside resolvable band [" << j_min_res_
            << ", " << j_max_res_ << "]";
        throw std::invalid_argument(msg.str());
    }

    table_lo_ = static_cast<int>(std::floor(std::log2(dk))) - 1;
    table_hi_ = static_cast<int>(std::ceil(std::log2(kmax_corner))) + 1;

    const auto& kabs = tables(grid).kabs;
    phi_tables_.reserve(table_hi_ - table_lo_ + 1);
    for (int j = table_lo_; j <= table_hi_; ++j) {
        const Real scale = std::ldexp(1.0, -j);  // 2^-j
        ArrayXr table(kabs.size());
        for (Eigen::Index i = 0; i < kabs.size(); ++i) table(i) = phi(scale * kabs(i));
        phi_tables_.push_back(std::move(table));
    }

    const Real low_scale = std::ldexp(1.0, -(j0 + 1));
    lowcut_table_ = ArrayXr(kabs.size());
    for (Eigen::Index i = 0; i < kabs.size(); ++i) lowcut_table_(i) = chi(low_scale * kabs(i));
}

const ArrayXr& DyadicPartition::phi_table(int j) const {
    if (j < table_lo_ || j > table_hi_)
        throw std::out_of_range("phi_table: block index outside tabulated range");
    return phi_tables_[j - table_lo_];
}

SpectralField DyadicPartition::block(const SpectralField& f, int j) const {
    SpectralField out = f;
    if (j < table_lo_ || j > table_hi_) {
        for (int c = 0; c < out.components(); ++c) out.comp(c).setZero();
        return out;
    }
    const ArrayXr& table = phi_tables_[j - table_lo_];
    for (int c = 0; c < out.components(); ++c) out.comp(c) *= table;
    return out;
}

SpectralField DyadicPartition::low_cut(const SpectralField& f) const {
    SpectralField out = f;
    for (int c = 0; c < out.components(); ++c) out.comp(c) *= lowcut_table_;
    return out;
}

SpectralField DyadicPartition::high_cut(const SpectralField& f) const {
    SpectralField out = f;
    for (int c = 0; c < out.components(); ++c) out.comp(c) -= out.comp(c) * lowcut_table_;
    return out;
}

Real DyadicPartition::partition_residual() const {
    ArrayXr sum = ArrayXr::Zero(grid_.size());
    for (const auto& table : phi_tables_) sum += table;
    sum(0) = 1.0;  // mean mode carries no dyadic content
    return (sum - 1.0).abs().maxCoeff();
}

namespace {

std::pair<int, int> side_range(const DyadicPartition& part, BesovSide side) {
    switch (side) {
        case BesovSide::Low: return {part.table_lo(), part.j0()};
        case BesovSide::High: return {part.j0() - 1, part.table_hi()};
        default: return {part.table_lo(), part.table_hi()};
    }
}

}  // namespace

Real block_lp_norm(std::span<const SpectralField* const> fields, const DyadicPartition& part,
                   int j, Real p) {
    const Grid& grid = part.grid();
    const int n = grid.dim;
    if (p == 2.0) {
        const ArrayXr& table = part.phi_table(j);
        Real sum = 0;
        for (const SpectralField* f : fields)
            for (int c = 0; c < f->components(); ++c)
                sum += component_weight(f->rank(), c, n) * (table.square() * f->comp(c).abs2()).sum();
        return std::sqrt(sum * std::pow(grid.length, n));
    }
    ArrayXr msq = ArrayXr::Zero(grid.size());
    for (const SpectralField* f : fields) {
        SpectralField blocked = part.block(*f, j);
        for (int c = 0; c < blocked.components(); ++c) {
            ArrayXr phys = transform_inverse_component(blocked, c);
            msq += component_weight(f->rank(), c, n) * phys.square();
        }
    }
    if (std::isinf(p)) return std::sqrt(msq.maxCoeff());
    return std::pow((msq.pow(p / 2)).sum() * grid.cell_volume(), 1.0 / p);
}

BesovNormDetail besov_norm_detail(std::span<const SpectralField* const> fields,
                                  const DyadicPartition& part, const BesovSpec& spec) {
    auto [j_lo, j_hi] = side_range(part, spec.side);
    Real total = 0;
    for (int j = j_lo; j <= j_hi; ++j)
        total += std::pow(2.0, spec.s * j) * block_lp_norm(fields, part, j, spec.p);
    return {total, j_lo, j_hi};
}

Real besov_norm(std::span<const SpectralField* const> fields, const DyadicPartition& part,
                const BesovSpec& spec) {
    return besov_norm_detail(fields, part, spec).value;
}

Real besov_norm(const SpectralField& f, const DyadicPartition& part, const BesovSpec& spec) {
    const SpectralField* ptr = &f;
    return besov_norm(std::span<const SpectralField* const>(&ptr, 1), part, spec);
}

CheminLernerAccumulator::CheminLernerAccumulator(const DyadicPartition& part, Real p)
    : part_(&part), p_(p) {
    const std::size_t count = part.table_hi() - part.table_lo() + 1;
    prev_.assign(count, 0.0);
    integral_.assign(count, 0.0);
    sup_.assign(count, 0.0);
}

void CheminLernerAccumulator::update(std::span<const SpectralField* const> fields, Real t) {
    const int lo = part_->table_lo();
    for (std::size_t i = 0; i < prev_.size(); ++i) {
        const Real bn = block_lp_norm(fields, *part_, lo + static_cast<int>(i), p_);
        if (has_prev_) integral_[i] += 0.5 * (bn + prev_[i]) * (t - prev_t_);
        sup_[i] = std::max(sup_[i], bn);
        prev_[i] = bn;
    }
    prev_t_ = t;
    has_prev_ = true;
}

void CheminLernerAccumulator::update(const SpectralField& f, Real t) {
    const SpectralField* ptr = &f;
    update(std::span<const SpectralField* const>(&ptr, 1), t);
}

Real CheminLernerAccumulator::norm(Real s, Mode mode) const {
    const auto& vals = mode == Mode::L1 ? integral_ : sup_;
    Real total = 0;
    for (std::size_t i = 0; i < vals.size(); ++i)
        total += std::pow(2.0, s * (part_->table_lo() + static_cast<int>(i))) * vals[i];
    return total;
}

namespace {

void require(bool ok, const char* constraint) {
    if (!ok) throw std::invalid_argument(std::string("index constraint violated: ") + constraint);
}

ArrayXr advect_physical(const std::vector<ArrayXr>& u_phys, const SpectralField& scalar) {
    SpectralField grad = gradient(scalar);
    ArrayXr out = ArrayXr::Zero(scalar.grid().size());
    for (int a = 0; a < scalar.grid().dim; ++a)
        out += u_phys[a] * transform_inverse_component(grad, a);
    return out;
}

}  // namespace

Real lemma_ratio_product(const SpectralField& u, const SpectralField& v, Real s1, Real s2,
                         Real p, Real q, const DyadicPartition& part) {
    const int n = part.grid().dim;
    const Real eps = 1e-12;
    require(s1 <= n / q + eps, "s1 <= n/q");
    require(s2 <= n * std::min(1.0 / p, 1.0 / q) + eps, "s2 <= n*min(1/p, 1/q)");
    require(s1 + s2 > n * std::max(0.0, 1.0 / p + 1.0 / q - 1.0) - eps,
            "s1 + s2 > n*max(0, 1/p + 1/q - 1)");

    ArrayXr uv = transform_inverse_component(u, 0) * transform_inverse_component(v, 0);
    SpectralField product = transform_forward(part.grid(), uv);
    const Real lhs = besov_norm(product, part, {s1 + s2 - n / q, p, BesovSide::Full});
    const Real rhs = besov_norm(u, part, {s1, q, BesovSide::Full}) *
                     besov_norm(v, part, {s2, p, BesovSide::Full});
    return rhs > 0 ? lhs / rhs : 0.0;
}

Real lemma_ratio_commutator(const SpectralField& u, const SpectralField& v, Real s, Real p,
                            Real q, const DyadicPartition& part) {
    const int n = part.grid().dim;
    const Real eps = 1e-12;
    require(s > -1.0 - n * std::min(1.0 / p, 1.0 - 1.0 / q) + eps,
            "s > -1 - n*min(1/p, 1 - 1/q)");
    require(s <= n / p + eps, "s <= n/p");
    {
        Real scale = 0;
        for (int c = 0; c < u.components(); ++c) scale = std::max(scale, u.comp(c).abs().maxCoeff());
        if (divergence_residual(u) > 1e-10 * std::max(scale, Real(1)))
            throw std::invalid_argument("index constraint violated: div u = 0");
    }

    std::vector<ArrayXr> u_phys = transform_inverse(u);
    SpectralField advected = transform_forward(part.grid(), advect_physical(u_phys, v));

    Real lhs = 0;
    for (int j = part.table_lo(); j <= part.table_hi(); ++j) {
        ArrayXr term_a = transform_inverse_component(part.block(advected, j), 0);
        ArrayXr term_b = advect_physical(u_phys, part.block(v, j));
        ArrayXr comm = term_a - term_b;
        Real norm_j = std::isinf(q)
                          ? comm.abs().maxCoeff()
                          : std::pow(comm.abs().pow(q).sum() * part.grid().cell_volume(), 1.0 / q);
        lhs += std::pow(2.0, s * j) * norm_j;
    }

    const Real rhs = besov_norm(jacobian(u), part, {Real(n) / p, p, BesovSide::Full}) *
                     besov_norm(v, part, {s, q, BesovSide::Full});
    return rhs > 0 ? lhs / rhs : 0.0;
}

}  // namespace oldb
