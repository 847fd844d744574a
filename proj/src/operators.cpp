#include "oldb/operators.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace oldb {

namespace {

const Complex I(0.0, 1.0);

Real max_abs(const ArrayXc& c) { return c.abs().maxCoeff(); }

Real field_max_abs(const SpectralField& f) {
    Real m = 0;
    for (int c = 0; c < f.components(); ++c) m = std::max(m, max_abs(f.comp(c)));
    return m;
}

}  // namespace

SpectralField lambda_power(const SpectralField& f, Real alpha) {
    if (alpha == 0.0) return f;
    const auto& t = tables(f.grid());
    if (alpha < 0.0) {
        const Real scale = field_max_abs(f);
        for (int c = 0; c < f.components(); ++c)
            if (std::abs(f.comp(c)(0)) > 1e-12 * std::max(scale, Real(1)))
                throw std::invalid_argument(
                    "lambda_power: negative power of a non-mean-free field is undefined");
    }
    ArrayXr mult = t.kabs.pow(alpha);
    mult(0) = 0.0;
    SpectralField out = f;
    for (int c = 0; c < out.components(); ++c) out.comp(c) *= mult;
    return out;
}

SpectralField leray_project(const SpectralField& v) {
    if (v.rank() != Rank::Vector) throw std::invalid_argument("leray_project: vector field required");
    const auto& t = tables(v.grid());
    const int n = v.grid().dim;
    ArrayXc kdotv = ArrayXc::Zero(v.comp(0).size());
    for (int a = 0; a < n; ++a) kdotv += t.kcomp[a] * v.comp(a);
    kdotv *= t.inv_ksq;  // zero at k=0, so the mean passes through
    SpectralField out = v;
    for (int a = 0; a < n; ++a) out.comp(a) -= t.kcomp[a] * kdotv;
    return out;
}

SpectralField gamma_from_tau(const SpectralField& tau) {
    if (tau.rank() != Rank::SymTensor)
        throw std::invalid_argument("gamma_from_tau: symmetric tensor field required");
    const Grid& grid = tau.grid();
    const auto& t = tables(grid);
    const int n = grid.dim;
    SpectralField div(grid, Rank::Vector);
    for (int j = 0; j < n; ++j) {
        ArrayXc acc = ArrayXc::Zero(tau.comp(0).size());
        for (int i = 0; i < n; ++i) acc += t.kcomp[i] * tau.sym(i, j);
        div.comp(j) = I * acc;
    }
    SpectralField gamma = leray_project(div);
    for (int j = 0; j < n; ++j) gamma.comp(j) *= t.inv_kabs;  // zero at k=0
    return gamma;
}

SpectralField gradient(const SpectralField& f) {
    if (f.rank() != Rank::Scalar) throw std::invalid_argument("gradient: scalar field required");
    const auto& t = tables(f.grid());
    SpectralField out(f.grid(), Rank::Vector);
    for (int a = 0; a < f.grid().dim; ++a) out.comp(a) = I * t.kcomp[a] * f.comp(0);
    return out;
}

SpectralField jacobian(const SpectralField& u) {
    if (u.rank() != Rank::Vector) throw std::invalid_argument("jacobian: vector field required");
    const auto& t = tables(u.grid());
    const int n = u.grid().dim;
    SpectralField out(u.grid(), Rank::Tensor);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) out.comp(i * n + j) = I * t.kcomp[j] * u.comp(i);
    return out;
}

SpectralField divergence(const SpectralField& f) {
    const auto& t = tables(f.grid());
    const int n = f.grid().dim;
    if (f.rank() == Rank::Vector) {
        SpectralField out(f.grid(), Rank::Scalar);
        ArrayXc acc = ArrayXc::Zero(f.comp(0).size());
        for (int a = 0; a < n; ++a) acc += t.kcomp[a] * f.comp(a);
        out.comp(0) = I * acc;
        return out;
    }
    if (f.rank() == Rank::SymTensor) {
        SpectralField out(f.grid(), Rank::Vector);
        for (int j = 0; j < n; ++j) {
            ArrayXc acc = ArrayXc::Zero(f.comp(0).size());
            for (int i = 0; i < n; ++i) acc += t.kcomp[i] * f.sym(i, j);
            out.comp(j) = I * acc;
        }
        return out;
    }
    throw std::invalid_argument("divergence: vector or symmetric tensor field required");
}

SpectralField sym_grad(const SpectralField& u) {
    if (u.rank() != Rank::Vector) throw std::invalid_argument("sym_grad: vector field required");
    const auto& t = tables(u.grid());
    const int n = u.grid().dim;
    SpectralField out(u.grid(), Rank::SymTensor);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j)
            out.sym(i, j) = Real(0.5) * I * (t.kcomp[j] * u.comp(i) + t.kcomp[i] * u.comp(j));
    return out;
}

SpectralField skew_grad(const SpectralField& u) {
    if (u.rank() != Rank::Vector) throw std::invalid_argument("skew_grad: vector field required");
    const auto& t = tables(u.grid());
    const int n = u.grid().dim;
    SpectralField out(u.grid(), Rank::Tensor);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            out.comp(i * n + j) = Real(0.5) * I * (t.kcomp[j] * u.comp(i) - t.kcomp[i] * u.comp(j));
    return out;
}

SpectralField dealias(const SpectralField& f) {
    SpectralField out = f;
    dealias_in_place(out);
    return out;
}

void dealias_in_place(SpectralField& f) {
    const auto& mask = tables(f.grid()).dealias_mask;
    for (int c = 0; c < f.components(); ++c) f.comp(c) *= mask;
}

Real l2_norm(const SpectralField& f) {
    const int n = f.grid().dim;
    Real sum = 0;
    for (int c = 0; c < f.components(); ++c)
        sum += component_weight(f.rank(), c, n) * f.comp(c).abs2().sum();
    return std::sqrt(sum * std::pow(f.grid().length, n));
}

Real h1_seminorm_sq(const SpectralField& f) {
    const auto& t = tables(f.grid());
    const int n = f.grid().dim;
    Real sum = 0;
    for (int c = 0; c < f.components(); ++c)
        sum += component_weight(f.rank(), c, n) * (t.ksq * f.comp(c).abs2()).sum();
    return sum * std::pow(f.grid().length, n);
}

ArrayXr magnitude_squared(std::span<const ArrayXr> values, Rank rank, int dim) {
    ArrayXr m = ArrayXr::Zero(values[0].size());
    for (std::size_t c = 0; c < values.size(); ++c)
        m += component_weight(rank, static_cast<int>(c), dim) * values[c].square();
    return m;
}

Real lattice_lp_norm(std::span<const ArrayXr> values, const Grid& grid, Rank rank, Real p) {
    ArrayXr msq = magnitude_squared(values, rank, grid.dim);
    if (std::isinf(p)) return std::sqrt(msq.maxCoeff());
    if (p == 2.0) return std::sqrt(msq.sum() * grid.cell_volume());
    return std::pow((msq.pow(p / 2)).sum() * grid.cell_volume(), 1.0 / p);
}

Real lambda_lq_norm(const SpectralField& f, Real alpha, Real q) {
    SpectralField g = lambda_power(f, alpha);
    if (q == 2.0) return l2_norm(g);
    std::vector<ArrayXr> phys = transform_inverse(g);
    return lattice_lp_norm(phys, f.grid(), f.rank(), q);
}

Real divergence_residual(const SpectralField& u) {
    const auto& t = tables(u.grid());
    ArrayXc kdotu = ArrayXc::Zero(u.comp(0).size());
    for (int a = 0; a < u.grid().dim; ++a) kdotu += t.kcomp[a] * u.comp(a);
    return kdotu.abs().maxCoeff();
}

Real reality_residual(const SpectralField& f) {
    const auto& idx = tables(f.grid()).conj_index;
    Real worst = 0;
    for (int c = 0; c < f.components(); ++c) {
        ArrayXc mirrored = f.comp(c)(idx);
        worst = std::max(worst, (f.comp(c) - mirrored.conjugate()).abs().maxCoeff());
    }
    return worst;
}

}  // namespace oldb
