#include "oldb/field.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>

namespace oldb {

namespace {

bool power_of_two(int v) { return v > 0 && (v & (v - 1)) == 0; }

}  // namespace

Grid::Grid(int n, int N, Real L, Real dealias)
    : dim(n), points(N), length(L), dealias_fraction(dealias) {
    if (n != 2 && n != 3) throw std::invalid_argument("grid: dim must be 2 or 3");
    if (N < 8 || !power_of_two(N)) throw std::invalid_argument("grid: N must be a power of two >= 8");
    if (!(L > 0)) throw std::invalid_argument("grid: L must be positive");
    if (!(dealias > 0 && dealias <= 1)) throw std::invalid_argument("grid: dealias_fraction must lie in (0,1]");
}

std::size_t Grid::size() const {
    std::size_t s = 1;
    for (int a = 0; a < dim; ++a) s *= static_cast<std::size_t>(points);
    return s;
}

Real Grid::cell_volume() const {
    Real h = length / points;
    return dim == 2 ? h * h : h * h * h;
}

int Grid::symmetric_index(int m) const { return m <= points / 2 ? m : m - points; }

namespace {

struct TableKey {
    int dim, points;
    Real length, dealias;
    bool operator<(const TableKey& o) const {
        return std::tie(dim, points, length, dealias) < std::tie(o.dim, o.points, o.length, o.dealias);
    }
};

std::map<TableKey, GridTables> g_tables;
std::mutex g_tables_mutex;

GridTables build_tables(const Grid& grid) {
    GridTables t;
    const int n = grid.dim;
    const int N = grid.points;
    const auto size = static_cast<Eigen::Index>(grid.size());
    const Real dk = grid.dk();
    const int cutoff = static_cast<int>(std::floor(grid.dealias_fraction * N / 2.0 + 1e-12));

    t.kcomp.assign(n, ArrayXr::Zero(size));
    t.ksq = ArrayXr::Zero(size);
    t.dealias_mask = ArrayXr::Ones(size);
    t.conj_index = Eigen::ArrayXi::Zero(size);

    std::vector<int> m(n, 0);
    for (Eigen::Index idx = 0; idx < size; ++idx) {
        Real ksq = 0;
        Eigen::Index cidx = 0;
        bool keep = true;
        for (int a = 0; a < n; ++a) {
            const int mm = grid.symmetric_index(m[a]);
            const Real k = dk * mm;
            t.kcomp[a](idx) = k;
            ksq += k * k;
            if (std::abs(mm) > cutoff) keep = false;
            cidx = cidx * N + (N - m[a]) % N;
        }
        t.ksq(idx) = ksq;
        if (!keep) t.dealias_mask(idx) = 0.0;
        t.conj_index(idx) = static_cast<int>(cidx);
        // row-major odometer
        for (int a = n - 1; a >= 0; --a) {
            if (++m[a] < N) break;
            m[a] = 0;
        }
    }
    t.kabs = t.ksq.sqrt();
    t.inv_ksq = (t.ksq > 0.0).select(t.ksq.inverse(), 0.0);
    t.inv_kabs = (t.kabs > 0.0).select(t.kabs.inverse(), 0.0);
    return t;
}

}  // namespace

const GridTables& tables(const Grid& grid) {
    TableKey key{grid.dim, grid.points, grid.length, grid.dealias_fraction};
    std::scoped_lock lock(g_tables_mutex);
    auto it = g_tables.find(key);
    if (it == g_tables.end()) it = g_tables.emplace(key, build_tables(grid)).first;
    return it->second;
}

int component_count(Rank rank, int dim) {
    switch (rank) {
        case Rank::Scalar: return 1;
        case Rank::Vector: return dim;
        case Rank::SymTensor: return dim * (dim + 1) / 2;
        case Rank::Tensor: return dim * dim;
    }
    return 0;
}

int sym_index(int i, int j, int dim) {
    if (i > j) std::swap(i, j);
    return i * dim - i * (i - 1) / 2 + (j - i);
}

Real component_weight(Rank rank, int comp, int dim) {
    if (rank != Rank::SymTensor) return 1.0;
    for (int i = 0; i < dim; ++i)
        if (comp == sym_index(i, i, dim)) return 1.0;
    return 2.0;
}

SpectralField::SpectralField(const Grid& grid, Rank rank) : grid_(grid), rank_(rank) {
    const auto size = static_cast<Eigen::Index>(grid.size());
    comp_.assign(component_count(rank, grid.dim), ArrayXc::Zero(size));
}

bool SpectralField::all_finite() const {
    for (const auto& c : comp_)
        if (!c.allFinite()) return false;
    return true;
}

namespace {

// One cached FFTW plan pair per lattice shape. Execution copies through an
// FFTW-owned buffer; the mutex serializes buffer use.
struct FftPlan {
    fftw_complex* buf = nullptr;
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;
    std::size_t size = 0;

    FftPlan() = default;
    FftPlan(const FftPlan&) = delete;
    FftPlan& operator=(const FftPlan&) = delete;

    ~FftPlan() {
        if (fwd) fftw_destroy_plan(fwd);
        if (bwd) fftw_destroy_plan(bwd);
        if (buf) fftw_free(buf);
    }
};

std::map<std::pair<int, int>, FftPlan> g_plans;
std::mutex g_fft_mutex;

FftPlan& plan_for(const Grid& grid) {
    auto key = std::make_pair(grid.dim, grid.points);
    auto [it, inserted] = g_plans.try_emplace(key);
    FftPlan& plan = it->second;
    if (inserted) {
        plan.size = grid.size();
        plan.buf = fftw_alloc_complex(plan.size);
        const int N = grid.points;
        if (grid.dim == 2) {
            plan.fwd = fftw_plan_dft_2d(N, N, plan.buf, plan.buf, FFTW_FORWARD, FFTW_ESTIMATE);
            plan.bwd = fftw_plan_dft_2d(N, N, plan.buf, plan.buf, FFTW_BACKWARD, FFTW_ESTIMATE);
        } else {
            plan.fwd = fftw_plan_dft_3d(N, N, N, plan.buf, plan.buf, FFTW_FORWARD, FFTW_ESTIMATE);
            plan.bwd = fftw_plan_dft_3d(N, N, N, plan.buf, plan.buf, FFTW_BACKWARD, FFTW_ESTIMATE);
        }
    }
    return plan;
}

}  // namespace

SpectralField transform_forward(const Grid& grid, std::span<const ArrayXr> values, Rank rank) {
    const int nc = component_count(rank, grid.dim);
    if (static_cast<int>(values.size()) != nc)
        throw std::invalid_argument("transform_forward: component count mismatch");
    const auto size = static_cast<Eigen::Index>(grid.size());
    SpectralField f(grid, rank);
    std::scoped_lock lock(g_fft_mutex);
    FftPlan& plan = plan_for(grid);
    const Real scale = 1.0 / static_cast<Real>(grid.size());
    for (int c = 0; c < nc; ++c) {
        if (values[c].size() != size)
            throw std::invalid_argument("transform_forward: lattice size mismatch");
        for (Eigen::Index i = 0; i < size; ++i) {
            plan.buf[i][0] = values[c](i);
            plan.buf[i][1] = 0.0;
        }
        fftw_execute(plan.fwd);
        ArrayXc& out = f.comp(c);
        for (Eigen::Index i = 0; i < size; ++i)
            out(i) = Complex(plan.buf[i][0] * scale, plan.buf[i][1] * scale);
    }
    return f;
}

SpectralField transform_forward(const Grid& grid, const ArrayXr& values) {
    return transform_forward(grid, std::span<const ArrayXr>(&values, 1), Rank::Scalar);
}

ArrayXr transform_inverse_component(const SpectralField& f, int c) {
    const auto size = static_cast<Eigen::Index>(f.grid().size());
    std::scoped_lock lock(g_fft_mutex);
    FftPlan& plan = plan_for(f.grid());
    const ArrayXc& in = f.comp(c);
    for (Eigen::Index i = 0; i < size; ++i) {
        plan.buf[i][0] = in(i).real();
        plan.buf[i][1] = in(i).imag();
    }
    fftw_execute(plan.bwd);
    ArrayXr out(size);
    for (Eigen::Index i = 0; i < size; ++i) out(i) = plan.buf[i][0];
    return out;
}

std::vector<ArrayXr> transform_inverse(const SpectralField& f) {
    std::vector<ArrayXr> out;
    out.reserve(f.components());
    for (int c = 0; c < f.components(); ++c) out.push_back(transform_inverse_component(f, c));
    return out;
}

void enforce_reality(SpectralField& f) {
    const auto& idx = tables(f.grid()).conj_index;
    for (int c = 0; c < f.components(); ++c) {
        ArrayXc mirrored = f.comp(c)(idx);
        f.comp(c) = 0.5 * (f.comp(c) + mirrored.conjugate());
    }
}

void set_mean_zero(SpectralField& f) {
    for (int c = 0; c < f.components(); ++c) f.comp(c)(0) = Complex(0, 0);
}

}  // namespace oldb
