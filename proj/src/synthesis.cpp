#include "oldb/synthesis.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "detail/hash_rng.hpp"
#include "oldb/operators.hpp"

namespace oldb {

namespace {

using detail::splitmix64;
using detail::uniform01;

struct ModeInfo {
    Eigen::Index idx;
    Eigen::Index conj_idx;
    std::array<int, 3> m;  // symmetric integers
    Real r;
    bool self_conjugate;
    std::uint64_t hash;
};

// Visit each canonical lattice mode (first nonzero symmetric index positive)
// with k_lo <= |k| <= k_hi. The hash depends on the mode integers only, not
// on the lattice size, so refinements reproduce the same coefficients.
template <typename F>
void visit_band(const Grid& grid, Real k_lo, Real k_hi, std::uint64_t seed, F&& fill) {
    const int n = grid.dim;
    const int N = grid.points;
    const auto& t = tables(grid);
    const auto size = static_cast<Eigen::Index>(grid.size());

    std::vector<int> m(n, 0);
    auto advance = [&] {
        for (int a = n - 1; a >= 0; --a) {
            if (++m[a] < N) return;
            m[a] = 0;
        }
    };
    for (Eigen::Index idx = 0; idx < size; ++idx, advance()) {
        const Real r = t.kabs(idx);
        if (r < k_lo || r > k_hi || r <= 0) continue;

        ModeInfo info;
        info.idx = idx;
        info.conj_idx = t.conj_index(idx);
        info.r = r;
        info.m = {0, 0, 0};
        info.self_conjugate = true;
        int first_sign = 0;
        std::uint64_t h = seed;
        for (int a = 0; a < n; ++a) {
            const int mm = grid.symmetric_index(m[a]);
            info.m[a] = mm;
            if (mm != 0 && first_sign == 0) first_sign = mm > 0 ? 1 : -1;
            if (mm != 0 && mm != N / 2) info.self_conjugate = false;
            h = splitmix64(h ^ splitmix64(static_cast<std::uint64_t>(mm + (1 << 20))));
        }
        if (first_sign < 0) continue;
        info.hash = h;
        fill(info);
    }
}

Complex random_phase(std::uint64_t& h, bool self_conjugate) {
    h = splitmix64(h);
    if (self_conjugate) return Complex(uniform01(h) < 0.5 ? -1.0 : 1.0, 0.0);
    const Real phase = 2.0 * pi * uniform01(h);
    return Complex(std::cos(phase), std::sin(phase));
}

}  // namespace

SpectralField random_band_scalar(const Grid& grid, Real k_lo, Real k_hi, std::uint64_t seed) {
    SpectralField f(grid, Rank::Scalar);
    visit_band(grid, k_lo, k_hi, seed, [&](const ModeInfo& info) {
        std::uint64_t h = info.hash;
        const Complex c = random_phase(h, info.self_conjugate);
        f.comp(0)(info.idx) = c;
        f.comp(0)(info.conj_idx) = std::conj(c);
    });
    return f;
}

SpectralField random_band_solenoidal(const Grid& grid, Real k_lo, Real k_hi,
                                     std::uint64_t seed) {
    const int n = grid.dim;
    const auto& t = tables(grid);
    SpectralField f(grid, Rank::Vector);
    visit_band(grid, k_lo, k_hi, seed, [&](const ModeInfo& info) {
        Eigen::Vector3d k{t.kcomp[0](info.idx), t.kcomp[1](info.idx),
                          n == 3 ? t.kcomp[2](info.idx) : 0.0};
        Eigen::Vector3d dir;
        std::uint64_t h = info.hash;
        if (n == 2) {
            dir = Eigen::Vector3d(-k.y(), k.x(), 0.0) / info.r;
        } else {
            const Eigen::Vector3d axis =
                std::abs(k.x()) <= std::abs(k.y()) && std::abs(k.x()) <= std::abs(k.z())
                    ? Eigen::Vector3d::UnitX()
                    : (std::abs(k.y()) <= std::abs(k.z()) ? Eigen::Vector3d::UnitY()
                                                          : Eigen::Vector3d::UnitZ());
            const Eigen::Vector3d e1 = k.cross(axis).normalized();
            const Eigen::Vector3d e2 = k.cross(e1).normalized();
            h = splitmix64(h);
            const Real psi = 2.0 * pi * uniform01(h);
            dir = std::cos(psi) * e1 + std::sin(psi) * e2;
        }
        const Complex c = random_phase(h, info.self_conjugate);
        for (int a = 0; a < n; ++a) {
            f.comp(a)(info.idx) = c * dir(a);
            f.comp(a)(info.conj_idx) = std::conj(c * dir(a));
        }
    });
    return f;
}

}  // namespace oldb
