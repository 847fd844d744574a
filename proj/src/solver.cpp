#include "oldb/solver.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include <Eigen/Dense>

#include "detail/hash_rng.hpp"
#include "oldb/operators.hpp"

namespace oldb {

SolverState::SolverState(const Grid& grid, Real b_)
    : b(b_), u(grid, Rank::Vector), tau(grid, Rank::SymTensor) {}

BlowupError::BlowupError(Real last_good_time)
    : std::runtime_error("solver blow-up: non-finite coefficients after t = " +
                         std::to_string(last_good_time)),
      t_(last_good_time) {}

namespace {

std::vector<ArrayXr> physical(const SpectralField& f) { return transform_inverse(f); }

// D and Omega entries from the physical velocity gradient g[i*n+j] = d_j u_i.
void stress_kernel(const std::vector<ArrayXr>& tau_p, const std::vector<ArrayXr>& grad_p,
                   Real b, int n, std::vector<ArrayXr>& out) {
    auto tau_at = [&](int i, int j) -> const ArrayXr& { return tau_p[sym_index(i, j, n)]; };
    const auto size = tau_p[0].size();
    ArrayXr dik(size), okj(size), oik(size), dkj(size);
    int c = 0;
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j, ++c) {
            ArrayXr& acc = out[c];
            acc = ArrayXr::Zero(size);
            for (int k = 0; k < n; ++k) {
                // Omega_kj = (d_j u_k - d_k u_j)/2, D_ik = (d_k u_i + d_i u_k)/2
                okj = 0.5 * (grad_p[k * n + j] - grad_p[j * n + k]);
                oik = 0.5 * (grad_p[i * n + k] - grad_p[k * n + i]);
                dik = 0.5 * (grad_p[i * n + k] + grad_p[k * n + i]);
                dkj = 0.5 * (grad_p[k * n + j] + grad_p[j * n + k]);
                acc += tau_at(i, k) * okj - oik * tau_at(k, j);
                if (b != 0) acc += b * (dik * tau_at(k, j) + tau_at(i, k) * dkj);
            }
        }
    }
}

struct RhsData {
    Rhs rhs;
    Real umax;
};

RhsData rhs_impl(const SolverState& state) {
    const Grid& grid = state.grid();
    const int n = grid.dim;
    const int nsym = component_count(Rank::SymTensor, n);

    SpectralField u = dealias(state.u);
    SpectralField tau = dealias(state.tau);

    std::vector<ArrayXr> u_p = physical(u);
    std::vector<ArrayXr> grad_p = physical(jacobian(u));
    std::vector<ArrayXr> tau_p = physical(tau);

    Real umax = 0;
    for (int a = 0; a < n; ++a) umax = std::max(umax, u_p[a].abs().maxCoeff());

    // -u.grad u
    std::vector<ArrayXr> adv_u(n);
    for (int i = 0; i < n; ++i) {
        adv_u[i] = ArrayXr::Zero(grid.size());
        for (int a = 0; a < n; ++a) adv_u[i] -= u_p[a] * grad_p[i * n + a];
    }

    // -u.grad tau - F(tau, grad u)
    std::vector<ArrayXr> dtau_p(nsym);
    stress_kernel(tau_p, grad_p, state.b, n, dtau_p);
    const auto& t = tables(grid);
    for (int c = 0; c < nsym; ++c) {
        dtau_p[c] = -dtau_p[c];
        SpectralField dc(grid, Rank::Scalar);
        for (int a = 0; a < n; ++a) {
            dc.comp(0) = Complex(0, 1) * t.kcomp[a] * tau.comp(c);
            dtau_p[c] -= u_p[a] * transform_inverse_component(dc, 0);
        }
    }

    Rhs out{SpectralField(grid, Rank::Vector), SpectralField(grid, Rank::SymTensor)};
    SpectralField adv = transform_forward(grid, std::span<const ArrayXr>(adv_u), Rank::Vector);
    SpectralField divtau = divergence(tau);
    for (int a = 0; a < n; ++a) adv.comp(a) += divtau.comp(a);
    out.du = leray_project(adv);

    out.dtau = transform_forward(grid, std::span<const ArrayXr>(dtau_p), Rank::SymTensor);
    SpectralField d = sym_grad(u);
    for (int c = 0; c < nsym; ++c) out.dtau.comp(c) += d.comp(c);

    dealias_in_place(out.du);
    dealias_in_place(out.dtau);
    set_mean_zero(out.du);
    set_mean_zero(out.dtau);
    return {std::move(out), umax};
}

void scale_u(SpectralField& u, const ArrayXr& factor) {
    for (int a = 0; a < u.components(); ++a) u.comp(a) *= factor;
}

void axpy(SpectralField& y, Real a, const SpectralField& x) {
    for (int c = 0; c < y.components(); ++c) y.comp(c) += a * x.comp(c);
}

void post_substep(SolverState& s) {
    s.u = leray_project(s.u);
    enforce_reality(s.u);
    enforce_reality(s.tau);
    set_mean_zero(s.u);
    set_mean_zero(s.tau);
}

}  // namespace

SpectralField nonlinear_F(const SpectralField& tau, const SpectralField& u, Real b) {
    const Grid& grid = tau.grid();
    const int n = grid.dim;
    std::vector<ArrayXr> tau_p = physical(dealias(tau));
    std::vector<ArrayXr> grad_p = physical(jacobian(dealias(u)));
    std::vector<ArrayXr> f_p(component_count(Rank::SymTensor, n),
                             ArrayXr::Zero(grid.size()));
    stress_kernel(tau_p, grad_p, b, n, f_p);
    SpectralField f = transform_forward(grid, std::span<const ArrayXr>(f_p), Rank::SymTensor);
    dealias_in_place(f);
    return f;
}

Rhs rhs(const SolverState& state) { return rhs_impl(state).rhs; }

SolverState step(const SolverState& state, const StepControl& control) {
    if (!(control.dt > 0)) throw std::invalid_argument("step: dt must be positive");
    if (control.order != 2 && control.order != 3)
        throw std::invalid_argument("step: scheme order must be 2 or 3");
    const Grid& grid = state.grid();

    // CFL: dt_sub * umax * N / L <= cfl
    Real umax = 0;
    for (int a = 0; a < grid.dim; ++a)
        umax = std::max(umax, transform_inverse_component(state.u, a).abs().maxCoeff());
    int substeps = 1;
    if (umax > 0 && control.cfl > 0) {
        const Real dt_cfl = control.cfl * grid.length / (grid.points * umax);
        substeps = std::max(1, static_cast<int>(std::ceil(control.dt / dt_cfl)));
    }
    const Real h = control.dt / substeps;

    const auto& t = tables(grid);
    const ArrayXr e_full = (-t.ksq * h).exp();
    const ArrayXr e_half = (-t.ksq * (h / 2)).exp();

    SolverState s = state;
    for (int sub = 0; sub < substeps; ++sub) {
        const RhsData k1 = rhs_impl(s);
        if (control.order == 2) {
            SolverState mid = s;
            axpy(mid.u, h, k1.rhs.du);
            scale_u(mid.u, e_full);
            axpy(mid.tau, h, k1.rhs.dtau);
            const RhsData k2 = rhs_impl(mid);

            scale_u(s.u, e_full);
            for (int a = 0; a < s.u.components(); ++a)
                s.u.comp(a) += (h / 2) * (e_full * k1.rhs.du.comp(a) + k2.rhs.du.comp(a));
            for (int c = 0; c < s.tau.components(); ++c)
                s.tau.comp(c) += (h / 2) * (k1.rhs.dtau.comp(c) + k2.rhs.dtau.comp(c));
        } else {
            SolverState sa = s;
            axpy(sa.u, h / 2, k1.rhs.du);
            scale_u(sa.u, e_half);
            axpy(sa.tau, h / 2, k1.rhs.dtau);
            const RhsData k2 = rhs_impl(sa);

            SolverState sb = s;
            scale_u(sb.u, e_full);
            for (int a = 0; a < sb.u.components(); ++a)
                sb.u.comp(a) += h * (-e_full * k1.rhs.du.comp(a) + 2.0 * e_half * k2.rhs.du.comp(a));
            for (int c = 0; c < sb.tau.components(); ++c)
                sb.tau.comp(c) += h * (-k1.rhs.dtau.comp(c) + 2.0 * k2.rhs.dtau.comp(c));
            const RhsData k3 = rhs_impl(sb);

            scale_u(s.u, e_full);
            for (int a = 0; a < s.u.components(); ++a)
                s.u.comp(a) += (h / 6) * (e_full * k1.rhs.du.comp(a) +
                                          4.0 * e_half * k2.rhs.du.comp(a) + k3.rhs.du.comp(a));
            for (int c = 0; c < s.tau.components(); ++c)
                s.tau.comp(c) += (h / 6) * (k1.rhs.dtau.comp(c) + 4.0 * k2.rhs.dtau.comp(c) +
                                            k3.rhs.dtau.comp(c));
        }
        post_substep(s);
        if (control.dealias) {
            dealias_in_place(s.u);
            dealias_in_place(s.tau);
        }
        if (!s.u.all_finite() || !s.tau.all_finite()) throw BlowupError(s.t);
        s.t += h;
    }
    s.t = state.t + control.dt;
    return s;
}

DiagnosticsRecord diagnostics(const SolverState& state, const DiagnosticsSpec& spec,
                              const DyadicPartition& part) {
    const int n = state.grid().dim;
    DiagnosticsRecord rec;
    rec.t = state.t;

    const Real nu = l2_norm(state.u);
    const Real ntau = l2_norm(state.tau);
    rec.energy = 0.5 * (nu * nu + ntau * ntau);
    rec.dissipation = h1_seminorm_sq(state.u);

    Real coeff_scale = 0;
    for (int a = 0; a < n; ++a) coeff_scale += state.u.comp(a).abs2().sum();
    coeff_scale = std::sqrt(coeff_scale);
    rec.div_residual = coeff_scale > 0 ? divergence_residual(state.u) / coeff_scale : 0.0;
    rec.sym_residual = std::max(reality_residual(state.u), reality_residual(state.tau));

    SpectralField gamma = gamma_from_tau(state.tau);
    for (auto [alpha, q] : spec.alpha_q) {
        rec.u_norms.push_back(lambda_lq_norm(state.u, alpha, q));
        rec.gamma_norms.push_back(lambda_lq_norm(gamma, alpha, q));
    }

    const std::array<const SpectralField*, 2> ugamma{&state.u, &gamma};
    const std::array<const SpectralField*, 2> utau{&state.u, &state.tau};
    rec.besov_low = besov_norm(ugamma, part, {n / 2.0 - 1.0, 2.0, BesovSide::Low});
    rec.besov_high_u = besov_norm(state.u, part, {n / spec.p - 1.0, spec.p, BesovSide::High});
    rec.besov_high_gamma = besov_norm(gamma, part, {n / spec.p, spec.p, BesovSide::High});
    rec.besov_negs = besov_norm(utau, part, {-spec.s, 2.0, BesovSide::Full});
    return rec;
}

SolverState make_decay_initial_data(const Grid& grid, const InitialDataParams& params, Real b) {
    using detail::splitmix64;
    using detail::uniform01;
    SolverState state(grid, b);
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
        if (r <= 0 || r > params.r_cut) continue;

        // fill canonical representatives; the mirror mode gets the conjugate
        int first_sign = 0;
        bool self_conjugate = true;
        std::uint64_t h = params.seed;
        for (int a = 0; a < n; ++a) {
            const int mm = grid.symmetric_index(m[a]);
            if (mm != 0 && first_sign == 0) first_sign = mm > 0 ? 1 : -1;
            if (mm != 0 && mm != N / 2) self_conjugate = false;
            h = splitmix64(h ^ splitmix64(static_cast<std::uint64_t>(mm + (1 << 20))));
        }
        if (first_sign < 0) continue;
        const Eigen::Index cidx = t.conj_index(idx);
        const Real amp = params.amplitude * std::pow(r, params.theta);

        // solenoidal direction
        Eigen::Vector3d k{t.kcomp[0](idx), t.kcomp[1](idx), n == 3 ? t.kcomp[2](idx) : 0.0};
        Eigen::Vector3d e1, e2;
        if (n == 2) {
            e1 = Eigen::Vector3d(-k.y(), k.x(), 0.0) / r;
            e2.setZero();
        } else {
            Eigen::Vector3d axis = std::abs(k.x()) <= std::abs(k.y()) &&
                                           std::abs(k.x()) <= std::abs(k.z())
                                       ? Eigen::Vector3d::UnitX()
                                       : (std::abs(k.y()) <= std::abs(k.z())
                                              ? Eigen::Vector3d::UnitY()
                                              : Eigen::Vector3d::UnitZ());
            e1 = k.cross(axis).normalized();
            e2 = k.cross(e1).normalized();
        }

        auto draw_direction = [&](std::uint64_t& hh) {
            if (n == 2) return e1;
            hh = splitmix64(hh);
            const Real psi = 2.0 * pi * uniform01(hh);
            return (std::cos(psi) * e1 + std::sin(psi) * e2).eval();
        };
        auto draw_phase = [&](std::uint64_t& hh) {
            hh = splitmix64(hh);
            if (self_conjugate) return Complex(uniform01(hh) < 0.5 ? -1.0 : 1.0, 0.0);
            const Real phase = 2.0 * pi * uniform01(hh);
            return Complex(std::cos(phase), std::sin(phase));
        };

        const Eigen::Vector3d eu = draw_direction(h);
        const Complex cu = amp * draw_phase(h);
        for (int a = 0; a < n; ++a) {
            state.u.comp(a)(idx) = cu * eu(a);
            state.u.comp(a)(cidx) = std::conj(cu * eu(a));
        }

        if (params.tau_factor > 0) {
            const Eigen::Vector3d eg = draw_direction(h);
            const Complex cg = params.tau_factor * amp * draw_phase(h);
            // tau = -i (k g^T + g k^T)/|k| has Gamma = Lambda^-1 P div tau = g
            for (int i = 0; i < n; ++i) {
                for (int j = i; j < n; ++j) {
                    const Complex gij = Complex(0, -1) * cg * (k(i) * eg(j) + eg(i) * k(j)) / r;
                    state.tau.sym(i, j)(idx) = gij;
                    state.tau.sym(i, j)(cidx) = std::conj(gij);
                }
            }
        }
    }
    dealias_in_place(state.u);
    dealias_in_place(state.tau);
    return state;
}

Real smallness_x0(const SolverState& state, const DyadicPartition& part, Real p) {
    const int n = state.grid().dim;
    const std::array<const SpectralField*, 2> utau{&state.u, &state.tau};
    return besov_norm(utau, part, {n / 2.0 - 1.0, 2.0, BesovSide::Low}) +
           besov_norm(state.u, part, {n / p - 1.0, p, BesovSide::High}) +
           besov_norm(state.tau, part, {n / p, p, BesovSide::High});
}

Real lyapunov_functional(const SolverState& state, const DyadicPartition& part, Real p) {
    const int n = state.grid().dim;
    SpectralField gamma = gamma_from_tau(state.tau);
    const std::array<const SpectralField*, 2> ugamma{&state.u, &gamma};
    return besov_norm(ugamma, part, {n / 2.0 - 1.0, 2.0, BesovSide::Low}) +
           besov_norm(state.u, part, {n / p - 1.0, p, BesovSide::High}) +
           besov_norm(gamma, part, {n / p, p, BesovSide::High});
}

SpectralField pressure_field(const SolverState& state) {
    const Grid& grid = state.grid();
    const int n = grid.dim;
    SpectralField u = dealias(state.u);
    std::vector<ArrayXr> u_p = physical(u);
    std::vector<ArrayXr> grad_p = physical(jacobian(u));
    std::vector<ArrayXr> adv(n);
    for (int i = 0; i < n; ++i) {
        adv[i] = ArrayXr::Zero(grid.size());
        for (int a = 0; a < n; ++a) adv[i] += u_p[a] * grad_p[i * n + a];
    }
    SpectralField w = transform_forward(grid, std::span<const ArrayXr>(adv), Rank::Vector);
    SpectralField divtau = divergence(dealias(state.tau));
    for (int a = 0; a < n; ++a) w.comp(a) -= divtau.comp(a);

    // -Lap p = div w  =>  p = i k.w / |k|^2
    const auto& t = tables(grid);
    SpectralField p(grid, Rank::Scalar);
    ArrayXc kdotw = ArrayXc::Zero(w.comp(0).size());
    for (int a = 0; a < n; ++a) kdotw += t.kcomp[a] * w.comp(a);
    p.comp(0) = Complex(0, 1) * kdotw * t.inv_ksq;
    dealias_in_place(p);
    return p;
}

namespace {

void put_u32(std::ostream& os, std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    os.write(reinterpret_cast<const char*>(b), 4);
}

void put_f64(std::ostream& os, Real v) {
    std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((bits >> (8 * i)) & 0xff);
    os.write(reinterpret_cast<const char*>(b), 8);
}

std::uint32_t get_u32(std::istream& is) {
    unsigned char b[4];
    is.read(reinterpret_cast<char*>(b), 4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
}

Real get_f64(std::istream& is) {
    unsigned char b[8];
    is.read(reinterpret_cast<char*>(b), 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return std::bit_cast<Real>(v);
}

constexpr std::uint32_t kCheckpointVersion = 1;

}  // namespace

void save_checkpoint(const std::string& path, const SolverState& state) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("save_checkpoint: cannot open " + path);
    os.write("OLDB", 4);
    put_u32(os, kCheckpointVersion);
    put_u32(os, static_cast<std::uint32_t>(state.grid().dim));
    put_u32(os, static_cast<std::uint32_t>(state.grid().points));
    put_f64(os, state.grid().length);
    put_f64(os, state.t);
    put_f64(os, state.b);
    auto write_field = [&](const SpectralField& f) {
        for (int c = 0; c < f.components(); ++c)
            for (Eigen::Index i = 0; i < f.comp(c).size(); ++i) {
                put_f64(os, f.comp(c)(i).real());
                put_f64(os, f.comp(c)(i).imag());
            }
    };
    write_field(state.u);
    write_field(state.tau);
    if (!os) throw std::runtime_error("save_checkpoint: write failed for " + path);
}

SolverState load_checkpoint(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("load_checkpoint: cannot open " + path);
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, "OLDB", 4) != 0)
        throw std::runtime_error("load_checkpoint: bad magic in " + path);
    const std::uint32_t version = get_u32(is);
    if (version != kCheckpointVersion)
        throw std::runtime_error("load_checkpoint: unsupported version in " + path);
    const int n = static_cast<int>(get_u32(is));
    const int N = static_cast<int>(get_u32(is));
    const Real L = get_f64(is);
    const Real t = get_f64(is);
    const Real b = get_f64(is);
    Grid grid(n, N, L);
    SolverState state(grid, b);
    state.t = t;
    auto read_field = [&](SpectralField& f) {
        for (int c = 0; c < f.components(); ++c)
            for (Eigen::Index i = 0; i < f.comp(c).size(); ++i) {
                const Real re = get_f64(is);
                const Real im = get_f64(is);
                f.comp(c)(i) = Complex(re, im);
            }
    };
    read_field(state.u);
    read_field(state.tau);
    if (!is) throw std::runtime_error("load_checkpoint: truncated file " + path);
    return state;
}

}  // namespace oldb
