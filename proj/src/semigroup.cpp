#include "oldb/semigroup.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace oldb {

namespace {

Real coupling(bool half) { return half ? 0.5 : 1.0; }

struct Propagator {
    Real cstar;  // exp(mu t) * cos/cosh factor
    Real sstar;  // exp(mu t) * sin/sinh factor, divided by the frequency
};

// exp(tA) = cstar * I + sstar * (A - mu I), mu = -r^2/2.
Propagator propagator(Real r, Real t, Real c) {
    const Real mu = -0.5 * r * r;
    const Real d = 0.25 * r * r * r * r - c * r * r;  // (lambda - mu)^2
    const Real y = d * t * t;

    if (std::abs(y) < 1e-6) {
        // series for cosh(sqrt(y)) and sinh(sqrt(y))/sqrt(y)
        const Real emu = std::exp(mu * t);
        const Real cosh_s = 1.0 + y / 2.0 + y * y / 24.0;
        const Real sinch = 1.0 + y / 6.0 + y * y / 120.0;
        return {emu * cosh_s, emu * t * sinch};
    }
    if (d < 0) {
        const Real omega = std::sqrt(-d);
        const Real emu = std::exp(mu * t);
        return {emu * std::cos(omega * t), emu * std::sin(omega * t) / omega};
    }
    const Real sigma = std::sqrt(d);
    const Real ep = std::exp((mu + sigma) * t);  // both exponents are <= 0
    const Real em = std::exp((mu - sigma) * t);
    Real sstar;
    if (2.0 * sigma * t < 1.0)
        sstar = em * std::expm1(2.0 * sigma * t) / (2.0 * sigma);
    else
        sstar = (ep - em) / (2.0 * sigma);
    return {0.5 * (ep + em), sstar};
}

}  // namespace

Eigen::Matrix2d symbol_matrix(Real r, bool half_coupling) {
    if (r < 0) throw std::invalid_argument("symbol_matrix: r >= 0 required");
    const Real c = coupling(half_coupling);
    Eigen::Matrix2d a;
    a << -r * r, r, -c * r, 0.0;
    return a;
}

EigenBranches eigen_branches(Real r, bool half_coupling) {
    if (r < 0) throw std::invalid_argument("eigen_branches: r >= 0 required");
    const Real c = coupling(half_coupling);
    const Real disc = r * r * r * r - 4.0 * c * r * r;
    const Real scale = std::max(r * r * r * r, Real(1));
    const Real mu = -0.5 * r * r;

    if (std::abs(disc) <= 1e-12 * scale)
        return {Complex(mu, 0), Complex(mu, 0), SpectralRegime::Degenerate};
    if (disc < 0) {
        const Real omega = 0.5 * std::sqrt(-disc);
        return {Complex(mu, omega), Complex(mu, -omega), SpectralRegime::Oscillatory};
    }
    // overdamped: small root without cancellation, large root by the product
    const Real lp = -2.0 * c / (1.0 + std::sqrt(1.0 - 4.0 * c / (r * r)));
    const Real lm = c * r * r / lp;
    return {Complex(lp, 0), Complex(lm, 0), SpectralRegime::Overdamped};
}

Eigen::Matrix2d semigroup_matrix(Real r, Real t, bool half_coupling) {
    if (r < 0) throw std::invalid_argument("semigroup_matrix: r >= 0 required");
    if (t < 0) throw std::invalid_argument("semigroup_matrix: t >= 0 required");
    const Real c = coupling(half_coupling);
    const auto [cstar, sstar] = propagator(r, t, c);
    Eigen::Matrix2d m;
    // A - mu I
    m << -0.5 * r * r, r, -c * r, 0.5 * r * r;
    m *= sstar;
    m(0, 0) += cstar;
    m(1, 1) += cstar;
    return m;
}

Mode2 semigroup_apply(Real r, Real t, const Mode2& state0, bool half_coupling) {
    const Eigen::Matrix2d m = semigroup_matrix(r, t, half_coupling);
    return {m(0, 0) * state0.u + m(0, 1) * state0.gamma,
            m(1, 0) * state0.u + m(1, 1) * state0.gamma};
}

RadialProfile::RadialProfile(Real theta_, Real r_cut_, Real amplitude_, int dim_,
                             Real gamma_amplitude_)
    : theta(theta_), r_cut(r_cut_), amplitude(amplitude_), dim(dim_),
      gamma_amplitude(gamma_amplitude_) {
    if (dim < 2) throw std::invalid_argument("RadialProfile: dim >= 2 required");
    if (!(r_cut > 0)) throw std::invalid_argument("RadialProfile: r_cut > 0 required");
    if (amplitude < 0 || gamma_amplitude < 0)
        throw std::invalid_argument("RadialProfile: amplitudes must be nonnegative");
}

namespace {

using gk15 = boost::math::quadrature::gauss_kronrod<Real, 15>;

// |exp(tA) (au, ag)|^2 with exp(tA) = cstar I + sstar (A - mu I).
Real mode_weight_sq(Real r, Real t, Real au, Real ag, Real c) {
    const auto [cstar, sstar] = propagator(r, t, c);
    const Real half_rsq = 0.5 * r * r;
    const Real wu = (cstar - sstar * half_rsq) * au + sstar * r * ag;
    const Real wg = -sstar * c * r * au + (cstar + sstar * half_rsq) * ag;
    return wu * wu + wg * wg;
}

}  // namespace

std::vector<DecayCurvePoint> l2_decay_curve(const RadialProfile& profile, Real alpha,
                                            std::span<const Real> times, bool half_coupling,
                                            Real rel_tol) {
    const int n = profile.dim;
    const Real theta = profile.theta;
    if (!(alpha + theta + n / 2.0 > 0))
        throw std::invalid_argument(
            "l2_decay_curve: integrability requires alpha + theta + n/2 > 0");

    const Real c = coupling(half_coupling);
    const Real sphere = n == 2 ? 2.0 * pi : 4.0 * pi;
    const Real power = 2.0 * (alpha + theta) + n - 1.0;
    const Real r_split = 2.0 * std::sqrt(c);
    const Real au = profile.amplitude;
    const Real ag = profile.gamma_amplitude;

    std::vector<DecayCurvePoint> out;
    out.reserve(times.size());
    for (Real t : times) {
        if (t < 0) throw std::invalid_argument("l2_decay_curve: times must be nonnegative");
        const Real stretch = std::sqrt(1.0 + t);
        Real total = 0, err_total = 0;

        // Oscillatory band in the self-similar variable x = r sqrt(1+t);
        // the integrand decays at least like exp(-x^2 t/(1+t)) there.
        const Real r1 = std::min(profile.r_cut, r_split);
        const Real x_hi = std::min(r1 * stretch, Real(16) + r1);
        auto integrand_x = [&](Real x) {
            const Real r = x / stretch;
            return std::pow(x, power) * mode_weight_sq(r, t, au, ag, c);
        };
        Real err1 = 0;
        Real part1 = gk15::integrate(integrand_x, 0.0, x_hi, 30, rel_tol, &err1);
        total += part1 / std::pow(stretch, power + 1.0);
        err_total += err1 / std::pow(stretch, power + 1.0);

        if (profile.r_cut > r_split) {
            auto integrand_r = [&](Real r) {
                return std::pow(r, power) * mode_weight_sq(r, t, au, ag, c);
            };
            Real err2 = 0;
            total += gk15::integrate(integrand_r, r_split, profile.r_cut, 30, rel_tol, &err2);
            err_total += err2;
        }

        const Real value = std::sqrt(std::max(total, Real(0)) * sphere);
        const Real err_value = value > 0 ? 0.5 * sphere * err_total / value : 0.0;
        out.push_back({t, value, err_value});
    }
    return out;
}

Real decay_rate_formula(int n, Real s, Real alpha, Real q) {
    if (std::isinf(q)) return n / 4.0 + (alpha + s) / 2.0;
    return n / 4.0 + ((alpha + s) * q - n) / (2.0 * q);
}

namespace {

[[noreturn]] void reject(const std::string& what) {
    throw std::invalid_argument("decay window violated: " + what);
}

}  // namespace

DecayPrediction predicted_rate(int n, Real s, Real alpha, Real q, Real p) {
    if (n < 2) reject("n >= 2");
    const Real p_max = n > 2 ? std::min(4.0, 2.0 * n / (n - 2.0)) : 4.0;
    if (!(p >= 2.0 && p <= p_max)) reject("2 <= p <= min(4, 2n/(n-2))");
    if (n == 2 && p == 4.0) reject("p != 4 when n = 2");
    if (!(s > n / 2.0 - 1.0 && s < n / p)) reject("n/2 - 1 < s < n/p");
    if (!(q >= p)) reject("p <= q");
    const Real nq = std::isinf(q) ? 0.0 : n / q;
    if (!(alpha > nq - n / p - s)) reject("alpha > n/q - n/p - s");
    if (!(alpha <= nq - 1.0)) reject("alpha <= n/q - 1");
    return {n, s, alpha, q, p, decay_rate_formula(n, s, alpha, q)};
}

}  // namespace oldb
