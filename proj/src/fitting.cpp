#include "oldb/fitting.hpp"

#include <cmath>
#include <stdexcept>

namespace oldb {

DecayFit fit_decay(std::span<const SeriesPoint> series, const FitWindow& window) {
    std::vector<Real> x, y;
    for (const auto& pt : series) {
        if (pt.t < window.lo || pt.t > window.hi) continue;
        if (!(pt.value > 0))
            throw std::invalid_argument("fit_decay: zero norm in fit window");
        x.push_back(std::log1p(pt.t));
        y.push_back(std::log(pt.value));
    }
    if (x.size() < 8)
        throw std::invalid_argument("fit_decay: fewer than 8 samples in fit window");

    const std::size_t m = x.size();
    Real xbar = 0, ybar = 0;
    for (std::size_t i = 0; i < m; ++i) {
        xbar += x[i];
        ybar += y[i];
    }
    xbar /= m;
    ybar /= m;
    Real sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < m; ++i) {
        sxx += (x[i] - xbar) * (x[i] - xbar);
        sxy += (x[i] - xbar) * (y[i] - ybar);
    }
    if (!(sxx > 0)) throw std::invalid_argument("fit_decay: degenerate time window");

    DecayFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = ybar - fit.slope * xbar;
    Real ss_res = 0;
    for (std::size_t i = 0; i < m; ++i) {
        const Real r = y[i] - fit.intercept - fit.slope * x[i];
        ss_res += r * r;
    }
    fit.stderr_slope = m > 2 ? std::sqrt(ss_res / ((m - 2) * sxx)) : 0.0;
    fit.count = m;
    fit.window = window;
    return fit;
}

DecayFit fit_decay_with_verdict(std::span<const SeriesPoint> series, const FitWindow& window,
                                Real target_rate, Real tolerance, Real theory_rate) {
    DecayFit fit = fit_decay(series, window);
    fit.target_rate = target_rate;
    fit.theory_rate = theory_rate;
    fit.tolerance = tolerance;
    fit.has_verdict = true;
    fit.pass = std::abs(fit.slope + target_rate) <= tolerance;
    return fit;
}

}  // namespace oldb
