#ifndef OLDB_FITTING_HPP
#define OLDB_FITTING_HPP

#include <span>
#include <vector>

#include "oldb/field.hpp"

namespace oldb {

struct SeriesPoint {
    Real t;
    Real value;
};

struct FitWindow {
    Real lo;
    Real hi;
};

/// Ordinary least squares of log(value) against log(1+t) over the window.
/// slope < 0 means decay; target_rate/theory_rate store positive exponents.
struct DecayFit {
    Real slope = 0;
    Real intercept = 0;
    Real stderr_slope = 0;
    std::size_t count = 0;
    FitWindow window{0, 0};
    Real theory_rate = 0;   // reference exponent of the sharp-index formula
    Real target_rate = 0;   // exponent the verdict compares |slope| against
    Real tolerance = 0;
    bool has_verdict = false;
    bool pass = false;
};

/// Requires at least 8 in-window samples with strictly positive values;
/// throws std::invalid_argument ("zero norm" / sample-count) otherwise.
DecayFit fit_decay(std::span<const SeriesPoint> series, const FitWindow& window);

DecayFit fit_decay_with_verdict(std::span<const SeriesPoint> series, const FitWindow& window,
                                Real target_rate, Real tolerance, Real theory_rate);

}  // namespace oldb

#endif
