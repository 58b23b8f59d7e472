#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

#include "gof/error.hpp"

namespace gof {

struct HybridRootStats {
    int bisections = 0;
    int newton_steps = 0;
    bool newton_converged = false;
};

/// Solves f(y) = target for y in [lo, hi], where f is monotone on the bracket
/// and target lies between f(lo) and f(hi).
///
/// Schedule: 10 bisection steps, then up to 5 Newton steps started from the
/// midpoint of the current bracket. A Newton iterate that leaves the bracket,
/// or 5 steps that do not bring |f(y) - target| within ten machine epsilons of
/// the problem scale, send the solver back to plain bisection, which runs until
/// the bracket is 2^-51 of its original width.
template <class F, class DF>
double hybrid_root(F&& f, DF&& df, double lo, double hi, double target, HybridRootStats* stats = nullptr) {
    constexpr double eps = std::numeric_limits<double>::epsilon();
    if (!(lo <= hi)) throw DomainError("hybrid_root: empty bracket");

    double f_lo = f(lo) - target;
    double f_hi = f(hi) - target;
    if (f_lo == 0.0) return lo;
    if (f_hi == 0.0) return hi;
    if ((f_lo > 0.0) == (f_hi > 0.0)) throw DomainError("hybrid_root: target not bracketed");
    const bool increasing = f_hi > 0.0;
    const double scale = std::max({std::abs(target), std::abs(f_lo + target), std::abs(f_hi + target)});
    const double accuracy = 10.0 * eps * (scale > 0.0 ? scale : 1.0);
    const double min_width = std::ldexp(hi - lo, -51);

    HybridRootStats local;
    HybridRootStats& st = stats ? *stats : local;

    for (int i = 0; i < 10 && hi - lo > min_width; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid) - target;
        ++st.bisections;
        if (fm == 0.0) return mid;
        if ((fm > 0.0) == increasing)
            hi = mid;
        else
            lo = mid;
    }

    double y = 0.5 * (lo + hi);
    for (int step = 0; step < 5; ++step) {
        const double fy = f(y) - target;
        if (std::abs(fy) <= accuracy) {
            st.newton_converged = true;
            return y;
        }
        if ((fy > 0.0) == increasing)
            hi = std::min(hi, y);
        else
            lo = std::max(lo, y);
        const double slope = df(y);
        if (!(slope != 0.0) || !std::isfinite(slope)) break;
        const double next = y - fy / slope;
        ++st.newton_steps;
        if (!(next >= lo && next <= hi)) break;
        y = next;
    }
    if (std::abs(f(y) - target) <= accuracy && y >= lo && y <= hi) {
        st.newton_converged = true;
        return y;
    }

    while (hi - lo > min_width) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double fm = f(mid) - target;
        ++st.bisections;
        if (fm == 0.0) return mid;
        if ((fm > 0.0) == increasing)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace gof
