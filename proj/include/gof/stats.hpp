#pragma once

// Test statistics: Kuiper's U on X, Kuiper's V on p(X), W = n min P(p(X_k)),
// the average W-tilde and generalized averages, with significance levels.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "gof/density.hpp"
#include "gof/error.hpp"
#include "gof/rearranged.hpp"

namespace gof {

struct KuiperResult {
    double statistic = 0.0; ///< sqrt(n) (max(d_plus,0) + max(d_minus,0))
    double d_plus = 0.0;
    double d_minus = 0.0;
    std::size_t n = 0;
    double log10_pvalue = 0.0;
};

struct WResult {
    double w = 0.0;
    std::size_t n = 0;
    std::size_t min_index = 0; ///< index into the draws as given
    double confidence_lower_bound = 0.0;
};

/// Asymptotic Kuiper tail, log10 of Pr{statistic >= observed}.
inline double kuiper_log10_pvalue(double statistic, std::size_t n) {
    if (!(statistic >= 0.0)) throw DomainError("kuiper_log10_pvalue: statistic must be nonnegative");
    if (n == 0) throw DomainError("kuiper_log10_pvalue: n must be at least 1");
    const double rn = std::sqrt(static_cast<double>(n));
    const double lambda = statistic * (1.0 + 0.155 / rn + 0.24 / static_cast<double>(n));
    if (lambda < 0.4) return 0.0;
    const double l2 = lambda * lambda;
    if (lambda < 1.0) {
        double q = 0.0;
        for (int j = 1; j <= 100; ++j) {
            const double jj = static_cast<double>(j) * j;
            const double term = (4.0 * jj * l2 - 1.0) * std::exp(-2.0 * jj * l2);
            q += term;
            if (std::abs(term) < 1e-18 * std::abs(q)) break;
        }
        q *= 2.0;
        return q >= 1.0 ? 0.0 : std::log10(q);
    }
    // factor out the leading exponential so nothing underflows
    double s = 0.0;
    for (int j = 1; j <= 100; ++j) {
        const double jj = static_cast<double>(j) * j;
        const double term = (4.0 * jj * l2 - 1.0) * std::exp(-2.0 * (jj - 1.0) * l2);
        s += term;
        if (term < 1e-18 * s) break;
    }
    return std::min(0.0, std::log10(2.0 * s) - 2.0 * l2 / std::numbers::ln10);
}

namespace detail {

inline void require_draws(const SampleSet& s, const char* who) {
    if (s.draws.empty()) throw DomainError(std::string(who) + ": empty sample");
}

// Kuiper statistic from per-order-statistic values. below[k] is the
// theoretical distribution function just left of the k-th smallest point,
// at[k] its value at that point; both sorted by point.
inline KuiperResult kuiper_from_sorted(const std::vector<double>& below, const std::vector<double>& at) {
    const std::size_t n = at.size();
    const double dn = static_cast<double>(n);
    KuiperResult r;
    r.n = n;
    r.d_plus = -std::numeric_limits<double>::infinity();
    r.d_minus = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < n; ++k) {
        r.d_plus = std::max(r.d_plus, below[k] - static_cast<double>(k) / dn);
        r.d_minus = std::max(r.d_minus, static_cast<double>(k + 1) / dn - at[k]);
    }
    r.statistic = std::sqrt(dn) * (std::max(r.d_plus, 0.0) + std::max(r.d_minus, 0.0));
    r.log10_pvalue = kuiper_log10_pvalue(r.statistic, n);
    return r;
}

} // namespace detail

/// Kuiper's U of the draws against the CDF P.
inline KuiperResult kuiper_u(const SampleSet& s, const Cdf& P) {
    detail::require_draws(s, "kuiper_u");
    std::vector<double> x = s.draws;
    std::sort(x.begin(), x.end());
    std::vector<double> u(x.size());
    std::transform(x.begin(), x.end(), u.begin(), [&](double v) { return P(v); });
    return detail::kuiper_from_sorted(u, u);
}

/// Kuiper's V: U applied to p(X_k) against the distribution function of p(X).
/// One-sided values at atoms keep the supremum exact.
inline KuiperResult kuiper_v(const SampleSet& s, const Density& d, const RearrangedDF& r) {
    detail::require_draws(s, "kuiper_v");
    std::vector<double> t(s.draws.size());
    std::transform(s.draws.begin(), s.draws.end(), t.begin(), [&](double x) { return d(x); });
    std::sort(t.begin(), t.end());
    std::vector<double> below(t.size()), at(t.size());
    for (std::size_t k = 0; k < t.size(); ++k) {
        below[k] = r.left_limit(t[k]);
        at[k] = r(t[k]);
    }
    return detail::kuiper_from_sorted(below, at);
}

/// P(p(X_k)) for each draw, in the order given.
inline std::vector<double> transformed_values(const SampleSet& s, const Density& d, const RearrangedDF& r) {
    std::vector<double> v(s.draws.size());
    std::transform(s.draws.begin(), s.draws.end(), v.begin(), [&](double x) { return r(d(x)); });
    return v;
}

inline WResult w_statistic(const SampleSet& s, const Density& d, const RearrangedDF& r) {
    detail::require_draws(s, "w_statistic");
    const auto v = transformed_values(s, d, r);
    const auto it = std::min_element(v.begin(), v.end());
    WResult res;
    res.n = v.size();
    res.min_index = static_cast<std::size_t>(it - v.begin());
    res.w = static_cast<double>(res.n) * *it;
    res.confidence_lower_bound = res.w <= 1.0 ? std::max(0.0, 1.0 - res.w) : 0.0;
    return res;
}

/// Upper bound 1 - (1 - x/n)^n on Pr{W <= x} under the null.
inline double w_tail_bound(double x, std::size_t n) {
    const double dn = static_cast<double>(n);
    if (n == 0) throw DomainError("w_tail_bound: n must be at least 1");
    if (!(x >= 0.0 && x <= dn)) throw DomainError("w_tail_bound: x must lie in [0, n]");
    return -std::expm1(dn * std::log1p(-x / dn));
}

/// x_alpha = n - n (1 - alpha)^(1/n), the level-alpha rejection threshold for W.
inline double w_threshold(double alpha, std::size_t n) {
    if (!(alpha > 0.0 && alpha < 0.5)) throw DomainError("w_threshold: alpha must lie in (0, 1/2)");
    if (n == 0) throw DomainError("w_threshold: n must be at least 1");
    if (n == 1) return alpha;
    const double dn = static_cast<double>(n);
    return -dn * std::expm1(std::log1p(-alpha) / dn);
}

/// f((1/n) sum g(P(p(X_k)))).
inline double generalized_average(const SampleSet& s, const Density& d, const RearrangedDF& r,
                                  const std::function<double(double)>& f, const std::function<double(double)>& g) {
    detail::require_draws(s, "generalized_average");
    const auto v = transformed_values(s, d, r);
    double sum = 0.0;
    for (std::size_t k = 0; k < v.size(); ++k) {
        const double gv = g(v[k]);
        if (!std::isfinite(gv)) {
            std::ostringstream os;
            os.precision(17);
            os << "generalized_average: g is not finite at draw " << k << " (x = " << s.draws[k]
               << ", value " << v[k] << ")";
            throw NumericalError(os.str());
        }
        sum += gv;
    }
    return f(sum / static_cast<double>(v.size()));
}

/// Plain average of P(p(X_k)).
inline double w_tilde(const SampleSet& s, const Density& d, const RearrangedDF& r) {
    detail::require_draws(s, "w_tilde");
    const auto v = transformed_values(s, d, r);
    double sum = 0.0;
    for (double x : v) sum += x;
    return sum / static_cast<double>(v.size());
}

using ScalarMap = std::function<double(double)>;

/// f = exp, g = ln: the geometric mean.
inline std::pair<ScalarMap, ScalarMap> geometric_pair() {
    return {[](double x) { return std::exp(x); }, [](double x) { return std::log(x); }};
}

/// f(x) = 1 - x^(1/q), g(x) = (1 - x)^q.
inline std::pair<ScalarMap, ScalarMap> power_pair(double q) {
    if (!(q > 0.0)) throw DomainError("power_pair: q must be positive");
    return {[q](double x) { return 1.0 - std::pow(x, 1.0 / q); }, [q](double x) { return std::pow(1.0 - x, q); }};
}

struct TestReport {
    std::optional<KuiperResult> u;
    std::optional<KuiperResult> v;
    std::optional<WResult> w;
    std::optional<double> w_tilde;
    std::uint64_t seed = 0;
    std::string source;
    std::string generator;
    std::string density;
    std::vector<std::string> warnings;

    bool empty() const noexcept { return !u && !v && !w && !w_tilde; }

    /// One `key=value` per line.
    std::string to_key_value() const {
        std::ostringstream os;
        os.precision(17);
        os << "density=" << density << "\nsource=" << source << "\nseed=" << seed << "\ngenerator=" << generator
           << "\n";
        auto kuiper = [&](const char* tag, const KuiperResult& k) {
            os << tag << ".statistic=" << k.statistic << "\n"
               << tag << ".d_plus=" << k.d_plus << "\n"
               << tag << ".d_minus=" << k.d_minus << "\n"
               << tag << ".n=" << k.n << "\n"
               << tag << ".log10_pvalue=" << k.log10_pvalue << "\n";
        };
        if (u) kuiper("u", *u);
        if (v) kuiper("v", *v);
        if (w)
            os << "w.value=" << w->w << "\nw.n=" << w->n << "\nw.min_index=" << w->min_index
               << "\nw.confidence_lower_bound=" << w->confidence_lower_bound << "\n";
        if (w_tilde) os << "wtilde.value=" << *w_tilde << "\n";
        return os.str();
    }

    static std::string csv_header() {
        return "density,source,seed,n,u,u_log10_p,v,v_log10_p,w,w_confidence,wtilde";
    }

    /// Absent statistics leave their cells empty.
    std::string csv_row() const {
        std::ostringstream os;
        os.precision(17);
        std::size_t n = u ? u->n : v ? v->n : w ? w->n : 0;
        os << density << ',' << source << ',' << seed << ',' << n << ',';
        if (u) os << u->statistic << ',' << u->log10_pvalue;
        else os << ',';
        os << ',';
        if (v) os << v->statistic << ',' << v->log10_pvalue;
        else os << ',';
        os << ',';
        if (w) os << w->w << ',' << w->confidence_lower_bound;
        else os << ',';
        os << ',';
        if (w_tilde) os << *w_tilde;
        return os.str();
    }
};

} // namespace gof
