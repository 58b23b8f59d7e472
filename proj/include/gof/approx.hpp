#pragma once

// Piecewise Chebyshev representation of real functions on a closed interval:
// adaptive construction, evaluation, calculus, extrema and level-set roots.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>

#include "gof/error.hpp"
#include "gof/hybrid_root.hpp"

namespace gof {

struct Interval {
    double lo = 0.0;
    double hi = 1.0;

    Interval() = default;
    Interval(double lo_, double hi_) : lo(lo_), hi(hi_) {
        if (!(std::isfinite(lo) && std::isfinite(hi) && lo < hi)) {
            std::ostringstream os;
            os << "invalid interval [" << lo << ", " << hi << "]";
            throw DomainError(os.str());
        }
    }

    double width() const noexcept { return hi - lo; }
    double mid() const noexcept { return 0.5 * (lo + hi); }
    bool contains(double x) const noexcept { return x >= lo && x <= hi; }
    friend bool operator==(const Interval&, const Interval&) = default;
};

namespace detail {

// Chebyshev points of the first kind on [-1, 1], descending order.
inline std::vector<double> cheb_points_first_kind(std::size_t count) {
    std::vector<double> x(count);
    const double n = static_cast<double>(count);
    for (std::size_t j = 0; j < count; ++j) {
        // sin form keeps the grid exactly antisymmetric
        x[j] = std::sin(std::numbers::pi * (n - 1.0 - 2.0 * static_cast<double>(j)) / (2.0 * n));
    }
    return x;
}

// Values at first-kind points -> coefficients of sum_k c_k T_k (DCT-II).
inline std::vector<double> values_to_coeffs(std::span<const double> values) {
    const std::size_t n = values.size();
    std::vector<double> c(n, 0.0);
    const double nn = static_cast<double>(n);
    for (std::size_t k = 0; k < n; ++k) {
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            // angle reduced modulo 4n half-steps for accuracy
            const std::size_t m = (k * (2 * j + 1)) % (4 * n);
            acc += values[j] * std::cos(std::numbers::pi * static_cast<double>(m) / (2.0 * nn));
        }
        c[k] = 2.0 * acc / nn;
    }
    c[0] *= 0.5;
    return c;
}

inline double clenshaw(std::span<const double> c, double t) noexcept {
    double b1 = 0.0, b2 = 0.0;
    const double t2 = 2.0 * t;
    for (std::size_t k = c.size(); k-- > 1;) {
        const double b0 = c[k] + t2 * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    return c.empty() ? 0.0 : c[0] + t * b1 - b2;
}

} // namespace detail

/// One polynomial piece: sum_k c_k T_k(t), t the affine image of x in [-1, 1].
class ChebPiece {
public:
    ChebPiece(Interval iv, std::vector<double> coeffs) : iv_(iv), c_(std::move(coeffs)) {
        if (c_.empty()) c_.push_back(0.0);
        for (double v : c_)
            if (!std::isfinite(v)) throw NumericalError("non-finite Chebyshev coefficient");
    }

    /// Interpolates `f` at `degree + 1` first-kind points of `iv`.
    template <class F>
    static ChebPiece interpolate(F&& f, Interval iv, std::size_t degree) {
        const auto t = detail::cheb_points_first_kind(degree + 1);
        std::vector<double> v(t.size());
        for (std::size_t j = 0; j < t.size(); ++j) v[j] = f(iv.mid() + 0.5 * iv.width() * t[j]);
        return ChebPiece(iv, detail::values_to_coeffs(v));
    }

    const Interval& interval() const noexcept { return iv_; }
    std::span<const double> coefficients() const noexcept { return c_; }
    std::size_t degree() const noexcept { return c_.size() - 1; }

    double to_local(double x) const noexcept {
        return std::clamp((2.0 * x - (iv_.lo + iv_.hi)) / iv_.width(), -1.0, 1.0);
    }

    double operator()(double x) const noexcept { return detail::clenshaw(c_, to_local(x)); }

    double left_value() const noexcept {
        double s = 0.0, sign = 1.0;
        for (double v : c_) {
            s += sign * v;
            sign = -sign;
        }
        return s;
    }

    double right_value() const noexcept {
        double s = 0.0;
        for (double v : c_) s += v;
        return s;
    }

    ChebPiece derivative() const {
        const std::size_t n = degree();
        if (n == 0) return ChebPiece(iv_, {0.0});
        std::vector<double> d(n, 0.0);
        // d_{k-1} = d_{k+1} + 2k c_k, then halve d_0
        for (std::size_t k = n; k >= 1; --k) {
            const double next = (k + 1 < n) ? d[k + 1] : 0.0;
            d[k - 1] = next + 2.0 * static_cast<double>(k) * c_[k];
        }
        d[0] *= 0.5;
        const double scale = 2.0 / iv_.width();
        for (double& v : d) v *= scale;
        return ChebPiece(iv_, std::move(d));
    }

    /// Antiderivative vanishing at the left end of the piece.
    ChebPiece antiderivative() const {
        const std::size_t n = degree();
        std::vector<double> b(n + 2, 0.0);
        auto c = [&](std::size_t k) { return k <= n ? c_[k] : 0.0; };
        b[1] = c(0) - 0.5 * c(2);
        for (std::size_t k = 2; k <= n + 1; ++k)
            b[k] = (c(k - 1) - c(k + 1)) / (2.0 * static_cast<double>(k));
        const double half = 0.5 * iv_.width();
        double alt = 0.0, sign = -1.0;
        for (std::size_t k = 1; k < b.size(); ++k) {
            b[k] *= half;
            alt += sign * b[k];
            sign = -sign;
        }
        b[0] = -alt;
        return ChebPiece(iv_, std::move(b));
    }

    double integral() const noexcept {
        double s = 0.0;
        for (std::size_t k = 0; k < c_.size(); k += 2) s += c_[k] * 2.0 / (1.0 - static_cast<double>(k * k));
        return 0.5 * iv_.width() * s;
    }

    /// Same polynomial, re-expanded on a subinterval.
    ChebPiece restrict_to(Interval sub) const {
        return interpolate([this](double x) { return (*this)(x); }, sub, degree());
    }

    ChebPiece plus_constant(double k) const {
        auto c = c_;
        c[0] += k;
        return ChebPiece(iv_, std::move(c));
    }

    double max_abs_coefficient() const noexcept {
        double m = 0.0;
        for (double v : c_) m = std::max(m, std::abs(v));
        return m;
    }

private:
    Interval iv_;
    std::vector<double> c_;
};

/// Pieces tiling a closed interval. Evaluation is right-continuous at interior
/// breakpoints; the right end of the domain belongs to the last piece.
class PiecewiseFn {
public:
    explicit PiecewiseFn(std::vector<ChebPiece> pieces) : pieces_(std::move(pieces)) {
        if (pieces_.empty()) throw DomainError("PiecewiseFn needs at least one piece");
        breaks_.reserve(pieces_.size() + 1);
        breaks_.push_back(pieces_.front().interval().lo);
        for (std::size_t i = 0; i < pieces_.size(); ++i) {
            const auto& iv = pieces_[i].interval();
            if (iv.lo != breaks_.back()) throw DomainError("PiecewiseFn pieces do not tile the domain");
            breaks_.push_back(iv.hi);
        }
    }

    Interval domain() const { return {breaks_.front(), breaks_.back()}; }
    std::span<const ChebPiece> pieces() const noexcept { return pieces_; }
    std::span<const double> breakpoints() const noexcept { return breaks_; }

    /// Index of the piece used to evaluate at x (right-continuous).
    std::size_t piece_index(double x) const {
        check_in_domain(x);
        auto it = std::upper_bound(breaks_.begin(), breaks_.end(), x);
        std::size_t i = static_cast<std::size_t>(it - breaks_.begin());
        i = i == 0 ? 0 : i - 1;
        return std::min(i, pieces_.size() - 1);
    }

    double operator()(double x) const { return pieces_[piece_index(x)](x); }

    /// Limit from the left; at the left end of the domain, the value there.
    double left_limit(double x) const {
        check_in_domain(x);
        auto it = std::lower_bound(breaks_.begin(), breaks_.end(), x);
        std::size_t i = static_cast<std::size_t>(it - breaks_.begin());
        i = i == 0 ? 0 : i - 1;
        return pieces_[std::min(i, pieces_.size() - 1)](x);
    }

    std::size_t max_degree() const noexcept {
        std::size_t d = 0;
        for (const auto& p : pieces_) d = std::max(d, p.degree());
        return d;
    }

private:
    void check_in_domain(double x) const {
        if (!(x >= breaks_.front() && x <= breaks_.back())) {
            std::ostringstream os;
            os << "x = " << x << " outside domain [" << breaks_.front() << ", " << breaks_.back() << "]";
            throw DomainError(os.str());
        }
    }

    std::vector<ChebPiece> pieces_;
    std::vector<double> breaks_;
};

struct BuildOptions {
    double tol = 1e-13;               ///< relative to the sampled sup|f|
    std::size_t max_degree = 128;     ///< per piece, before bisecting
    int max_depth = 48;               ///< bisection levels below each user subinterval
    bool accept_unresolved = false;   ///< keep pieces at the floating-point resolution limit instead of failing
    double scale_floor = 0.0;         ///< lower bound on the scale the tolerance is relative to
};

namespace detail {

inline std::size_t chop_length(std::span<const double> c, double threshold) {
    // drop trailing coefficients while their accumulated size stays below threshold
    std::size_t len = c.size();
    double dropped = 0.0;
    while (len > 1 && dropped + std::abs(c[len - 1]) <= threshold) {
        dropped += std::abs(c[len - 1]);
        --len;
    }
    return len;
}

template <class F>
void build_adaptive(F& f, Interval iv, const BuildOptions& opt, double& vscale, int depth,
                    std::vector<ChebPiece>& out) {
    std::vector<double> coeffs;
    for (std::size_t count = 17; ; count = std::min(2 * count - 1, opt.max_degree + 1)) {
        const auto t = cheb_points_first_kind(count);
        std::vector<double> v(count);
        for (std::size_t j = 0; j < count; ++j) {
            const double x = iv.mid() + 0.5 * iv.width() * t[j];
            v[j] = f(x);
            if (!std::isfinite(v[j])) {
                std::ostringstream os;
                os << "function returned non-finite value at x = " << x;
                throw NumericalError(os.str());
            }
            vscale = std::max(vscale, std::abs(v[j]));
        }
        coeffs = values_to_coeffs(v);
        const std::size_t tail = std::max<std::size_t>(3, count / 8);
        double tail_max = 0.0;
        for (std::size_t k = count - tail; k < count; ++k) tail_max = std::max(tail_max, std::abs(coeffs[k]));
        const double threshold = opt.tol * (vscale > 0.0 ? vscale : 1.0);
        if (tail_max <= 0.25 * threshold) {
            coeffs.resize(chop_length(coeffs, 0.5 * threshold));
            out.emplace_back(iv, std::move(coeffs));
            return;
        }
        if (count >= opt.max_degree + 1) break;
    }

    const double mid = iv.mid();
    const bool resolvable = mid > iv.lo && mid < iv.hi &&
                            iv.width() > 64.0 * std::numeric_limits<double>::epsilon() *
                                             std::max(std::abs(iv.lo), std::abs(iv.hi));
    if (depth >= opt.max_depth || !resolvable) {
        if (opt.accept_unresolved) {
            out.emplace_back(iv, std::move(coeffs));
            return;
        }
        std::ostringstream os;
        os.precision(17);
        os << "no convergence on [" << iv.lo << ", " << iv.hi << "] at depth " << depth;
        throw NumericalError(os.str());
    }
    build_adaptive(f, Interval(iv.lo, mid), opt, vscale, depth + 1, out);
    build_adaptive(f, Interval(mid, iv.hi), opt, vscale, depth + 1, out);
}

} // namespace detail

/// Adaptive construction. Declared breakpoints (kinks, jumps) become piece
/// boundaries; every other split is chosen by coefficient decay.
template <class F>
PiecewiseFn build(F&& f, Interval domain, std::span<const double> breakpoints = {}, BuildOptions opt = {}) {
    if (!(opt.tol > 0.0 && opt.tol <= 1e-6)) throw DomainError("build: tol must lie in (0, 1e-6]");
    if (opt.max_degree < 16) opt.max_degree = 16;
    std::vector<double> cuts{domain.lo};
    for (double b : breakpoints) {
        if (!(b > domain.lo && b < domain.hi)) {
            if (b == domain.lo || b == domain.hi) continue;
            throw DomainError("build: breakpoint outside domain");
        }
        if (b <= cuts.back()) {
            if (b == cuts.back()) continue;
            throw DomainError("build: breakpoints must be sorted");
        }
        cuts.push_back(b);
    }
    cuts.push_back(domain.hi);

    // initial scale estimate so early pieces are not judged against a tiny sup
    double vscale = opt.scale_floor;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const Interval iv(cuts[i], cuts[i + 1]);
        for (double t : detail::cheb_points_first_kind(9)) {
            const double v = f(iv.mid() + 0.5 * iv.width() * t);
            if (std::isfinite(v)) vscale = std::max(vscale, std::abs(v));
        }
    }

    std::vector<ChebPiece> pieces;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
        detail::build_adaptive(f, Interval(cuts[i], cuts[i + 1]), opt, vscale, 0, pieces);
    return PiecewiseFn(std::move(pieces));
}

inline double evaluate(const PiecewiseFn& f, double x) { return f(x); }

inline double definite_integral(const PiecewiseFn& f) {
    double s = 0.0;
    for (const auto& p : f.pieces()) s += p.integral();
    return s;
}

/// Continuous antiderivative with value 0 at `anchor`.
inline PiecewiseFn antiderivative(const PiecewiseFn& f, double anchor) {
    (void)f.piece_index(anchor); // domain check
    std::vector<ChebPiece> out;
    out.reserve(f.pieces().size());
    double offset = 0.0;
    for (const auto& p : f.pieces()) {
        auto a = p.antiderivative().plus_constant(offset);
        offset = a.right_value();
        out.push_back(std::move(a));
    }
    PiecewiseFn g(std::move(out));
    const double shift = g(anchor);
    std::vector<ChebPiece> shifted;
    shifted.reserve(g.pieces().size());
    for (const auto& p : g.pieces()) shifted.push_back(p.plus_constant(-shift));
    return PiecewiseFn(std::move(shifted));
}

inline PiecewiseFn derivative(const PiecewiseFn& f) {
    std::vector<ChebPiece> out;
    out.reserve(f.pieces().size());
    for (const auto& p : f.pieces()) out.push_back(p.derivative());
    return PiecewiseFn(std::move(out));
}

namespace detail {

// Real roots in [-1, 1] of sum c_k T_k via the colleague matrix.
inline std::vector<double> cheb_real_roots(std::span<const double> coeffs) {
    double cmax = 0.0;
    for (double v : coeffs) cmax = std::max(cmax, std::abs(v));
    if (cmax == 0.0) return {};
    std::size_t n = coeffs.size();
    while (n > 1 && std::abs(coeffs[n - 1]) <= 1e-12 * cmax) --n;
    const std::size_t deg = n - 1;
    if (deg == 0) return {};

    std::vector<double> raw;
    if (deg == 1) {
        raw.push_back(-coeffs[0] / coeffs[1]);
    } else {
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(deg), static_cast<Eigen::Index>(deg));
        const auto d = static_cast<Eigen::Index>(deg);
        m(0, 1) = 1.0;
        for (Eigen::Index i = 1; i < d - 1; ++i) {
            m(i, i - 1) = 0.5;
            m(i, i + 1) = 0.5;
        }
        m(d - 1, d - 2) += 0.5;
        const double lead = coeffs[deg];
        for (Eigen::Index j = 0; j < d; ++j) m(d - 1, j) -= coeffs[static_cast<std::size_t>(j)] / (2.0 * lead);
        Eigen::EigenSolver<Eigen::MatrixXd> es(m, false);
        if (es.info() != Eigen::Success) throw NumericalError("colleague eigenvalue solve failed");
        for (Eigen::Index i = 0; i < d; ++i) {
            const auto z = es.eigenvalues()(i);
            if (std::abs(z.imag()) <= 1e-8 && std::abs(z.real()) <= 1.0 + 1e-8) raw.push_back(z.real());
        }
    }
    std::span<const double> c(coeffs.data(), n);
    std::vector<double> roots;
    std::vector<double> dc(deg, 0.0);
    for (std::size_t k = deg; k >= 1; --k) dc[k - 1] = (k + 1 < deg ? dc[k + 1] : 0.0) + 2.0 * static_cast<double>(k) * c[k];
    dc[0] *= 0.5;
    for (double r : raw) {
        double t = std::clamp(r, -1.0, 1.0);
        // Newton polish in the local variable
        const double start = t;
        for (int it = 0; it < 12; ++it) {
            const double fv = clenshaw(c, t);
            const double dv = clenshaw(dc, t);
            if (dv == 0.0 || !std::isfinite(dv)) break;
            const double next = std::clamp(t - fv / dv, -1.0, 1.0);
            if (std::abs(next - start) > 1e-3 || std::abs(clenshaw(c, next)) > std::abs(fv)) break;
            const bool done = std::abs(next - t) <= 4.0 * std::numeric_limits<double>::epsilon();
            t = next;
            if (done) break;
        }
        roots.push_back(t);
    }
    std::sort(roots.begin(), roots.end());
    return roots;
}

} // namespace detail

enum class ExtremumKind { min, max, endpoint };

struct Extremum {
    double location;
    double value;
    ExtremumKind kind;
};

/// Interior stationary points where the derivative changes sign, plus domain
/// endpoints and breakpoints, sorted by location. Breakpoints at which the
/// function turns around are reported as min/max; all others as endpoint.
inline std::vector<Extremum> local_extrema(const PiecewiseFn& f) {
    const auto dom = f.domain();
    struct Candidate {
        double x;
        std::size_t piece;
        bool breakpoint;
    };
    std::vector<Candidate> cand;
    double dscale = 0.0;
    std::vector<ChebPiece> derivs;
    derivs.reserve(f.pieces().size());
    for (const auto& p : f.pieces()) {
        derivs.push_back(p.derivative());
        dscale = std::max(dscale, derivs.back().max_abs_coefficient());
    }
    for (std::size_t i = 0; i < f.pieces().size(); ++i) {
        const auto& iv = f.pieces()[i].interval();
        cand.push_back({iv.lo, i, true});
        const auto& d = derivs[i];
        if (d.max_abs_coefficient() <= 1e-11 * dscale) continue; // constant piece
        const double guard = 1e-12 * iv.width();
        for (double t : detail::cheb_real_roots(d.coefficients())) {
            const double x = iv.mid() + 0.5 * iv.width() * t;
            if (x - iv.lo <= guard || iv.hi - x <= guard) continue;
            if (!cand.empty() && !cand.back().breakpoint && x - cand.back().x <= guard) continue;
            cand.push_back({x, i, false});
        }
    }
    cand.push_back({dom.hi, f.pieces().size() - 1, true});

    auto slope_sign = [&](double a, double b) {
        const double m = 0.5 * (a + b);
        const std::size_t i = f.piece_index(m);
        const double v = derivs[i](m);
        const double tiny = 1e-11 * dscale;
        return v > tiny ? 1 : (v < -tiny ? -1 : 0);
    };

    std::vector<Extremum> out;
    for (std::size_t i = 0; i < cand.size(); ++i) {
        const double x = cand[i].x;
        const double value = (i + 1 == cand.size()) ? f.pieces().back().right_value() : f(x);
        ExtremumKind kind = ExtremumKind::endpoint;
        if (i > 0 && i + 1 < cand.size()) {
            const int left = slope_sign(cand[i - 1].x, x);
            const int right = slope_sign(x, cand[i + 1].x);
            const bool continuous = !cand[i].breakpoint ||
                                    std::abs(f.left_limit(x) - f(x)) <=
                                        1e-12 * std::max(1.0, std::abs(f(x)));
            if (continuous && left > 0 && right < 0)
                kind = ExtremumKind::max;
            else if (continuous && left < 0 && right > 0)
                kind = ExtremumKind::min;
            else if (!cand[i].breakpoint)
                continue; // stationary inflection
        }
        out.push_back({x, value, kind});
    }
    return out;
}

namespace detail {

// Consecutive partition points from local_extrema; f is monotone between them.
inline std::vector<double> monotone_cuts(const PiecewiseFn& f) {
    std::vector<double> cuts;
    for (const auto& e : local_extrema(f)) cuts.push_back(e.location);
    return cuts;
}

} // namespace detail

/// All y with f(y) = level, sorted. Each monotone bracket between consecutive
/// extrema contributes at most one root; near-duplicates are merged.
inline std::vector<double> roots_at_level(const PiecewiseFn& f, double level) {
    const auto cuts = detail::monotone_cuts(f);
    std::vector<double> roots;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double a = cuts[i], b = cuts[i + 1];
        const auto& piece = f.pieces()[f.piece_index(0.5 * (a + b))];
        const double fa = piece(a), fb = piece(b);
        if (fa == level) roots.push_back(a);
        if (fb == level) roots.push_back(b);
        if (fa == level || fb == level) continue;
        if ((fa < level) == (fb < level)) continue;
        const auto dp = piece.derivative();
        roots.push_back(hybrid_root(piece, dp, a, b, level));
    }
    std::sort(roots.begin(), roots.end());
    const double merge = 1e-12 * f.domain().width();
    std::vector<double> out;
    for (double r : roots)
        if (out.empty() || r - out.back() > merge) out.push_back(r);
    return out;
}

} // namespace gof
