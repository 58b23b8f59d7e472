#pragma once

// Distribution function of p(X): Pr{p(X) <= x} = integral of p over {p <= x}.
//
// Smooth-piecewise densities are split into monotone pieces at their extrema.
// Each piece carries the indefinite integral of p started at its low-p end, so
// the mass of {p <= x} on the piece is the integral up to the point where
// p = x. Constant stretches of p become atoms (jumps of the distribution
// function). Piecewise-constant densities are handled exactly from their
// level table.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <span>
#include <sstream>
#include <vector>

#include "gof/approx.hpp"
#include "gof/density.hpp"
#include "gof/error.hpp"
#include "gof/hybrid_root.hpp"

namespace gof {

enum class Direction { nondecreasing, nonincreasing };

struct MonotonePiece {
    Interval interval;
    Direction direction;
    double p_lo;             ///< smallest value of p on the piece (clipped at 0)
    double p_hi;             ///< largest value of p on the piece
    bool constant;           ///< p constant on the piece; contributes an atom instead
    ChebPiece density;       ///< p restricted to the interval
    ChebPiece slope;         ///< derivative of `density`
    ChebPiece integral;      ///< antiderivative, zero at the endpoint where p is smaller
    double mass;             ///< integral of p over the interval

    double anchor() const noexcept { return direction == Direction::nondecreasing ? interval.lo : interval.hi; }
};

struct Atom {
    double level;
    double mass;
};

/// Partition of the support into pieces on which p is monotone.
inline std::vector<MonotonePiece> monotone_partition(const Density& d) {
    std::vector<double> cuts;
    if (d.kind() == DensityKind::smooth_piecewise) {
        for (const auto& e : d.extrema()) cuts.push_back(e.location);
    } else {
        const auto b = d.pdf().breakpoints();
        cuts.assign(b.begin(), b.end());
    }
    const double pscale = std::max(d.max_value(), std::numeric_limits<double>::min());

    std::vector<MonotonePiece> out;
    out.reserve(cuts.size());
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const Interval iv(cuts[i], cuts[i + 1]);
        const auto& src = d.pdf().pieces()[d.pdf().piece_index(iv.mid())];
        ChebPiece dens = src.interval() == iv ? src : src.restrict_to(iv);
        ChebPiece slope = dens.derivative();
        const double pa = dens.left_value(), pb = dens.right_value();
        const double smax = slope.max_abs_coefficient();
        const bool constant = dens.degree() == 0 || smax * iv.width() <= 1e-12 * pscale;
        const Direction dir = pb >= pa ? Direction::nondecreasing : Direction::nonincreasing;

        if (!constant) {
            const double sign = dir == Direction::nondecreasing ? 1.0 : -1.0;
            double worst = 0.0, largest = 0.0;
            for (double t : detail::cheb_points_first_kind(2 * slope.degree() + 8)) {
                const double v = slope(iv.mid() + 0.5 * iv.width() * t);
                worst = std::min(worst, sign * v);
                largest = std::max(largest, std::abs(v));
            }
            if (worst < -1e-8 * largest) {
                std::ostringstream os;
                os.precision(17);
                os << "density is not monotone on [" << iv.lo << ", " << iv.hi << "]: missed extremum";
                throw NumericalError(os.str());
            }
        }

        ChebPiece integral = dens.antiderivative();
        if (dir == Direction::nonincreasing) integral = integral.plus_constant(-integral.right_value());
        const double mass = std::abs(dir == Direction::nondecreasing ? integral.right_value() : integral.left_value());
        out.push_back(MonotonePiece{iv, dir, std::max(0.0, std::min(pa, pb)), std::max(0.0, std::max(pa, pb)), constant,
                                    std::move(dens), std::move(slope), std::move(integral), mass});
    }
    return out;
}

/// Point y in the piece with p(y) = x, by the bisection/Newton hybrid.
inline double invert_on_piece(const MonotonePiece& piece, double x) {
    const double slack = 1e-14 * std::max(piece.p_hi, std::numeric_limits<double>::min());
    if (!(x >= piece.p_lo - slack && x <= piece.p_hi + slack)) {
        std::ostringstream os;
        os << "level " << x << " outside piece range [" << piece.p_lo << ", " << piece.p_hi << "]";
        throw DomainError(os.str());
    }
    const auto& iv = piece.interval;
    const double fa = piece.density(iv.lo), fb = piece.density(iv.hi);
    const bool up = piece.direction == Direction::nondecreasing;
    const double low_end = up ? iv.lo : iv.hi, high_end = up ? iv.hi : iv.lo;
    const double f_low = up ? fa : fb, f_high = up ? fb : fa;
    if (x <= f_low) return low_end;
    if (x >= f_high) return high_end;
    return hybrid_root(piece.density, piece.slope, iv.lo, iv.hi, x);
}

namespace detail {

// Mass of {p <= x} on one strictly monotone piece.
inline double mass_at_or_below(const MonotonePiece& piece, double x) {
    if (piece.constant || x <= piece.p_lo) return 0.0;
    if (x >= piece.p_hi) return piece.mass;
    return std::abs(piece.integral(invert_on_piece(piece, x)));
}

} // namespace detail

class RearrangedDF {
public:
    std::span<const MonotonePiece> pieces() const noexcept { return pieces_; }
    std::span<const Atom> atoms() const noexcept { return atoms_; }
    double max_p() const noexcept { return max_p_; }
    bool has_representation() const noexcept { return !segments_.empty(); }
    /// Level breakpoints of the fast representation (sorted, first 0, last max_p).
    std::span<const double> representation_levels() const noexcept { return levels_; }

    /// Continuous part (everything but atoms) by the four-step procedure.
    double continuous_exact(double x) const {
        double s = 0.0;
        for (const auto& p : pieces_) s += detail::mass_at_or_below(p, x);
        return s;
    }

    double atoms_at_or_below(double x) const {
        auto it = std::upper_bound(atom_levels_.begin(), atom_levels_.end(), x);
        return atom_prefix_[static_cast<std::size_t>(it - atom_levels_.begin())];
    }

    double atoms_below(double x) const {
        auto it = std::lower_bound(atom_levels_.begin(), atom_levels_.end(), x);
        return atom_prefix_[static_cast<std::size_t>(it - atom_levels_.begin())];
    }

    /// Right-continuous value, using the fast representation when present.
    double operator()(double x) const {
        check_level(x);
        return std::clamp(continuous_fast(x) + atoms_at_or_below(x), 0.0, 1.0);
    }

    /// Limit from the left, using the fast representation when present.
    double left_limit(double x) const {
        check_level(x);
        return std::clamp(continuous_fast(x) + atoms_below(x), 0.0, 1.0);
    }

private:
    friend RearrangedDF build_rearranged(const Density& d);

    static void check_level(double x) {
        if (!(x >= 0.0)) {
            std::ostringstream os;
            os << "distribution function of p(X) evaluated at negative level " << x;
            throw DomainError(os.str());
        }
    }

    double continuous_fast(double x) const {
        if (segments_.empty()) return continuous_exact(x);
        if (x >= max_p_) return continuous_total_;
        auto it = std::upper_bound(levels_.begin(), levels_.end(), x);
        const std::size_t i = static_cast<std::size_t>(it - levels_.begin()) - 1;
        const double a = levels_[i], b = levels_[i + 1];
        const double t = (x - a) / (b - a);
        const double theta = t <= 0.5 ? std::asin(std::sqrt(t))
                                      : 0.5 * std::numbers::pi - std::asin(std::sqrt((b - x) / (b - a)));
        const auto& c = corrections_[i];
        return std::clamp(segments_[i](theta) + (1.0 - t) * c[0] + t * c[1], 0.0, continuous_total_);
    }

    void set_atoms(std::vector<Atom> atoms) {
        std::sort(atoms.begin(), atoms.end(), [](const Atom& l, const Atom& r) { return l.level < r.level; });
        atoms_.clear();
        for (const auto& a : atoms) {
            if (!(a.level > 0.0) || !(a.mass > 0.0)) continue;
            if (!atoms_.empty() && a.level - atoms_.back().level <= 1e-12 * a.level)
                atoms_.back().mass += a.mass;
            else
                atoms_.push_back(a);
        }
        atom_levels_.clear();
        atom_prefix_.assign(1, 0.0);
        for (const auto& a : atoms_) {
            atom_levels_.push_back(a.level);
            atom_prefix_.push_back(atom_prefix_.back() + a.mass);
        }
    }

    std::vector<MonotonePiece> pieces_;
    std::vector<Atom> atoms_;
    std::vector<double> atom_levels_;
    std::vector<double> atom_prefix_{0.0};
    double max_p_ = 0.0;
    double continuous_total_ = 0.0;
    // continuous part on [levels_[i], levels_[i+1]] as a function of
    // theta in [0, pi/2], level = a + (b - a) sin^2(theta)
    std::vector<double> levels_;
    std::vector<PiecewiseFn> segments_;
    // added linearly in t so the fit is exact at both ends of each segment
    std::vector<std::array<double, 2>> corrections_;
};

/// Pr{p(X) <= x} by the four-step procedure (exact path, no representation).
inline double eval_rearranged(const RearrangedDF& r, double x) {
    if (!(x >= 0.0)) throw DomainError("eval_rearranged: negative level");
    return std::clamp(r.continuous_exact(x) + r.atoms_at_or_below(x), 0.0, 1.0);
}

/// Pr{p(X) < x}.
inline double eval_rearranged_left_limit(const RearrangedDF& r, double x) {
    if (!(x >= 0.0)) throw DomainError("eval_rearranged_left_limit: negative level");
    return std::clamp(r.continuous_exact(x) + r.atoms_below(x), 0.0, 1.0);
}

inline RearrangedDF build_rearranged(const Density& d) {
    RearrangedDF r;
    std::vector<Atom> atoms;
    if (d.kind() == DensityKind::piecewise_constant) {
        for (const auto& lv : d.levels()) atoms.push_back({lv.value, lv.value * lv.length});
        r.set_atoms(std::move(atoms));
        r.max_p_ = r.atoms_.empty() ? 0.0 : r.atoms_.back().level;
        return r;
    }

    r.pieces_ = monotone_partition(d);
    std::vector<MonotonePiece> moving;
    for (auto& p : r.pieces_) {
        if (p.constant)
            atoms.push_back({p.density.coefficients()[0], p.mass});
        else
            moving.push_back(std::move(p));
    }
    r.pieces_ = std::move(moving);
    r.set_atoms(std::move(atoms));
    r.max_p_ = d.max_value();
    for (const auto& a : r.atoms_) r.max_p_ = std::max(r.max_p_, a.level);
    for (const auto& p : r.pieces_) r.continuous_total_ += p.mass;
    if (r.pieces_.empty() || !(r.max_p_ > 0.0)) return r;

    std::vector<double> levels{0.0, r.max_p_};
    for (const auto& p : r.pieces_) {
        levels.push_back(std::min(p.p_lo, r.max_p_));
        levels.push_back(std::min(p.p_hi, r.max_p_));
    }
    std::sort(levels.begin(), levels.end());
    const double merge = 1e-14 * r.max_p_;
    std::vector<double> uniq;
    for (double v : levels)
        if (uniq.empty() || v - uniq.back() > merge) uniq.push_back(v);
    uniq.back() = r.max_p_;
    // extremum levels equal up to rounding (symmetric peaks) share one level
    auto snap = [&](double v) {
        auto it = std::lower_bound(uniq.begin(), uniq.end(), v - merge);
        return it != uniq.end() && std::abs(*it - v) <= merge ? *it : v;
    };
    for (auto& p : r.pieces_) {
        p.p_lo = snap(p.p_lo);
        p.p_hi = snap(p.p_hi);
    }

    BuildOptions opt;
    opt.tol = 1e-10;
    opt.scale_floor = 1.0;
    opt.max_depth = 10;
    opt.accept_unresolved = true;
    const Interval angle(0.0, 0.5 * std::numbers::pi);
    for (std::size_t i = 0; i + 1 < uniq.size(); ++i) {
        const double a = uniq[i], b = uniq[i + 1];
        double below = 0.0;
        std::vector<const MonotonePiece*> active;
        for (const auto& p : r.pieces_) {
            if (p.p_hi <= a)
                below += p.mass;
            else if (p.p_lo < b)
                active.push_back(&p);
        }
        auto g = [&](double theta) {
            const double s = std::sin(theta);
            const double x = std::min(b, a + (b - a) * s * s);
            double m = below;
            for (const auto* p : active) m += detail::mass_at_or_below(*p, x);
            return m;
        };
        auto seg = build(g, angle, {}, opt);
        r.corrections_.push_back({g(0.0) - seg(0.0), g(angle.hi) - seg.left_limit(angle.hi)});
        r.segments_.push_back(std::move(seg));
    }
    r.levels_ = std::move(uniq);
    return r;
}

} // namespace gof
