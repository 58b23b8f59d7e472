#pragma once

// Validated probability densities on a bounded interval, their cumulative
// distribution functions, and inverse-CDF sampling.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "gof/approx.hpp"
#include "gof/error.hpp"
#include "gof/hybrid_root.hpp"

namespace gof {

enum class DensityKind { smooth_piecewise, piecewise_constant };

/// One value taken by a piecewise-constant density and the total length on which it is taken.
struct LevelLength {
    double value;
    double length;
};

/// Cumulative distribution function P(x) = integral of p over (-inf, x].
class Cdf {
public:
    Cdf(PiecewiseFn fn) : fn_(std::move(fn)) {
        at_breaks_.reserve(fn_.pieces().size() + 1);
        at_breaks_.push_back(fn_.pieces().front().left_value());
        for (const auto& p : fn_.pieces()) at_breaks_.push_back(p.right_value());
    }

    /// Piecewise-linear CDF of a step density, evaluated as F(b_i) + v_i (x - b_i).
    Cdf(PiecewiseFn fn, std::vector<double> at_breaks, std::vector<double> slopes)
        : fn_(std::move(fn)), at_breaks_(std::move(at_breaks)), slopes_(std::move(slopes)) {}

    /// Clamped to [0, 1]; 0 left of the domain, 1 right of it.
    double operator()(double x) const {
        const auto dom = fn_.domain();
        if (x <= dom.lo) return 0.0;
        if (x >= dom.hi) return 1.0;
        if (!slopes_.empty()) {
            const std::size_t i = fn_.piece_index(x);
            return std::clamp(at_breaks_[i] + slopes_[i] * (x - fn_.pieces()[i].interval().lo), 0.0, 1.0);
        }
        return std::clamp(fn_(x), 0.0, 1.0);
    }

    const PiecewiseFn& fn() const noexcept { return fn_; }
    Interval domain() const { return fn_.domain(); }
    /// Unclamped values at the breakpoints of fn().
    std::span<const double> values_at_breakpoints() const noexcept { return at_breaks_; }

private:
    PiecewiseFn fn_;
    std::vector<double> at_breaks_;
    std::vector<double> slopes_;
};

class Density {
public:
    /// Density value, zero outside the support and clipped at zero inside it.
    double operator()(double x) const {
        if (!(x >= support_.lo && x <= support_.hi)) return 0.0;
        return std::max(0.0, pdf_(x));
    }

    const PiecewiseFn& pdf() const noexcept { return pdf_; }
    Interval support() const noexcept { return support_; }
    DensityKind kind() const noexcept { return kind_; }
    const std::string& name() const noexcept { return name_; }
    double mass() const noexcept { return mass_; }
    double max_value() const noexcept { return max_value_; }
    /// Exact level table; empty for smooth-piecewise densities.
    std::span<const LevelLength> levels() const noexcept { return levels_; }
    /// Partition points from local_extrema of the pdf; empty for piecewise-constant densities.
    std::span<const Extremum> extrema() const noexcept { return extrema_; }
    const Cdf& cdf() const noexcept { return *cdf_; }

private:
    Density(PiecewiseFn pdf) : pdf_(std::move(pdf)), support_(pdf_.domain()) {}

    friend Density validate(PiecewiseFn pdf, std::string name, double tol);

    PiecewiseFn pdf_;
    Interval support_;
    DensityKind kind_ = DensityKind::smooth_piecewise;
    std::string name_;
    double mass_ = 0.0;
    double max_value_ = 0.0;
    std::vector<LevelLength> levels_;
    std::vector<Extremum> extrema_;
    std::shared_ptr<const Cdf> cdf_;
};

namespace detail {

// Exact CDF for a density whose pieces are all constant.
inline Cdf piecewise_constant_cdf(const PiecewiseFn& pdf) {
    std::vector<ChebPiece> out;
    std::vector<double> at{0.0}, slopes;
    out.reserve(pdf.pieces().size());
    double cum = 0.0;
    for (const auto& p : pdf.pieces()) {
        const auto& iv = p.interval();
        const double v = std::max(0.0, p.coefficients()[0]);
        const double half = 0.5 * v * iv.width();
        out.emplace_back(iv, std::vector<double>{cum + half, half});
        cum += v * iv.width();
        at.push_back(cum);
        slopes.push_back(v);
    }
    return Cdf(PiecewiseFn(std::move(out)), std::move(at), std::move(slopes));
}

} // namespace detail

/// Checks nonnegativity and unit mass; does not renormalize. All-constant
/// pieces select the exact piecewise-constant path.
inline Density validate(PiecewiseFn pdf, std::string name = {}, double tol = 1e-13) {
    Density d(std::move(pdf));
    d.name_ = std::move(name);
    const auto pieces = d.pdf_.pieces();
    const bool all_constant =
        std::all_of(pieces.begin(), pieces.end(), [](const ChebPiece& p) { return p.degree() == 0; });

    double lowest = 0.0, highest = 0.0;
    auto see = [&](double v) {
        lowest = std::min(lowest, v);
        highest = std::max(highest, v);
    };
    for (const auto& p : pieces) {
        see(p.left_value());
        see(p.right_value());
    }
    if (!all_constant) {
        d.extrema_ = local_extrema(d.pdf_);
        for (const auto& e : d.extrema_) see(e.value);
    }
    if (lowest < -tol * std::max(1.0, highest)) {
        std::ostringstream os;
        os << "density takes negative value " << lowest;
        throw DensityError(os.str(), definite_integral(d.pdf_));
    }
    d.max_value_ = highest;

    d.mass_ = definite_integral(d.pdf_);
    if (!(std::abs(d.mass_ - 1.0) <= 1e-10)) {
        std::ostringstream os;
        os.precision(17);
        os << "density mass is " << d.mass_ << ", expected 1";
        throw DensityError(os.str(), d.mass_);
    }

    if (all_constant) {
        d.kind_ = DensityKind::piecewise_constant;
        std::map<double, double> table;
        for (const auto& p : pieces) table[std::max(0.0, p.coefficients()[0])] += p.interval().width();
        for (const auto& [v, len] : table) d.levels_.push_back({v, len});
        d.cdf_ = std::make_shared<const Cdf>(detail::piecewise_constant_cdf(d.pdf_));
    } else {
        d.cdf_ = std::make_shared<const Cdf>(antiderivative(d.pdf_, d.support_.lo));
    }
    return d;
}

/// Step density taking values[i] on (breaks[i], breaks[i+1]).
inline Density piecewise_constant(std::span<const double> breaks, std::span<const double> values, std::string name = {}) {
    if (breaks.size() != values.size() + 1 || values.empty())
        throw DomainError("piecewise_constant: need one more break than values");
    std::vector<ChebPiece> pieces;
    pieces.reserve(values.size());
    for (std::size_t i = 0; i < values.size(); ++i)
        pieces.emplace_back(Interval(breaks[i], breaks[i + 1]), std::vector<double>{values[i]});
    return validate(PiecewiseFn(std::move(pieces)), std::move(name));
}

inline const Cdf& cdf(const Density& d) { return d.cdf(); }

/// Smallest x with cdf(x) >= u.
inline double quantile(const Density& d, double u) {
    if (!(u >= 0.0 && u <= 1.0)) throw DomainError("quantile: u must lie in [0, 1]");
    const auto support = d.support();
    if (u <= 0.0) return support.lo;
    const auto& F = d.cdf();
    const auto at = F.values_at_breakpoints();
    auto it = std::lower_bound(at.begin() + 1, at.end(), u);
    if (it == at.end()) return support.hi;
    const std::size_t i = static_cast<std::size_t>(it - at.begin()) - 1;
    const auto& piece = F.fn().pieces()[i];
    const auto& dens = d.pdf().pieces()[i];
    const auto& iv = piece.interval();
    if (d.kind() == DensityKind::piecewise_constant) {
        const double v = dens.coefficients()[0];
        return std::clamp(iv.lo + (u - at[i]) / v, iv.lo, iv.hi);
    }
    const double fa = piece(iv.lo), fb = piece(iv.hi);
    if (u <= fa) return iv.lo;
    if (u >= fb) return iv.hi;
    return hybrid_root(piece, dens, iv.lo, iv.hi, u);
}

/// i.i.d. draws with their provenance.
struct SampleSet {
    std::vector<double> draws;
    std::uint64_t seed = 0;
    std::string source;
    std::string generator;

    std::size_t n() const noexcept { return draws.size(); }
};

inline constexpr const char* kGeneratorName = "mt19937_64";

/// Uniform double in [0, 1) from the top 53 bits of one engine output.
inline double uniform53(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Inverse-CDF sampling; a pure function of (d, n, seed).
inline SampleSet sample(const Density& d, std::size_t n, std::uint64_t seed) {
    if (n == 0) throw DomainError("sample: n must be at least 1");
    SampleSet s;
    s.seed = seed;
    s.source = d.name();
    s.generator = kGeneratorName;
    s.draws.reserve(n);
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < n; ++i) s.draws.push_back(quantile(d, uniform53(rng)));
    return s;
}

} // namespace gof
