#pragma once

// Text formats for density specs and sample files.
//
// Density spec:
//     # comment
//     support LO HI
//     LO HI c0 c1 c2 ...      (one line per piece, Chebyshev coefficients on [LO, HI])
//
// Samples: one real per line; '#' lines may carry `key=value` metadata
// (seed, source, generator).

#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "gof/density.hpp"
#include "gof/error.hpp"

namespace gof {

namespace detail {

inline std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

inline double parse_real(const std::string& tok, std::size_t line) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(tok, &used);
    } catch (const std::exception&) {
        throw ParseError("not a number: '" + tok + "'", line);
    }
    if (used != tok.size() || !std::isfinite(v)) throw ParseError("not a finite number: '" + tok + "'", line);
    return v;
}

} // namespace detail

inline Density parse_density_spec(std::istream& in, std::string name = "file") {
    std::string raw;
    std::size_t line = 0;
    bool have_support = false;
    double lo = 0.0, hi = 0.0;
    std::vector<ChebPiece> pieces;
    while (std::getline(in, raw)) {
        ++line;
        const auto text = detail::trim(raw.substr(0, raw.find('#')));
        if (text.empty()) continue;
        std::istringstream ls(text);
        std::vector<std::string> tok;
        for (std::string t; ls >> t;) tok.push_back(t);
        if (tok[0] == "support") {
            if (have_support) throw ParseError("duplicate support line", line);
            if (tok.size() != 3) throw ParseError("expected 'support LO HI'", line);
            lo = detail::parse_real(tok[1], line);
            hi = detail::parse_real(tok[2], line);
            if (!(lo < hi)) throw ParseError("support must satisfy LO < HI", line);
            have_support = true;
            continue;
        }
        if (!have_support) throw ParseError("piece before 'support' header", line);
        if (tok.size() < 3) throw ParseError("expected 'LO HI c0 [c1 ...]'", line);
        const double a = detail::parse_real(tok[0], line);
        const double b = detail::parse_real(tok[1], line);
        const double expected = pieces.empty() ? lo : pieces.back().interval().hi;
        if (a != expected || !(b > a) || b > hi) throw ParseError("pieces must tile the support in order", line);
        std::vector<double> c;
        for (std::size_t k = 2; k < tok.size(); ++k) c.push_back(detail::parse_real(tok[k], line));
        pieces.emplace_back(Interval(a, b), std::move(c));
    }
    if (!have_support) throw ParseError("missing 'support LO HI' header");
    if (pieces.empty() || pieces.back().interval().hi != hi) throw ParseError("pieces do not reach the end of the support");
    return validate(PiecewiseFn(std::move(pieces)), std::move(name));
}

inline void write_density_spec(std::ostream& out, const Density& d) {
    out.precision(17);
    out << "# " << (d.name().empty() ? "density" : d.name()) << "\n";
    out << "support " << d.support().lo << ' ' << d.support().hi << "\n";
    for (const auto& p : d.pdf().pieces()) {
        out << p.interval().lo << ' ' << p.interval().hi;
        for (double c : p.coefficients()) out << ' ' << c;
        out << "\n";
    }
}

inline SampleSet read_samples(std::istream& in, std::string source = {}) {
    SampleSet s;
    s.source = std::move(source);
    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const auto text = detail::trim(raw);
        if (text.empty()) continue;
        if (text[0] == '#') {
            const auto body = detail::trim(text.substr(1));
            const auto eq = body.find('=');
            if (eq == std::string::npos) continue;
            const auto key = detail::trim(body.substr(0, eq));
            const auto value = detail::trim(body.substr(eq + 1));
            if (key == "seed") {
                try {
                    s.seed = std::stoull(value);
                } catch (const std::exception&) {
                    throw ParseError("bad seed '" + value + "'", line);
                }
            } else if (key == "source") {
                s.source = value;
            } else if (key == "generator") {
                s.generator = value;
            }
            continue;
        }
        s.draws.push_back(detail::parse_real(text, line));
    }
    if (s.draws.empty()) throw ParseError("sample file contains no draws");
    return s;
}

inline void write_samples(std::ostream& out, const SampleSet& s) {
    out << "# seed=" << s.seed << "\n# source=" << s.source << "\n# generator=" << s.generator << "\n";
    out.precision(17);
    for (double x : s.draws) out << x << "\n";
}

} // namespace gof
