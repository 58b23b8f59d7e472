#pragma once

// The five benchmark suites: a null density p, an alternative q, and closed
// forms of P and of the distribution function of p(X) for cross-checking.

#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "gof/approx.hpp"
#include "gof/density.hpp"
#include "gof/error.hpp"
#include "gof/rearranged.hpp"

namespace gof {

struct ExampleSuite {
    std::string name;
    Density p;
    Density q;
    RearrangedDF rearranged; ///< built from p
    std::function<double(double)> P_analytic;
    /// Closed form of Pr{p(X) <= x}; empty for the smooth suite, which has none.
    std::function<double(double)> Pscript_analytic;
    std::string notes;
};

inline constexpr std::array<std::string_view, 5> kSuiteNames{"sawtooth", "step", "step2", "bimodal", "smooth"};

namespace detail {

inline double smooth_shape(double x) {
    using std::numbers::pi;
    return std::exp(-std::abs(x)) * (2.0 + std::cos(13.0 * pi * x) + std::cos(39.0 * pi * x));
}

inline std::vector<double> integer_breaks(int lo, int hi) {
    std::vector<double> b;
    for (int k = lo; k <= hi; ++k) b.push_back(k);
    return b;
}

inline Density uniform_density(double lo, double hi, std::string name) {
    const double b[] = {lo, hi};
    const double v[] = {1.0 / (hi - lo)};
    return piecewise_constant(b, v, std::move(name));
}

inline ExampleSuite make_sawtooth() {
    auto pdf = [](double x) { return 2e-3 * (x - std::floor(x)); };
    const auto inner = integer_breaks(1, 999);
    auto p = validate(build(pdf, Interval(0, 1000), inner), "sawtooth");
    auto q = uniform_density(0, 1000, "uniform(0,1000)");
    auto P = [](double x) {
        if (x <= 0) return 0.0;
        if (x >= 1000) return 1.0;
        const double k = std::floor(x);
        return 1e-3 * (x - k) * (x - k) + 1e-3 * k;
    };
    auto R = [](double x) { return x >= 2e-3 ? 1.0 : 1e6 * x * x / 4.0; };
    auto r = build_rearranged(p);
    return {"sawtooth", std::move(p), std::move(q), std::move(r), P, R,
            "U cannot separate the uniform alternative; V and W can from n = 1e3"};
}

inline ExampleSuite make_step() {
    const auto breaks = integer_breaks(0, 1999);
    std::vector<double> values;
    for (int i = 0; i < 1999; ++i) values.push_back(i % 2 == 0 ? 1e-6 : 1e-3);
    auto p = piecewise_constant(breaks, values, "step");
    auto q = uniform_density(0, 1999, "uniform(0,1999)");
    auto P = [](double x) {
        if (x <= 0) return 0.0;
        if (x >= 1999) return 1.0;
        const double j = std::floor(x);
        const double k = std::floor((j + 1) / 2);
        if (static_cast<long>(j) % 2 == 1) return 1e-6 * k + 1e-3 * (x - k); // x in [2k-1, 2k]
        return 1e-6 * (x - k) + 1e-3 * k;                                     // x in [2k, 2k+1]
    };
    auto R = [](double x) { return x < 1e-6 ? 0.0 : (x < 1e-3 ? 1e-3 : 1.0); };
    auto r = build_rearranged(p);
    return {"step", std::move(p), std::move(q), std::move(r), P, R,
            "V separates the uniform alternative from n = 1e2; W does not"};
}

inline ExampleSuite make_step2() {
    const auto breaks = integer_breaks(0, 19);
    std::vector<double> values;
    for (int i = 0; i < 19; ++i) values.push_back(i % 2 == 0 ? 0.1 : 0.0);
    auto p = piecewise_constant(breaks, values, "step2");
    auto q = uniform_density(0, 19, "uniform(0,19)");
    auto P = [](double x) {
        if (x <= 0) return 0.0;
        if (x >= 19) return 1.0;
        const double j = std::floor(x);
        const double k = std::floor(j / 2);
        if (static_cast<long>(j) % 2 == 0) return (x - k) / 10.0; // x in [2k, 2k+1]
        return (k + 1) / 10.0;
    };
    auto R = [](double x) { return x < 0.1 ? 0.0 : 1.0; };
    auto r = build_rearranged(p);
    return {"step2", std::move(p), std::move(q), std::move(r), P, R,
            "W rejects the uniform alternative with certainty at every n"};
}

inline ExampleSuite make_bimodal() {
    auto pdf = [](double x) {
        if (x <= 100) return x / 10100.0;
        if (x <= 101) return (101.0 - x) / 101.0;
        if (x <= 102) return (x - 101.0) / 101.0;
        return (202.0 - x) / 10100.0;
    };
    auto qdf = [](double x) { return x <= 101 ? x / (101.0 * 101.0) : (202.0 - x) / (101.0 * 101.0); };
    const double pb[] = {100.0, 101.0, 102.0};
    const double qb[] = {101.0};
    auto p = validate(build(pdf, Interval(0, 202), pb), "bimodal");
    auto q = validate(build(qdf, Interval(0, 202), qb), "unimodal");
    auto P = [](double x) {
        if (x <= 0) return 0.0;
        if (x >= 202) return 1.0;
        if (x <= 100) return x * x / 20200.0;
        if (x <= 101) return (-10100.0 + 202.0 * x - x * x) / 202.0;
        if (x <= 102) return (10302.0 - 202.0 * x + x * x) / 202.0;
        return (-20604.0 + 404.0 * x - x * x) / 20200.0;
    };
    auto R = [](double x) { return x >= 1.0 / 101.0 ? 1.0 : (101.0 * x) * (101.0 * x); };
    auto r = build_rearranged(p);
    return {"bimodal", std::move(p), std::move(q), std::move(r), P, R,
            "U separates the unimodal alternative from n = 1e5, V is weaker, W from n = 1e4"};
}

} // namespace detail

/// Normalizing constant of the smooth density, from the kernel's integral.
inline double smooth_constant() {
    static const double c = [] {
        const double bp[] = {0.0};
        return 1.0 / definite_integral(build(detail::smooth_shape, Interval(-1, 1), bp));
    }();
    return c;
}

namespace detail {

inline ExampleSuite make_smooth() {
    const double c = smooth_constant();
    const double bp[] = {0.0};
    auto p = validate(build([c](double x) { return c * smooth_shape(x); }, Interval(-1, 1), bp), "smooth");
    const double qnorm = 2.0 - 2.0 * std::exp(-1.0);
    auto q = validate(build([qnorm](double x) { return std::exp(-std::abs(x)) / qnorm; }, Interval(-1, 1), bp),
                      "laplace(-1,1)");
    auto P = [c](double x) {
        using std::numbers::pi;
        if (x <= -1) return 0.0;
        if (x >= 1) return 1.0;
        // antiderivative of e^{-s}(2 + cos(a s) + cos(b s)) on [0, t]
        auto half = [](double t) {
            auto osc = [t](double a) {
                return (std::exp(-t) * (a * std::sin(a * t) - std::cos(a * t)) + 1.0) / (1.0 + a * a);
            };
            return 2.0 * (1.0 - std::exp(-t)) + osc(13.0 * pi) + osc(39.0 * pi);
        };
        const double total_half = half(1.0);
        return x < 0 ? c * (total_half - half(-x)) : c * (total_half + half(x));
    };
    auto r = build_rearranged(p);
    return {"smooth", std::move(p), std::move(q), std::move(r), P, {},
            "V and W separate the truncated Laplace alternative from n = 1e2; U from n = 1e4"};
}

} // namespace detail

/// Suite by name; built once and shared.
inline const ExampleSuite& builtin(std::string_view name) {
    static std::mutex mu;
    static std::map<std::string, std::unique_ptr<const ExampleSuite>, std::less<>> cache;
    std::lock_guard lock(mu);
    if (auto it = cache.find(name); it != cache.end()) return *it->second;
    std::unique_ptr<const ExampleSuite> suite;
    if (name == "sawtooth")
        suite = std::make_unique<const ExampleSuite>(detail::make_sawtooth());
    else if (name == "step")
        suite = std::make_unique<const ExampleSuite>(detail::make_step());
    else if (name == "step2")
        suite = std::make_unique<const ExampleSuite>(detail::make_step2());
    else if (name == "bimodal")
        suite = std::make_unique<const ExampleSuite>(detail::make_bimodal());
    else if (name == "smooth")
        suite = std::make_unique<const ExampleSuite>(detail::make_smooth());
    else {
        std::string msg = "unknown example '" + std::string(name) + "'; available:";
        for (auto n : kSuiteNames) msg += " " + std::string(n);
        throw DomainError(msg);
    }
    return *cache.emplace(std::string(name), std::move(suite)).first->second;
}

} // namespace gof
