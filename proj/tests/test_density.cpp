#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "gof/density.hpp"
#include "gof/density_io.hpp"
#include "gof/examples.hpp"
#include "oracles.hpp"

using namespace gof;

namespace {

Density uniform01() {
    const double b[] = {0.0, 1.0};
    const double v[] = {1.0};
    return piecewise_constant(b, v, "uniform");
}

double kolmogorov_distance(std::vector<double> x, const Cdf& F) {
    std::sort(x.begin(), x.end());
    const double n = static_cast<double>(x.size());
    double d = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double u = F(x[k]);
        d = std::max({d, u - k / n, (k + 1) / n - u});
    }
    return d;
}

} // namespace

TEST(Validate, UniformIsValid) {
    auto d = uniform01();
    EXPECT_EQ(d.kind(), DensityKind::piecewise_constant);
    EXPECT_NEAR(d.mass(), 1.0, 1e-15);
    EXPECT_EQ(d.support(), Interval(0, 1));
}

TEST(Validate, SawtoothSupport) {
    const auto& s = builtin("sawtooth");
    EXPECT_EQ(s.p.support(), Interval(0, 1000));
    EXPECT_EQ(s.p.kind(), DensityKind::smooth_piecewise);
    EXPECT_NEAR(s.p.mass(), 1.0, 1e-10);
}

TEST(Validate, MassErrorReportsMass) {
    const double b[] = {0.0, 1.0};
    const double v[] = {2.0};
    try {
        piecewise_constant(b, v);
        FAIL() << "expected DensityError";
    } catch (const DensityError& e) {
        EXPECT_NEAR(e.mass(), 2.0, 1e-14);
        EXPECT_NE(std::string(e.what()).find("2"), std::string::npos);
    }
}

TEST(Validate, NegativeDipRejected) {
    auto f = build([](double x) { return 1.0 + 1.5 * std::cos(2.0 * std::numbers::pi * x); }, Interval(0, 1));
    EXPECT_THROW(validate(f), DensityError);
}

TEST(Validate, TinyNegativeClipped) {
    const double b[] = {0.0, 1.0, 2.0};
    const double v[] = {1.0, -1e-16};
    auto d = piecewise_constant(b, v);
    EXPECT_EQ(d(1.5), 0.0);
    EXPECT_EQ(d(3.0), 0.0);
    EXPECT_EQ(d(0.5), 1.0);
}

TEST(Cdf, Uniform) { EXPECT_NEAR(cdf(uniform01())(0.3), 0.3, 1e-15); }

TEST(Cdf, Sawtooth) {
    const auto& F = cdf(builtin("sawtooth").p);
    EXPECT_NEAR(F(1.5), 1.25e-3, 1e-14);
    EXPECT_NEAR(F(0.0), 0.0, 1e-15);
    EXPECT_NEAR(F(1000.0), 1.0, 1e-10);
    EXPECT_EQ(F(-5.0), 0.0);
    EXPECT_EQ(F(2000.0), 1.0);
}

TEST(Cdf, Bimodal) { EXPECT_NEAR(cdf(builtin("bimodal").p)(100.0), 100.0 * 100.0 / 20200.0, 1e-13); }

TEST(Cdf, NondecreasingOnRandomPairs) {
    std::mt19937_64 rng(11);
    for (auto name : kSuiteNames) {
        const auto& s = builtin(name);
        const auto iv = s.p.support();
        std::uniform_real_distribution<double> U(iv.lo, iv.hi);
        const auto& F = cdf(s.p);
        for (int i = 0; i < 1000; ++i) {
            double a = U(rng), b = U(rng);
            if (a > b) std::swap(a, b);
            EXPECT_LE(F(a), F(b) + 1e-15) << name << " at " << a << ", " << b;
        }
    }
}

TEST(Quantile, Examples) {
    EXPECT_NEAR(quantile(uniform01(), 0.25), 0.25, 1e-15);
    EXPECT_NEAR(quantile(builtin("sawtooth").p, 1e-3), 1.0, 1e-12);
    EXPECT_EQ(quantile(builtin("bimodal").p, 0.0), 0.0);
    EXPECT_EQ(quantile(builtin("smooth").p, 0.0), -1.0);
    EXPECT_THROW(quantile(uniform01(), 1.5), DomainError);
}

TEST(Quantile, ResidualAndRoundTrip) {
    std::mt19937_64 rng(5);
    for (auto name : kSuiteNames) {
        const auto& s = builtin(name);
        const auto iv = s.p.support();
        const auto& F = cdf(s.p);
        std::uniform_real_distribution<double> U(iv.lo, iv.hi), V(0.0, 1.0);
        int checked = 0;
        while (checked < 1000) {
            const double x = U(rng);
            if (!(s.p(x) > 1e-9)) continue;
            ++checked;
            EXPECT_NEAR(quantile(s.p, F(x)), x, 1e-9) << name;
        }
        for (int i = 0; i < 200; ++i) {
            const double u = V(rng);
            const double x = quantile(s.p, u);
            if (s.p(x) > 1e-9) EXPECT_NEAR(F(x), u, 1e-12) << name;
        }
    }
}

TEST(Sample, Deterministic) {
    const auto& p = builtin("smooth").p;
    auto a = sample(p, 5, 42), b = sample(p, 5, 42);
    EXPECT_EQ(a.draws, b.draws);
    EXPECT_EQ(a.generator, std::string(kGeneratorName));
    EXPECT_EQ(a.seed, 42u);
    EXPECT_NE(sample(p, 5, 43).draws, a.draws);
    EXPECT_THROW(sample(p, 0, 1), DomainError);
}

TEST(Sample, UniformMean) {
    const auto& q = builtin("sawtooth").q;
    auto s = sample(q, 10000, 3);
    double m = 0.0;
    for (double x : s.draws) m += x;
    m /= s.n();
    EXPECT_NEAR(m, 500.0, 15.0);
}

TEST(Sample, LowSquareDrawsInOddCells) {
    auto s = sample(builtin("step2").p, 10000, 9);
    for (double x : s.draws) {
        const double k = std::floor(x);
        EXPECT_EQ(static_cast<long>(k) % 2, 0) << x;
        EXPECT_GT(x, k);
    }
}

TEST(Sample, KolmogorovNullSanity) {
    const std::size_t n = 100000;
    for (auto name : kSuiteNames) {
        const auto& s = builtin(name);
        auto draws = sample(s.p, n, 17).draws;
        EXPECT_LE(kolmogorov_distance(draws, cdf(s.p)), 3.0 * 2.0 / std::sqrt(double(n))) << name;
    }
}

TEST(DensityIo, SpecRoundTrip) {
    const auto& p = builtin("bimodal").p;
    std::stringstream ss;
    write_density_spec(ss, p);
    auto back = parse_density_spec(ss, "copy");
    for (double x : {0.0, 13.5, 100.0, 100.5, 101.0, 150.0, 202.0}) EXPECT_NEAR(back(x), p(x), 1e-16);
    EXPECT_EQ(back.support(), p.support());
}

TEST(DensityIo, ParsesCommentsAndConstants) {
    std::istringstream in("# a step\nsupport 0 2\n0 1 0.25\n\n1 2 0.75   # upper half\n");
    auto d = parse_density_spec(in);
    EXPECT_EQ(d.kind(), DensityKind::piecewise_constant);
    EXPECT_DOUBLE_EQ(d(1.5), 0.75);
}

TEST(DensityIo, ErrorsCarryLineNumbers) {
    auto line_of = [](const std::string& text) {
        std::istringstream in(text);
        try {
            parse_density_spec(in);
        } catch (const ParseError& e) {
            return e.line();
        }
        return std::size_t(999);
    };
    EXPECT_EQ(line_of("support 0 1\n0 1 abc\n"), 2u);
    EXPECT_EQ(line_of("0 1 1\n"), 1u);
    EXPECT_EQ(line_of("support 0 2\n0 1 1\n1.5 2 1\n"), 3u);
    EXPECT_EQ(line_of("support 1 0\n"), 1u);
    std::istringstream missing("support 0 2\n0 1 1\n");
    EXPECT_THROW(parse_density_spec(missing), ParseError);
}

TEST(DensityIo, SamplesRoundTrip) {
    auto s = sample(builtin("step").p, 20, 77);
    std::stringstream ss;
    write_samples(ss, s);
    auto back = read_samples(ss);
    EXPECT_EQ(back.draws, s.draws);
    EXPECT_EQ(back.seed, 77u);
    EXPECT_EQ(back.source, "step");
    EXPECT_EQ(back.generator, std::string(kGeneratorName));
}

TEST(DensityIo, SamplesErrors) {
    std::istringstream bad("0.5\nfoo\n");
    try {
        read_samples(bad);
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2u);
    }
    std::istringstream empty("# seed=1\n");
    EXPECT_THROW(read_samples(empty), ParseError);
}
