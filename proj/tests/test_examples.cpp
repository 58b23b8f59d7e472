#include <gtest/gtest.h>

#include <cmath>

#include "gof/examples.hpp"
#include "oracles.hpp"

using namespace gof;

TEST(Builtin, UnknownNameListsSuites) {
    try {
        builtin("gaussian");
        FAIL();
    } catch (const DomainError& e) {
        const std::string msg = e.what();
        for (auto n : kSuiteNames) EXPECT_NE(msg.find(std::string(n)), std::string::npos);
    }
}

TEST(Builtin, SameObjectOnRepeatedCalls) { EXPECT_EQ(&builtin("step"), &builtin("step")); }

TEST(Builtin, ClosedFormSpotValues) {
    EXPECT_EQ(builtin("sawtooth").Pscript_analytic(2e-3), 1.0);
    EXPECT_NEAR(builtin("bimodal").P_analytic(101.0), 0.5, 1e-15);
    EXPECT_EQ(builtin("step2").Pscript_analytic(0.05), 0.0);
    EXPECT_FALSE(builtin("smooth").Pscript_analytic);
}

TEST(Builtin, CdfMatchesClosedForm) {
    for (auto name : kSuiteNames) {
        const auto& s = builtin(name);
        const auto iv = s.p.support();
        double worst = 0.0;
        for (int i = 0; i <= 10000; ++i) {
            const double x = iv.lo + iv.width() * i / 10000.0;
            worst = std::max(worst, std::abs(cdf(s.p)(x) - s.P_analytic(x)));
        }
        EXPECT_LE(worst, 1e-9) << name;
    }
}

TEST(Builtin, RearrangedMatchesClosedForm) {
    for (auto name : {"sawtooth", "bimodal", "step", "step2"}) {
        const auto& s = builtin(name);
        const auto& r = s.rearranged;
        double worst = 0.0;
        for (int i = 0; i <= 10000; ++i) {
            const double x = 1.1 * r.max_p() * i / 10000.0;
            bool at_atom = false;
            for (const auto& a : r.atoms()) at_atom = at_atom || x == a.level;
            if (at_atom) continue;
            worst = std::max(worst, std::abs(r(x) - s.Pscript_analytic(x)));
        }
        EXPECT_LE(worst, 1e-8) << name;
        for (const auto& a : r.atoms()) {
            EXPECT_EQ(r(a.level), s.Pscript_analytic(a.level)) << name;
            EXPECT_EQ(r.left_limit(a.level), s.Pscript_analytic(std::nextafter(a.level, 0.0))) << name;
        }
    }
}

TEST(Builtin, AlternativesIntegrateToOne) {
    for (auto name : kSuiteNames) {
        const auto& q = builtin(name).q;
        EXPECT_NEAR(definite_integral(q.pdf()), 1.0, 1e-10) << name;
        EXPECT_NEAR(q.mass(), 1.0, 1e-10) << name;
    }
}

TEST(Builtin, SmoothAlternativeIsTruncatedLaplace) {
    const auto& q = builtin("smooth").q;
    const double k = 2.0 - 2.0 * std::exp(-1.0);
    for (double x : {-1.0, -0.3, 0.0, 0.7, 1.0}) EXPECT_NEAR(q(x), std::exp(-std::abs(x)) / k, 1e-14);
}

TEST(SmoothConstant, RangeAndOracle) {
    const double c = smooth_constant();
    EXPECT_GE(c, 0.35);
    EXPECT_LE(c, 0.45);
    const double gl = oracle::gauss_legendre(oracle::smooth_unnormalized, -1.0, 1.0, 10000);
    EXPECT_NEAR(c, 1.0 / gl, 1e-9);
    EXPECT_NEAR(c, 0.395209482167027, 1e-13);
    EXPECT_NEAR(definite_integral(builtin("smooth").p.pdf()), 1.0, 1e-10);
}
