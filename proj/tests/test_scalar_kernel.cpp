#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "radns/cutoff.hpp"
#include "radns/scalar_kernel.hpp"

using namespace radns;

namespace {

// plain bisection on a monotone function, independent of the library's inverse
template <class F>
auto bisect(F f, double lo, double hi) -> double {
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if ((f(lo) < 0) == (f(mid) < 0)) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

auto log_grid(double lo, double hi, int count) -> std::vector<double> {
    std::vector<double> ys;
    for (int i = 0; i < count; ++i) ys.push_back(std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * i / (count - 1)));
    return ys;
}

}  // namespace

TEST(ConvexEval, ReferenceValues) {
    EXPECT_EQ(convex_eval(ConvexFn::Psi, 1.0), 0.0);
    EXPECT_NEAR(convex_eval(ConvexFn::H, std::exp(-1.0)), -std::exp(-1.0), 1e-15);
    EXPECT_NEAR(convex_eval(ConvexFn::G, std::numbers::e), 1.0, 1e-15);
    EXPECT_THROW(convex_eval(ConvexFn::G, 0.0), DomainError);
    EXPECT_THROW(convex_eval(ConvexFn::Psi, -1.0), DomainError);
}

TEST(BranchInverse, PsiAtZero) {
    EXPECT_EQ(psi_right_inv(0.0), 1.0);
    EXPECT_EQ(psi_left_inv(0.0), 1.0);
}

TEST(BranchInverse, PsiRightAtOneMatchesBisection) {
    const double oracle = bisect([](double z) { return z - 1.0 - std::log(z) - 1.0; }, 1.0, 10.0);
    EXPECT_NEAR(oracle, 3.1462, 5e-5);
    EXPECT_NEAR(psi_right_inv(1.0), oracle, 1e-12);
}

TEST(BranchInverse, RoundTripOnLogGrid) {
    struct Case {
        ConvexFn fn;
        Branch br;
        double lo, hi;
    };
    const Case cases[] = {{ConvexFn::G, Branch::Right, 1e-8, 1e2},
                          {ConvexFn::G, Branch::Left, 1e-8, 0.99},
                          {ConvexFn::Psi, Branch::Right, 1e-8, 1e2},
                          {ConvexFn::Psi, Branch::Left, 1e-8, 1e2},
                          {ConvexFn::H, Branch::Right, 1e-8, 1e2}};
    for (const auto& c : cases) {
        for (double y : log_grid(c.lo, c.hi, 64)) {
            const double z = branch_inverse(c.fn, c.br, y);
            EXPECT_LE(std::abs(convex_eval(c.fn, z) - y), 1e-12) << to_string(c.fn) << " y=" << y;
            if (c.br == Branch::Right) EXPECT_GE(z, convex_argmin(c.fn));
            else EXPECT_LE(z, convex_argmin(c.fn));
        }
    }
}

TEST(BranchInverse, Errors) {
    EXPECT_THROW(branch_inverse(ConvexFn::H, Branch::Left, 0.5), UnsupportedError);
    EXPECT_THROW(branch_inverse(ConvexFn::Psi, Branch::Right, -0.1), DomainError);
    EXPECT_THROW(branch_inverse(ConvexFn::G, Branch::Left, 1.0), DomainError);
    EXPECT_THROW(branch_inverse(ConvexFn::Psi, Branch::Left, std::nan("")), DomainError);
}

TEST(Envelope, GammaIsOneAtTimeZero) {
    for (double a : {0.05, 0.1, 0.5})
        for (double z : {0.1, 1.0, 4.0}) EXPECT_EQ(envelope_gamma({a, 0.5, 3, 0.3}, z, 0.0), 1.0);
}

TEST(Envelope, TimeZeroDirectEvaluation) {
    const EnvelopeParams p{0.1, 0.08, 3, 0.3};
    const double z = 1.0;
    const double h = std::pow(std::pow(0.1, 3) + 3.0 * z * psi_left_inv(0.08 / z), -4.0 / 3.0);
    const double f = std::exp(0.08 * h);
    const EnvelopeBounds b = envelope_bounds(p, z, 0.0);
    EXPECT_NEAR(b.v_upper, 0.08 * f * std::exp(0.08 * h * f), 1e-12 * b.v_upper);
    EXPECT_NEAR(b.v_lower, 0.08 / f, 1e-12 * b.v_lower);
}

TEST(Envelope, UpperGrowsAndIntervalWidensInTime) {
    const EnvelopeParams p{0.1, 0.5, 3, 0.3};
    for (double z : {0.25, 0.5, 1.0, 2.0, 4.0}) {
        double prev = -std::numeric_limits<double>::infinity();
        for (double t = 0.0; t <= 1.0; t += 0.125) {
            const EnvelopeBounds b = envelope_bounds(p, z, t);
            EXPECT_GE(b.log_upper, prev);
            prev = b.log_upper;
        }
        const auto b0 = envelope_bounds(p, z, 0.0);
        const auto b1 = envelope_bounds(p, z, 1.0);
        EXPECT_LE(b1.log_lower, b0.log_lower);
        EXPECT_GE(b1.log_upper, b0.log_upper);
    }
}

TEST(SetFunctions, LimitsAtZeroMeasureDecrease) {
    for (double z : {0.1, 1.0, 10.0}) {
        for (auto f : {&f1, &f2, &f3}) {
            double prev = std::numeric_limits<double>::infinity();
            for (int k = 1; k <= 8; ++k) {
                const double val = f(std::pow(10.0, -k), z);
                EXPECT_LT(val, prev);
                EXPECT_GE(val, 0.0);
                prev = val;
            }
            // f1, f3 ~ z / log(z/y): the decay is only logarithmic
            EXPECT_LT(prev, 1.5 * z / std::log(z * 1e8));
        }
    }
}

TEST(SetFunctions, OmegaOneOnUnitBall) {
    for (double z : {0.1, 1.0, 3.0}) {
        const double expect = branch_inverse(ConvexFn::G, Branch::Right, 3.0 * z) / 3.0;
        EXPECT_NEAR(omega_bounds(1.0 / 3.0, z, OmegaKind::Omega1), expect, 1e-13 * expect);
    }
}

TEST(SetFunctions, F2MonotoneWithClosedFormSlope) {
    const double z = 1.0;
    for (double y = 0.05; y < 5.0; y *= 1.3) {
        const double h = 1e-6 * y;
        const double fd = (f2(y + h, z) - f2(y - h, z)) / (2.0 * h);
        EXPECT_GT(f2(y * 1.3, z), f2(y, z));
        EXPECT_GT(fd, 0.0);
        EXPECT_NEAR(fd, df2_dy(y, z), 1e-6 * std::abs(fd));
        EXPECT_NEAR((f1(y + h, z) - f1(y - h, z)) / (2.0 * h), df1_dy(y, z), 1e-6 * df1_dy(y, z));
        EXPECT_NEAR((f3(y + h, z) - f3(y - h, z)) / (2.0 * h), df3_dy(y, z), 1e-6 * std::abs(df3_dy(y, z)));
    }
}

TEST(Cutoff, ChiProperties) {
    EXPECT_EQ(chi(-0.5), 1.0);
    EXPECT_EQ(chi(0.0), 1.0);
    EXPECT_EQ(chi(1.0), 0.0);
    EXPECT_EQ(chi(2.0), 0.0);
    for (double s = 0.0; s <= 1.0; s += 0.01) EXPECT_LE(std::abs(chi_deriv(s)), 2.0);
    EXPECT_EQ(chi_inner(0.1, 0.1), 0.0);
    EXPECT_EQ(chi_inner(0.2, 0.1), 1.0);
    EXPECT_EQ(chi_outer(0.4, 1.0), 1.0);
    EXPECT_EQ(chi_outer(1.0, 1.0), 0.0);
}
