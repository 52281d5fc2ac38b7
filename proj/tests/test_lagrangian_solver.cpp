#include <gtest/gtest.h>

#include <cmath>

#include "radns/initial_data.hpp"
#include "radns/lagrangian_solver.hpp"

using namespace radns;

namespace {

auto constant_state(double a, double k, int N) -> LagrangianState {
    LagrangianState s;
    s.a = a;
    s.k = k;
    s.n = 3;
    s.v.assign(N, 1.0);
    s.e.assign(N, 1.0);
    s.u.assign(N + 1, 0.0);
    s.r = reconstruct_radius(s.v, a, 3, s.dx());
    return s;
}

auto advance(LagrangianState s, const FluidParams& p, double T, int steps) -> LagrangianState {
    ImplicitStepper st(p);
    for (int i = 0; i < steps; ++i) s = st.step(s, T / steps);
    return s;
}

auto linf(const LagrangianState& s, const LagrangianState& q) -> double {
    double d = 0.0;
    for (std::size_t j = 0; j < s.u.size(); ++j) d = std::max(d, std::abs(s.u[j] - q.u[j]));
    for (std::size_t c = 0; c < s.e.size(); ++c) d = std::max({d, std::abs(s.e[c] - q.e[c]), std::abs(s.v[c] - q.v[c])});
    return d;
}

// L1 distance of u (nodes) and e (cells) to a reference on a grid refined by an integer factor
auto l1_to_reference(const LagrangianState& s, const LagrangianState& ref) -> double {
    const int N = s.N();
    const int q = ref.N() / N;
    double d = 0.0;
    for (int j = 0; j <= N; ++j) d += std::abs(s.u[j] - ref.u[q * j]) * s.dx();
    for (int c = 0; c < N; ++c) {
        double avg = 0.0;
        for (int i = 0; i < q; ++i) avg += ref.e[q * c + i];
        d += std::abs(s.e[c] - avg / q) * s.dx();
    }
    return d;
}

}  // namespace

TEST(Reconstruct, ClosedForms) {
    const int N = 50;
    const double a = 0.3, dx = 0.04;
    for (double c : {1.0, 0.5, 2.5}) {
        const auto r = reconstruct_radius(std::vector<double>(N, c), a, 3, dx);
        for (int j = 0; j <= N; ++j) EXPECT_NEAR(r[j], std::cbrt(a * a * a + 3.0 * c * j * dx), 1e-14);
    }
}

TEST(Step, ConstantStateIsFixedPoint) {
    FluidParams p;
    const LagrangianState s0 = constant_state(0.1, 2.0, 64);
    for (double dt : {1e-4, 1e-3, 1e-2}) {
        LagrangianState s = s0;
        for (int i = 0; i < 100; ++i) s = step(s, p, dt);
        EXPECT_LE(linf(s, s0), 1e-12);
    }
}

TEST(Step, IncrementIsOrderDt) {
    FluidParams p;
    const LagrangianState s0 = build_lagrangian(gaussian_bump(p), 0.5, 4.0, 128, 3).to_state();
    double prev = 0.0;
    for (double dt : {4e-4, 2e-4, 1e-4, 5e-5}) {
        const double slope = linf(step(s0, p, dt), s0) / dt;
        if (prev > 0.0) {
            EXPECT_NEAR(slope / prev, 1.0, 0.05);
        }
        prev = slope;
    }
}

TEST(Step, BoundaryVelocityExactlyZero) {
    FluidParams p;
    LagrangianState s = build_lagrangian(gaussian_bump(p), 0.1, 4.0, 128, 3).to_state();
    for (int i = 0; i < 10; ++i) {
        s = step(s, p, 1e-3);
        EXPECT_EQ(s.u.front(), 0.0);
        EXPECT_EQ(s.u.back(), 0.0);
    }
}

// Self-convergence of a smooth bump to T = 0.1. Space uses a = 0.5 so the inner cutoff
// layer is resolved by the coarse grids; both use an L1 distance to a fine reference.
TEST(Step, TimeOrderAtLeastOne) {
    FluidParams p;
    const LagrangianState s0 = build_lagrangian(gaussian_bump(p), 0.1, 4.0, 128, 3).to_state();
    const LagrangianState ref = advance(s0, p, 0.1, 3200);
    std::vector<double> err;
    for (int steps : {25, 50, 100}) err.push_back(l1_to_reference(advance(s0, p, 0.1, steps), ref));
    for (std::size_t i = 0; i + 1 < err.size(); ++i) EXPECT_GE(std::log2(err[i] / err[i + 1]), 1.0);
}

TEST(Step, SpaceOrderAtLeastTwo) {
    FluidParams p;
    const RadialData d = gaussian_bump(p);
    auto solve = [&](int N) { return advance(build_lagrangian(d, 0.5, 4.0, N, 3).to_state(), p, 0.1, 50); };
    const LagrangianState ref = solve(8192);
    const double e512 = l1_to_reference(solve(512), ref);
    const double e1024 = l1_to_reference(solve(1024), ref);
    EXPECT_GE(std::log2(e512 / e1024), 2.0);
}

TEST(Run, ConstantDataStaysConstant) {
    FluidParams p;
    SolverConfig cfg;
    cfg.T = 1.0;
    const LagrangianState s0 = constant_state(0.1, 2.0, 64);
    const Trajectory tr = run(s0, p, cfg);
    ASSERT_EQ(tr.states.size(), 17u);
    for (const auto& s : tr.states) EXPECT_LE(linf(s, s0), 1e-12);
    EXPECT_DOUBLE_EQ(tr.states.back().t, 1.0);
}

TEST(Run, BumpInvariants) {
    FluidParams p;
    SolverConfig cfg;
    cfg.N = 256;
    cfg.keep_all_steps = true;
    const LagrangianState s0 = build_lagrangian(gaussian_bump(p), 0.1, 4.0, 256, 3).to_state();
    const Trajectory tr = run(s0, p, cfg);

    // sample times hit exactly and strictly increase
    for (std::size_t i = 1; i < tr.states.size(); ++i) EXPECT_GT(tr.states[i].t, tr.states[i - 1].t);
    EXPECT_DOUBLE_EQ(tr.states.back().t, cfg.T);

    for (const auto& s : tr.states) {
        EXPECT_LE(mass_identity_residual(s), 1e-10);
        for (int c = 0; c < s.N(); ++c) {
            EXPECT_GT(s.v[c], 0.0);
            EXPECT_GT(s.e[c], 0.0);
        }
        for (int j = 1; j <= s.N(); ++j) EXPECT_GT(s.r[j], s.r[j - 1]);
    }
    EXPECT_LE(tr.worst_step_entropy_excess, 0.0);
    EXPECT_GT(tr.min_e, 0.0);

    // total energy: the implicit update removes exactly 1/2 sum (du)^2 dx per step
    auto total = [](const LagrangianState& s) {
        double E = 0.0;
        for (int j = 1; j < s.N(); ++j) E += 0.5 * s.u[j] * s.u[j] * s.dx();
        for (int c = 0; c < s.N(); ++c) E += s.e[c] * s.dx();
        return E;
    };
    const double E0 = total(tr.states.front());
    double numerical = 0.0, drift = 0.0;
    for (std::size_t i = 1; i < tr.states.size(); ++i) {
        const auto& a = tr.states[i - 1];
        const auto& b = tr.states[i];
        for (int j = 1; j < a.N(); ++j) numerical += 0.5 * (b.u[j] - a.u[j]) * (b.u[j] - a.u[j]) * a.dx();
        drift = std::max(drift, std::abs(total(b) + numerical - E0));
    }
    EXPECT_LE(drift, 1e-6 * E0);

    // kinematic form: r(x,t) = r0(x) + int u dt with the right-endpoint rule of the scheme
    std::vector<double> rk = tr.states.front().r;
    double disc = 0.0;
    for (std::size_t i = 1; i < tr.states.size(); ++i) {
        const double dt = tr.states[i].t - tr.states[i - 1].t;
        for (std::size_t j = 0; j < rk.size(); ++j) {
            rk[j] += dt * tr.states[i].u[j];
            disc = std::max(disc, std::abs(rk[j] - tr.states[i].r[j]));
        }
    }
    EXPECT_LE(disc, 1e-6);
}

TEST(Run, AbortsBelowMinimumStep) {
    FluidParams p;
    SolverConfig cfg;
    cfg.N = 64;
    cfg.dt_min = 1e-3;
    cfg.cfl = 1e6;  // first trial step far beyond anything Newton can take
    cfg.max_newton = 1;
    const LagrangianState s0 = build_lagrangian(gaussian_bump(p), 0.1, 4.0, 64, 3).to_state();
    try {
        (void)run(s0, p, cfg);
        FAIL() << "expected RunAborted";
    } catch (const RunAborted& ex) {
        EXPECT_GE(ex.partial().states.size(), 1u);
        EXPECT_GT(ex.partial().rejections, 0);
    }
}

TEST(StableDt, PositiveAndShrinksWithGrid) {
    FluidParams p;
    const double d1 = stable_dt(constant_state(0.1, 2.0, 64), p, 0.4);
    const double d2 = stable_dt(constant_state(0.1, 2.0, 128), p, 0.4);
    EXPECT_GT(d1, 0.0);
    EXPECT_NEAR(d2 / d1, 0.5, 1e-12);
}
