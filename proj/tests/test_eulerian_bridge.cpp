#include <gtest/gtest.h>

#include <cmath>

#include "radns/eulerian_bridge.hpp"
#include "radns/initial_data.hpp"
#include "radns/lagrangian_solver.hpp"

using namespace radns;

namespace {

auto uniform_state(double a, double k, int N, double v, double e) -> LagrangianState {
    LagrangianState s;
    s.a = a;
    s.k = k;
    s.n = 3;
    s.v.assign(N, v);
    s.e.assign(N, e);
    s.u.assign(N + 1, 0.0);
    s.r = reconstruct_radius(s.v, a, 3, s.dx());
    return s;
}

}  // namespace

TEST(Pullback, ConstantState) {
    const LagrangianState s = uniform_state(0.1, 2.0, 64, 1.0, 1.0);
    const RadialProfile p = eulerian_profile(s, 300);
    for (std::size_t i = 0; i < p.r.size(); ++i) {
        EXPECT_EQ(p.rho[i], 1.0);
        EXPECT_EQ(p.u[i], 0.0);
        EXPECT_EQ(p.e[i], 1.0);
    }
}

TEST(Pullback, ClosedFormInverse) {
    LagrangianState s = uniform_state(0.2, 2.0, 40, 1.0, 1.0);
    for (int j = 0; j <= s.N(); ++j) s.u[j] = 0.01 * s.node_x(j) * (s.k - s.node_x(j));
    for (int c = 0; c < s.N(); ++c) s.e[c] = 1.0 + 0.1 * c;
    for (double x0 : {0.05, 0.5, 1.3, 1.95}) {
        const double rq = std::cbrt(0.008 + 3.0 * x0);
        EXPECT_NEAR(mass_coordinate(s, rq), x0, 1e-13);
        const RadialProfile p = pullback(s, {rq});
        const int c = static_cast<int>(x0 / s.dx());
        // u is linear in r between nodes
        const double lam = (rq - s.r[c]) / (s.r[c + 1] - s.r[c]);
        EXPECT_NEAR(p.u[0], (1 - lam) * s.u[c] + lam * s.u[c + 1], 1e-15);
        EXPECT_EQ(p.rho[0], 1.0);
        EXPECT_NEAR(p.x[0], x0, 1e-13);
    }
}

TEST(Pullback, ChainRuleForEnergyGradient) {
    FluidParams p;
    const int N = 2048;
    LagrangianState s = build_lagrangian(gaussian_bump(p), 0.1, 4.0, N, 3).to_state();
    for (int c = 0; c < N; ++c) {
        const double x = s.cell_x(c);
        s.e[c] = 1.0 + 0.3 * std::exp(-4.0 * (x - 1.5) * (x - 1.5));
    }
    // r^m D_x e / v at interior nodes; the Eulerian grid is the node radii
    std::vector<double> rn, g;
    for (int j = 1; j < N; ++j) {
        const double V = 0.5 * (s.v[j - 1] + s.v[j]);
        rn.push_back(s.r[j]);
        g.push_back(s.r[j] * s.r[j] * (s.e[j] - s.e[j - 1]) / (s.dx() * V));
    }
    const RadialProfile prof = pullback(s, rn);
    double err = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < rn.size(); ++i) {
        err = std::max(err, std::abs(prof.er[i] - g[i]));
        scale = std::max(scale, std::abs(g[i]));
    }
    EXPECT_LE(err / scale, 1e-4);
}

TEST(CutoffExtend, InteriorAndFarField) {
    FluidParams p;
    const LagrangianState s = build_lagrangian(gaussian_bump(p), 0.1, 4.0, 256, 3).to_state();
    const double re = s.r_edge();
    const std::vector<double> grid = {0.4 * re, re, 1.2 * re};
    const RadialProfile raw = pullback(s, grid);
    const RadialProfile ext = cutoff_extend(raw, re);
    EXPECT_EQ(ext.rho[0], raw.rho[0]);
    EXPECT_EQ(ext.u[0], raw.u[0]);
    EXPECT_EQ(ext.e[0], raw.e[0]);
    for (int i : {1, 2}) {
        EXPECT_EQ(ext.rho[i], 1.0);
        EXPECT_EQ(ext.u[i], 0.0);
        EXPECT_EQ(ext.e[i], 1.0);
        EXPECT_EQ(ext.phi[i], 0.0);
    }
    // phi depends on r and the frozen edge only: no time derivative along fixed r
    EXPECT_EQ(cutoff_extend(raw, re).phi, ext.phi);
    EXPECT_THROW(cutoff_extend(raw, 0.05), InvalidStateError);
}

TEST(Jacobian, ClosedForms) {
    const LagrangianState one = uniform_state(1.0, 2.0, 16, 1.0, 1.0);
    EXPECT_DOUBLE_EQ(jacobian(one)[0], 1.0);
    const LagrangianState s = uniform_state(0.3, 2.0, 32, 1.0, 1.0);
    const auto J = jacobian(s);
    for (int j = 0; j <= s.N(); ++j)
        EXPECT_NEAR(J[j], std::pow(0.027 + 3.0 * s.node_x(j), -2.0 / 3.0), 1e-13);
}

TEST(Jacobian, PositiveAlongBumpRun) {
    FluidParams p;
    SolverConfig cfg;
    cfg.N = 256;
    cfg.T = 0.2;
    const Trajectory tr = run(build_lagrangian(gaussian_bump(p), 0.1, 4.0, 256, 3).to_state(), p, cfg);
    for (const auto& s : tr.states)
        for (double J : jacobian(s)) EXPECT_GT(J, 0.0);
}
