#include <gtest/gtest.h>

#include <cmath>

#include "radns/initial_data.hpp"
#include "radns/weak_form.hpp"

using namespace radns;

namespace {

auto constant_profiles(double a, int points, std::vector<double> times) -> std::vector<RadialProfile> {
    std::vector<RadialProfile> out;
    for (double t : times) {
        RadialProfile p;
        p.t = t;
        p.a = a;
        p.n = 3;
        p.r = uniform_r_grid(a, 3.0, points);
        const std::size_t M = p.r.size();
        p.r_edge = 3.0;
        p.rho.assign(M, 1.0);
        p.u.assign(M, 0.0);
        p.e.assign(M, 1.0);
        p.ur.assign(M, 0.0);
        p.er.assign(M, 0.0);
        p.phi.assign(M, 1.0);
        p.x.assign(M, 0.0);
        out.push_back(p);
    }
    return out;
}

auto bump_fn(double c, double w) -> TestFunction {
    TestFunction f;
    f.id = "b";
    f.kind = TestKind::BumpProduct;
    f.cls = BoundaryClass::D0a;
    f.center = c;
    f.width = w;
    f.t_scale = 0.2;
    return f;
}

const Trajectory& shared_run() {
    static const Trajectory traj = [] {
        FluidParams p;
        SolverConfig cfg;
        cfg.N = 256;
        cfg.T = 0.1;
        cfg.keep_all_steps = true;
        return run(build_lagrangian(gaussian_bump(p), 0.1, 4.0, 256, 3).to_state(), p, cfg);
    }();
    return traj;
}

auto run_profiles(const Trajectory& tr, int points) -> std::vector<RadialProfile> {
    double r_hi = 0.0;
    for (const auto& s : tr.states) r_hi = std::max(r_hi, s.r_edge());
    const auto grid = uniform_r_grid(tr.states.front().a, 1.5 * r_hi, points);
    std::vector<RadialProfile> out;
    for (const auto& s : tr.states) out.push_back(cutoff_extend(pullback(s, grid), s.r_edge()));
    return out;
}

}  // namespace

TEST(Catalog, TwelveFunctions) {
    const auto cat = standard_catalog(0.1, 2.0, 0.5);
    ASSERT_EQ(cat.size(), 12u);
    int bumps = 0;
    for (const auto& f : cat) {
        EXPECT_LE(f.support_max(), 2.0);
        if (f.cls == BoundaryClass::D0a) {
            ++bumps;
            EXPECT_TRUE(f.vanishes_at(0.1)) << f.id;
        } else {
            EXPECT_FALSE(f.vanishes_at(0.1)) << f.id;
        }
    }
    EXPECT_EQ(bumps, 6);
}

TEST(TestFunctionShape, DerivativeMatchesDifference) {
    const auto cat = standard_catalog(0.1, 2.0, 0.5);
    for (const auto& f : cat) {
        for (double r : {0.3, 0.55, 0.8, 1.1}) {
            const double h = 1e-6;
            EXPECT_NEAR(f.dA(r), (f.A(r + h) - f.A(r - h)) / (2 * h), 1e-4) << f.id << " " << r;
        }
        EXPECT_NEAR(f.IB(0.0, 0.3), 0.3 + 0.5 / (std::numbers::pi / 0.5) * (1.0 - std::cos(std::numbers::pi * 0.3 / 0.5)),
                    1e-14);
    }
}

TEST(WeakResidual, ConstantStateRoundOff) {
    FluidParams p;
    const auto profs = constant_profiles(0.1, 801, {0.0, 0.05, 0.1, 0.2});
    const TestFunction f = bump_fn(0.8, 0.4);
    EXPECT_LT(weak_residual(profs, WeakEq::Continuity, f, p).residual, 1e-13);
    EXPECT_LT(weak_residual(profs, WeakEq::Energy, f, p).residual, 1e-13);
    TestFunction cut;
    cut.kind = TestKind::PolynomialCutoff;
    cut.cls = BoundaryClass::Da;
    cut.center = 1.0;
    cut.width = 0.5;
    EXPECT_LT(weak_residual(profs, WeakEq::Continuity, cut, p).residual, 1e-13);
    // only the pressure term survives; it integrates an exact derivative
    const WeakResidual mom = weak_residual(profs, WeakEq::Momentum, f, p);
    EXPECT_LT(std::abs(mom.raw), 1e-4);
}

TEST(WeakResidual, RunIsSmallAndWrongSignIsNot) {
    const Trajectory& tr = shared_run();
    auto profs = run_profiles(tr, 2049);
    const TestFunction f = bump_fn(0.7, 0.3);
    const double good = weak_residual(profs, WeakEq::Continuity, f, tr.params).residual;
    EXPECT_LT(good, 5e-2);
    for (auto& p : profs)
        for (auto& u : p.u) u = -u;
    const double bad = weak_residual(profs, WeakEq::Continuity, f, tr.params).residual;
    EXPECT_GT(bad, 10.0 * good);
}

TEST(WeakResidual, TableCoversCatalog) {
    const Trajectory& tr = shared_run();
    const double r_edge0 = tr.states.front().r_edge();
    const auto cat = standard_catalog(tr.states.front().a, r_edge0, tr.states.back().t);
    const auto rows = weak_residual_table(tr, cat, 2049);
    EXPECT_EQ(rows.size(), 12u + 6u + 12u);
    for (const auto& row : rows) {
        EXPECT_TRUE(std::isfinite(row.residual));
        EXPECT_LT(row.residual, 0.2) << to_string(row.eq) << " " << row.phi_id;
        EXPECT_EQ(row.N, 256);
    }
}

TEST(WeakResidual, Contracts) {
    FluidParams p;
    const auto profs = constant_profiles(0.1, 201, {0.0, 0.1});
    TestFunction cut;
    cut.id = "cut";
    cut.kind = TestKind::PolynomialCutoff;
    cut.cls = BoundaryClass::Da;
    cut.center = 1.0;
    cut.width = 0.5;
    EXPECT_THROW(weak_residual(profs, WeakEq::Momentum, cut, p), ContractError);

    const TestFunction f = bump_fn(0.8, 0.4);
    EXPECT_THROW(weak_residual({profs[0]}, WeakEq::Continuity, f, p), ContractError);

    auto mismatched = profs;
    mismatched[1].r[5] += 1e-9;
    EXPECT_THROW(weak_residual(mismatched, WeakEq::Continuity, f, p), ContractError);

    auto backwards = profs;
    backwards[1].t = 0.0;
    EXPECT_THROW(weak_residual(backwards, WeakEq::Continuity, f, p), ContractError);

    EXPECT_THROW(weak_residual(profs, WeakEq::Continuity, bump_fn(2.9, 0.5), p), ContractError);
}
