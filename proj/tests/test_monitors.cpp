#include <gtest/gtest.h>

#include <cmath>

#include "radns/eulerian_bridge.hpp"
#include "radns/initial_data.hpp"
#include "radns/lagrangian_solver.hpp"
#include "radns/monitors.hpp"

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

auto bump_run(int N, double T) -> Trajectory {
    FluidParams p;
    const LagrangianData d = build_lagrangian(gaussian_bump(p), 0.1, 4.0, N, 3);
    SolverConfig cfg;
    cfg.N = N;
    cfg.T = T;
    Trajectory traj = run(d.to_state(), p, cfg);
    traj.C0 = data_entropy_constant(d, p);
    return traj;
}

const Trajectory& shared_bump() {
    static const Trajectory traj = bump_run(256, 0.2);
    return traj;
}

}  // namespace

TEST(Entropy, ConstantStateIsZero) {
    FluidParams p;
    const LagrangianState s = uniform_state(0.1, 2.0, 32, 1.0, 1.0);
    EXPECT_EQ(entropy_value(s, p), 0.0);
    const Dissipation d = dissipation(s, p);
    EXPECT_EQ(d.heat, 0.0);
    EXPECT_EQ(d.bulk, 0.0);
    EXPECT_EQ(d.shear, 0.0);
}

TEST(Entropy, UniformEnergyClosedForm) {
    FluidParams p;
    for (double c : {0.5, 2.0, 7.0}) {
        const LagrangianState s = uniform_state(0.1, 3.0, 48, 1.0, c);
        EXPECT_NEAR(entropy_value(s, p), 3.0 * (c - std::log(c) - 1.0), 1e-13);
    }
}

TEST(Entropy, BumpRunSatisfiesInequality) {
    const BoundCheck bc = check_entropy(shared_bump());
    EXPECT_TRUE(bc.satisfied) << bc.margin;
    EXPECT_GT(bc.value, 0.0);
}

TEST(PathBounds, LowerBoundTendsToInnerRadius) {
    const double a = 0.1, C0 = 0.3;
    EXPECT_EQ(path_lower_bound(a, 3, C0, 0.0), a * a * a);
    double prev = path_lower_bound(a, 3, C0, 1e-2);
    for (double x : {1e-4, 1e-6, 1e-8}) {
        const double lb = path_lower_bound(a, 3, C0, x);
        EXPECT_LE(std::abs(lb - a * a * a), std::abs(prev - a * a * a));
        EXPECT_GE(lb, a * a * a);
        prev = lb;
    }
    EXPECT_NEAR(prev, a * a * a, 1e-8);
}

TEST(PathBounds, UnitSpecificVolumeInsideBounds) {
    const LagrangianState s = uniform_state(0.2, 4.0, 64, 1.0, 1.0);
    for (double C0 : {0.0, 0.5, 3.0, 10.0}) {
        const BoundCheck bc = check_path_bounds(s, C0);
        EXPECT_TRUE(bc.satisfied) << C0;
        EXPECT_GE(bc.margin, -1e-15);
    }
    EXPECT_GE(path_upper_bound(3, 0.5, 2.0), 9.0);
}

TEST(PathBounds, BumpRun) {
    const Trajectory& tr = shared_bump();
    for (const auto& s : tr.states) EXPECT_TRUE(check_path_bounds(s, tr.C0).satisfied) << s.t;
}

TEST(Envelope, ConstantState) {
    FluidParams p;
    const LagrangianState s = uniform_state(0.1, 4.0, 64, 1.0, 1.0);
    const BoundCheck bc = check_envelope(s, 0.5, 1.0, p);
    EXPECT_TRUE(bc.satisfied);
    EXPECT_GT(bc.margin, 0.0);
}

TEST(Envelope, WidensInTime) {
    EnvelopeParams ep{0.1, 1.0, 3, FluidParams{}.beta()};
    const EnvelopeBounds b0 = envelope_bounds(ep, 0.5, 0.1);
    const EnvelopeBounds b1 = envelope_bounds(ep, 0.5, 1.0);
    EXPECT_LE(b1.log_lower, b0.log_lower);
    EXPECT_GE(b1.log_upper, b0.log_upper);
}

TEST(Envelope, BumpRun) {
    const Trajectory& tr = shared_bump();
    for (const auto& s : tr.states) EXPECT_TRUE(check_envelope(s, 0.5, tr.C0, tr.params).satisfied) << s.t;
}

TEST(MeanValue, ConstantState) {
    FluidParams p;
    const LagrangianState s = uniform_state(0.1, 3.0, 60, 1.0, 1.0);
    const MeanValueReport rep = cell_mean_values(s, 0.0, p);
    ASSERT_EQ(rep.cells.size(), 3u);
    for (const auto& c : rep.cells) {
        EXPECT_TRUE(c.found_v);
        EXPECT_TRUE(c.found_e);
        EXPECT_EQ(c.v_mean, 1.0);
    }
    EXPECT_TRUE(rep.check.satisfied);
}

TEST(MeanValue, BumpRun) {
    const Trajectory& tr = shared_bump();
    for (const auto& s : tr.states) {
        const MeanValueReport rep = cell_mean_values(s, tr.C0, tr.params);
        EXPECT_EQ(rep.cells.size(), 4u);
        EXPECT_TRUE(rep.check.satisfied) << s.t << " " << rep.check.margin;
        EXPECT_LT(rep.v_lo, 1.0);
        EXPECT_GT(rep.v_hi, 1.0);
    }
}

TEST(SupEstimates, ConstantTrajectoryIsZero) {
    Trajectory tr;
    for (double t : {0.0, 0.5, 1.0}) {
        LagrangianState s = uniform_state(0.1, 2.0, 32, 1.0, 1.0);
        s.t = t;
        tr.states.push_back(s);
    }
    const SupEstimates se = sup_estimates(tr, 0.5);
    EXPECT_EQ(se.u_over_sqrt_e, 0.0);
    EXPECT_EQ(se.log_e, 0.0);
    EXPECT_NEAR(se.predicted_log, 2.0, 1e-14);
    EXPECT_THROW(sup_estimates(tr, 0.05), DomainError);
    EXPECT_THROW(sup_estimates(tr, 1.0), DomainError);
    EXPECT_THROW(sup_estimates(Trajectory{}, 0.5), InsufficientDataError);
}

TEST(UniformIntegrability, ConstantProfile) {
    const LagrangianState s = uniform_state(0.1, 4.0, 64, 1.0, 1.0);
    const RadialProfile p = eulerian_profile(s, 512);
    EXPECT_NEAR(entropy_bound_CT({p}), 0.0, 1e-15);
    const auto sets = random_intervals(p.a, p.r.back(), 50, 7);
    const BoundCheck bc = uniform_integrability(p, sets, 1.0);
    EXPECT_TRUE(bc.satisfied) << bc.margin;
    for (const Interval& E : sets) {
        const double mass = detail::interval_integral(p, E, [&](std::size_t i) { return p.rho[i]; });
        EXPECT_NEAR(mass, (std::pow(E.hi, 3) - std::pow(E.lo, 3)) / 3.0, 1e-14);
    }
    const BoundCheck tight = uniform_integrability(p, sets, 1e-12);
    EXPECT_TRUE(tight.satisfied) << tight.margin;
    const BoundCheck empty = uniform_integrability(p, {Interval{0.5, 0.5}}, 1.0);
    EXPECT_TRUE(empty.satisfied);
    EXPECT_EQ(empty.margin, 0.0);
}

TEST(UniformIntegrability, BumpRun) {
    const Trajectory& tr = shared_bump();
    std::vector<RadialProfile> profs;
    for (const auto& s : tr.states) profs.push_back(eulerian_profile(s, 1024));
    const double CT = entropy_bound_CT(profs);
    EXPECT_GT(CT, 0.0);
    for (const auto& p : profs) {
        const BoundCheck bc = uniform_integrability(p, random_intervals(p.a, p.r.back(), 40, 11), CT);
        EXPECT_TRUE(bc.satisfied) << p.t << " " << bc.margin;
    }
}

TEST(UniformIntegrability, IntervalsAreDeterministic) {
    const auto a = random_intervals(0.1, 2.0, 20, 42);
    const auto b = random_intervals(0.1, 2.0, 20, 42);
    const auto c = random_intervals(0.1, 2.0, 20, 43);
    ASSERT_EQ(a.size(), 20u);
    bool differs = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].lo, b[i].lo);
        EXPECT_EQ(a[i].hi, b[i].hi);
        EXPECT_LE(a[i].lo, a[i].hi);
        EXPECT_GE(a[i].lo, 0.1);
        EXPECT_LE(a[i].hi, 2.0);
        differs = differs || a[i].lo != c[i].lo;
    }
    EXPECT_TRUE(differs);
}

TEST(HighOrder, ConstantTrajectoryIsZero) {
    Trajectory tr;
    for (double t : {0.0, 0.5, 1.0, 1.5}) {
        LagrangianState s = uniform_state(0.1, 2.0, 32, 1.0, 1.0);
        s.t = t;
        tr.states.push_back(s);
    }
    const HighOrderReport rep = high_order_functional(tr, 0.5);
    EXPECT_EQ(rep.value, 0.0);
    EXPECT_EQ(rep.g_eps_sup, 0.0);
    EXPECT_EQ(rep.max_abs_F, 0.0);
    tr.states.resize(2);
    EXPECT_THROW(high_order_functional(tr, 0.5), InsufficientDataError);
}

TEST(HighOrder, WeightsReduceTheFunctional) {
    const HighOrderReport rep = high_order_functional(shared_bump(), 0.5);
    EXPECT_GT(rep.value, 0.0);
    EXPECT_LE(rep.value, rep.value_unweighted);
    EXPECT_TRUE(std::isfinite(rep.max_abs_F));
    EXPECT_EQ(rep.F_sup_by_sample.size(), shared_bump().states.size());
}
