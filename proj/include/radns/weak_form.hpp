#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "cutoff.hpp"
#include "eulerian_bridge.hpp"
#include "lagrangian_solver.hpp"
#include "params.hpp"

namespace radns {

class ContractError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

enum class WeakEq { Continuity, Momentum, Energy };

inline auto to_string(WeakEq eq) -> std::string {
    switch (eq) {
        case WeakEq::Continuity: return "continuity";
        case WeakEq::Momentum: return "momentum";
        case WeakEq::Energy: return "energy";
    }
    return "?";
}

enum class TestKind { BumpProduct, PolynomialCutoff };
enum class BoundaryClass { Da, D0a };

/// Separable phi(r,t) = A(r) B(t).
/// BumpProduct: A = (1 - ((r-c)/w)^2)^4 on |r-c| < w, vanishing at r = a when c - w >= a.
/// PolynomialCutoff: A = 1 on r <= c, smoothstep down to 0 at c + w; nonzero at r = a.
/// B(t) = 1 + 0.5 sin(pi t / t_scale).
struct TestFunction {
    std::string id;
    TestKind kind = TestKind::BumpProduct;
    double center = 0.5;
    double width = 0.2;
    double t_scale = 1.0;
    BoundaryClass cls = BoundaryClass::D0a;

    [[nodiscard]] auto A(double r) const -> double {
        if (kind == TestKind::BumpProduct) {
            const double z = (r - center) / width;
            if (std::abs(z) >= 1.0) return 0.0;
            const double q = 1.0 - z * z;
            return q * q * q * q;
        }
        return chi((r - center) / width);
    }

    [[nodiscard]] auto dA(double r) const -> double {
        if (kind == TestKind::BumpProduct) {
            const double z = (r - center) / width;
            if (std::abs(z) >= 1.0) return 0.0;
            const double q = 1.0 - z * z;
            return 4.0 * q * q * q * (-2.0 * z) / width;
        }
        return chi_deriv((r - center) / width) / width;
    }

    [[nodiscard]] auto B(double t) const -> double { return 1.0 + 0.5 * std::sin(std::numbers::pi * t / t_scale); }

    // int_{t0}^{t1} B
    [[nodiscard]] auto IB(double t0, double t1) const -> double {
        const double k = std::numbers::pi / t_scale;
        return (t1 - t0) - 0.5 / k * (std::cos(k * t1) - std::cos(k * t0));
    }

    [[nodiscard]] auto support_max() const -> double { return center + width; }

    [[nodiscard]] auto vanishes_at(double a) const -> bool { return std::abs(A(a)) == 0.0; }
};

/// 3 centers x 2 widths x 2 classes, placed in [a, r_edge/2] of the initial state.
inline auto standard_catalog(double a, double r_edge0, double t_end) -> std::vector<TestFunction> {
    std::vector<TestFunction> cat;
    const double half = 0.5 * r_edge0;
    const std::array<double, 3> centers = {0.35, 0.55, 0.75};
    const std::array<double, 2> widths = {0.12, 0.22};
    for (double cf : centers) {
        for (double wf : widths) {
            TestFunction bump;
            bump.kind = TestKind::BumpProduct;
            bump.cls = BoundaryClass::D0a;
            bump.width = wf * half;
            bump.center = std::max(a + bump.width, cf * half);
            bump.t_scale = t_end;
            bump.id = "bump_c" + std::to_string(static_cast<int>(cf * 100)) + "_w" + std::to_string(static_cast<int>(wf * 100));
            cat.push_back(bump);

            TestFunction cut;
            cut.kind = TestKind::PolynomialCutoff;
            cut.cls = BoundaryClass::Da;
            cut.center = cf * half;
            cut.width = wf * half;
            cut.t_scale = t_end;
            cut.id = "cut_c" + std::to_string(static_cast<int>(cf * 100)) + "_w" + std::to_string(static_cast<int>(wf * 100));
            cat.push_back(cut);
        }
    }
    return cat;
}

struct WeakResidual {
    double residual = 0.0;  // |lhs - rhs| / largest term
    double raw = 0.0;       // signed lhs - rhs
    double scale = 0.0;
};

/// Streams time-ordered profiles on a common r-grid. The time rule matches the solver:
/// fields are piecewise constant in time with the value at the right end of each step,
/// and phi is integrated exactly in time.
class WeakAccumulator {
public:
    WeakAccumulator(WeakEq eq, TestFunction phi, FluidParams params) : eq_(eq), phi_(std::move(phi)), p_(params) {}

    void add(const RadialProfile& prof) {
        if (!started_) {
            check_class(prof.a);
            L0_ = moment(prof, phi_.B(prof.t));
            t_prev_ = prof.t;
            started_ = true;
            return;
        }
        if (!(prof.t > t_prev_)) throw ContractError("weak residual: profiles must be strictly increasing in time");
        const double dB = phi_.B(prof.t) - phi_.B(t_prev_);
        const double ib = phi_.IB(t_prev_, prof.t);
        const std::vector<double>& r = prof.r;
        const int m = prof.n - 1;
        const double beta = p_.beta();
        double st = 0.0, sc = 0.0, sv = 0.0;
        for (std::size_t i = 0; i < r.size(); ++i) {
            const double A = phi_.A(r[i]);
            const double dA = phi_.dA(r[i]);
            if (A == 0.0 && dA == 0.0) continue;
            const double w = trap_weight(r, i) * ipow(r[i], m);
            const double rho = prof.rho[i], u = prof.u[i], e = prof.e[i];
            const double P = (p_.gamma - 1.0) * rho * e;
            switch (eq_) {
                case WeakEq::Continuity:
                    st += w * rho * A;
                    sc += w * rho * u * dA;
                    break;
                case WeakEq::Momentum: {
                    const double div = prof.ur[i] + m * u / r[i];
                    st += w * rho * u * A;
                    sc += w * rho * u * u * dA;
                    sv += w * (P - beta * div) * (dA + m * A / r[i]);
                    break;
                }
                case WeakEq::Energy: {
                    const double E = 0.5 * u * u + e;
                    const double div = prof.ur[i] + m * u / r[i];
                    st += w * rho * E * A;
                    sc += w * (rho * E + P) * u * dA;
                    sv += w * (2.0 * p_.mu * u * prof.ur[i] + p_.lambda * u * div + p_.kappa * prof.er[i]) * dA;
                    break;
                }
            }
        }
        Rt_ += st * dB;
        Rc_ += sc * ib;
        Rv_ += sv * ib;
        L1_ = moment(prof, phi_.B(prof.t));
        t_prev_ = prof.t;
        have_last_ = true;
    }

    [[nodiscard]] auto result() const -> WeakResidual {
        if (!have_last_) throw ContractError("weak residual: need at least two profiles");
        const double L1 = L1_;
        double raw = 0.0;
        switch (eq_) {
            case WeakEq::Continuity: raw = L1 - L0_ - Rt_ - Rc_; break;
            case WeakEq::Momentum: raw = L1 - L0_ - Rt_ - Rc_ - Rv_; break;
            case WeakEq::Energy: raw = L1 - L0_ - Rt_ - Rc_ + Rv_; break;
        }
        const double scale = std::max({std::abs(L1), std::abs(L0_), std::abs(Rt_), std::abs(Rc_), std::abs(Rv_)});
        WeakResidual out;
        out.raw = raw;
        out.scale = scale;
        out.residual = scale > 0.0 ? std::abs(raw) / scale : std::abs(raw);
        return out;
    }

private:
    void check_class(double a) const {
        if (eq_ == WeakEq::Momentum && !(phi_.cls == BoundaryClass::D0a && phi_.vanishes_at(a)))
            throw ContractError("momentum identity requires a test function vanishing at r = a (" + phi_.id + ")");
    }

    static auto trap_weight(const std::vector<double>& r, std::size_t i) -> double {
        const std::size_t M = r.size();
        if (i == 0) return 0.5 * (r[1] - r[0]);
        if (i == M - 1) return 0.5 * (r[M - 1] - r[M - 2]);
        return 0.5 * (r[i + 1] - r[i - 1]);
    }

    // int (density of the conserved quantity) phi(., t) r^m dr
    [[nodiscard]] auto moment(const RadialProfile& prof, double Bt) const -> double {
        const int m = prof.n - 1;
        double s = 0.0;
        for (std::size_t i = 0; i < prof.r.size(); ++i) {
            const double A = phi_.A(prof.r[i]);
            if (A == 0.0) continue;
            const double rho = prof.rho[i], u = prof.u[i];
            double q = rho;
            if (eq_ == WeakEq::Momentum) q = rho * u;
            if (eq_ == WeakEq::Energy) q = rho * (0.5 * u * u + prof.e[i]);
            s += trap_weight(prof.r, i) * ipow(prof.r[i], m) * q * A;
        }
        return s * Bt;
    }

    WeakEq eq_;
    TestFunction phi_;
    FluidParams p_;
    bool started_ = false;
    bool have_last_ = false;
    double t_prev_ = 0.0;
    double L0_ = 0.0, L1_ = 0.0, Rt_ = 0.0, Rc_ = 0.0, Rv_ = 0.0;
};

/// Residual of one identity for one test function over a time-ordered profile list.
inline auto weak_residual(const std::vector<RadialProfile>& profiles, WeakEq eq, const TestFunction& phi,
                          const FluidParams& params) -> WeakResidual {
    if (profiles.size() < 2) throw ContractError("weak residual: need at least two profiles");
    for (std::size_t i = 1; i < profiles.size(); ++i)
        if (profiles[i].r != profiles[0].r) throw ContractError("weak residual: profiles must share the r-grid");
    for (const auto& p : profiles)
        if (phi.support_max() > p.r.back()) throw ContractError("weak residual: test function exceeds the r-grid");
    WeakAccumulator acc(eq, phi, params);
    for (const auto& p : profiles) acc.add(p);
    return acc.result();
}

struct WeakRow {
    WeakEq eq;
    std::string phi_id;
    int N;
    double residual;
};

/// Every (identity, catalog function) pair on a trajectory whose states hold every step.
/// Profiles are generated one at a time on a common grid of `points` radii.
inline auto weak_residual_table(const Trajectory& traj, const std::vector<TestFunction>& catalog, int points)
    -> std::vector<WeakRow> {
    if (traj.states.size() < 2) throw ContractError("weak residual: trajectory has fewer than two states");
    double r_hi = 0.0;
    for (const auto& s : traj.states) r_hi = std::max(r_hi, s.r_edge());
    const LagrangianState& s0 = traj.states.front();
    const std::vector<double> grid = uniform_r_grid(s0.a, 1.5 * r_hi, points);

    struct Slot {
        WeakEq eq;
        std::size_t fn;
        WeakAccumulator acc;
    };
    std::vector<Slot> slots;
    for (WeakEq eq : {WeakEq::Continuity, WeakEq::Momentum, WeakEq::Energy}) {
        for (std::size_t f = 0; f < catalog.size(); ++f) {
            if (eq == WeakEq::Momentum && catalog[f].cls != BoundaryClass::D0a) continue;
            slots.push_back({eq, f, WeakAccumulator(eq, catalog[f], traj.params)});
        }
    }
    for (const auto& s : traj.states) {
        const RadialProfile prof = cutoff_extend(pullback(s, grid), s.r_edge());
        for (auto& sl : slots) sl.acc.add(prof);
    }
    std::vector<WeakRow> rows;
    for (auto& sl : slots) rows.push_back({sl.eq, catalog[sl.fn].id, s0.N(), sl.acc.result().residual});
    return rows;
}

}  // namespace radns
