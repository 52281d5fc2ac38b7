#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "cutoff.hpp"
#include "entropy.hpp"
#include "eulerian_bridge.hpp"
#include "lagrangian_solver.hpp"
#include "scalar_kernel.hpp"

namespace radns {

class InsufficientDataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Outcome of one monitor. margin is the smallest slack (negative when violated);
/// mode "assert" monitors gate strict runs, "report" ones never do.
struct BoundCheck {
    std::string name;
    std::string mode = "assert";
    bool satisfied = true;
    double margin = std::numeric_limits<double>::infinity();
    double worst_x = 0.0;  // x or r of the worst point
    double worst_t = 0.0;
    double value = 0.0;

    void observe(double slack, double x, double t) {
        if (slack < margin) {
            margin = slack;
            worst_x = x;
            worst_t = t;
        }
        if (slack < 0.0) satisfied = false;
    }

    void merge(const BoundCheck& o) {
        if (o.margin < margin) {
            margin = o.margin;
            worst_x = o.worst_x;
            worst_t = o.worst_t;
        }
        satisfied = satisfied && o.satisfied;
        value = std::max(value, o.value);
    }
};

// ===========================================================================
// Entropy along a trajectory
// ===========================================================================

/// E(t) + int_0^t D <= E(0)(1 + rel) + abs at every stored sample, every channel >= 0.
/// E and D are recomputed from the stored states; the time integral is the solver's
/// per-step accumulation.
inline auto check_entropy(const Trajectory& traj, double rel = 1e-8, double abs_tol = 1e-12) -> BoundCheck {
    BoundCheck bc;
    bc.name = "entropy_inequality";
    if (traj.states.empty()) return bc;
    const double E0 = entropy_value(traj.states.front(), traj.params);
    bc.value = E0;
    for (std::size_t i = 0; i < traj.states.size(); ++i) {
        const LagrangianState& s = traj.states[i];
        const double E = entropy_value(s, traj.params);
        const Dissipation d = dissipation(s, traj.params);
        const double cum = traj.entropy[i].cumulative.total();
        bc.observe(E0 * (1.0 + rel) + abs_tol - (E + cum), 0.0, s.t);
        bc.observe(std::min({d.heat, d.bulk, d.shear}), 0.0, s.t);
    }
    return bc;
}

// ===========================================================================
// Particle-path bounds
// ===========================================================================

/// a^n + n x psi_-^{-1}(C0/x); tends to a^n as x -> 0
inline auto path_lower_bound(double a, int n, double C0, double x) -> double {
    if (x <= 0.0) return ipow(a, n);
    return ipow(a, n) + n * x * psi_left_inv(C0 / x);
}

/// max(C0, n) (1 + x): the larger of the two case bounds in the proof
inline auto path_upper_bound(int n, double C0, double x) -> double { return std::max(C0, static_cast<double>(n)) * (1.0 + x); }

inline auto check_path_bounds(const LagrangianState& s, double C0) -> BoundCheck {
    BoundCheck bc;
    bc.name = "path_bounds";
    bc.value = C0;
    for (int j = 0; j <= s.N(); ++j) {
        const double x = s.node_x(j);
        const double Rn = ipow(s.r[j], s.n);
        const double lo = path_lower_bound(s.a, s.n, C0, x);
        const double hi = path_upper_bound(s.n, C0, x);
        // round-off allowance at x = 0 where r = a exactly
        bc.observe(Rn - lo + 1e-14 * Rn, x, s.t);
        bc.observe(hi - Rn, x, s.t);
    }
    return bc;
}

// ===========================================================================
// Density envelope
// ===========================================================================

/// The envelope formula uses C0 >= 1 (its generic constants exceed 1); C0 below 1 is floored.
inline auto check_envelope(const LagrangianState& s, double eps, double C0, const FluidParams& params) -> BoundCheck {
    BoundCheck bc;
    bc.name = "density_envelope";
    EnvelopeParams ep{s.a, std::max(1.0, C0), s.n, params.beta()};
    const EnvelopeBounds b = envelope_bounds(ep, eps, s.t);
    bc.value = ep.C0;
    for (int c = 0; c < s.N(); ++c) {
        const double x = s.cell_x(c);
        if (x < eps) continue;
        const double lv = std::log(s.v[c]);
        // slack in log space; the upper bound may overflow
        bc.observe(lv - b.log_lower, x, s.t);
        bc.observe(b.log_upper - lv, x, s.t);
    }
    return bc;
}

// ===========================================================================
// Mean-value cells
// ===========================================================================

struct MeanValuePoints {
    int cell = 0;  // unit cell [i-1, i], i = cell
    bool found_v = false;
    bool found_e = false;
    double A = 0.0, B = 0.0;
    double vA = 0.0, eB = 0.0;
    double v_mean = 0.0, e_mean = 0.0;
};

struct MeanValueReport {
    std::vector<MeanValuePoints> cells;
    double v_lo = 0.0, v_hi = 0.0, e_lo = 0.0, e_hi = 0.0;
    BoundCheck check;
};

namespace detail {

// average of a cell field over [x0, x1] with partial-cell overlap
inline auto field_mean(const LagrangianState& s, const std::vector<double>& f, double x0, double x1) -> double {
    const double dx = s.dx();
    double acc = 0.0;
    for (int c = 0; c < s.N(); ++c) {
        const double lo = std::max(x0, c * dx);
        const double hi = std::min(x1, (c + 1) * dx);
        if (hi > lo) acc += f[c] * (hi - lo);
    }
    return acc / (x1 - x0);
}

// point in [x0, x1] where the piecewise-linear interpolant through cell centers equals target
inline auto crossing(const LagrangianState& s, const std::vector<double>& f, double x0, double x1, double target)
    -> std::optional<std::pair<double, double>> {
    std::vector<std::pair<double, double>> pts;
    for (int c = 0; c < s.N(); ++c) {
        const double xc = s.cell_x(c);
        if (xc >= x0 && xc <= x1) pts.emplace_back(xc, f[c]);
    }
    if (pts.empty()) return std::nullopt;
    for (std::size_t i = 0; i < pts.size(); ++i)
        if (pts[i].second == target) return pts[i];
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double a = pts[i].second - target;
        const double b = pts[i + 1].second - target;
        if (a * b < 0.0) {
            const double lam = a / (a - b);
            return std::make_pair(pts[i].first + lam * (pts[i + 1].first - pts[i].first), target);
        }
    }
    return std::nullopt;
}

}  // namespace detail

/// Unit mass cells [i-1, i]: the cell mean of v (of e) lies in the psi-branch interval, and
/// the intermediate value theorem on the interpolant yields a point carrying that mean.
inline auto cell_mean_values(const LagrangianState& s, double C0, const FluidParams& params) -> MeanValueReport {
    MeanValueReport rep;
    rep.v_lo = psi_left_inv(C0 / (params.gamma - 1.0));
    rep.v_hi = psi_right_inv(C0 / (params.gamma - 1.0));
    rep.e_lo = psi_left_inv(C0);
    rep.e_hi = psi_right_inv(C0);
    rep.check.name = "mean_value_cells";
    rep.check.value = C0;
    const int K = static_cast<int>(std::floor(s.k + 1e-12));
    for (int i = 1; i <= K; ++i) {
        MeanValuePoints mp;
        mp.cell = i;
        const double x0 = i - 1.0, x1 = i;
        mp.v_mean = detail::field_mean(s, s.v, x0, x1);
        mp.e_mean = detail::field_mean(s, s.e, x0, x1);
        if (auto hit = detail::crossing(s, s.v, x0, x1, mp.v_mean)) {
            mp.found_v = true;
            mp.A = hit->first;
            mp.vA = hit->second;
        }
        if (auto hit = detail::crossing(s, s.e, x0, x1, mp.e_mean)) {
            mp.found_e = true;
            mp.B = hit->first;
            mp.eB = hit->second;
        }
        const double mid = 0.5 * (x0 + x1);
        if (!mp.found_v || !mp.found_e) rep.check.observe(-1.0, mid, s.t);
        // C0 = 0 collapses both intervals to {1}; the cell means carry round-off
        constexpr double tol = 1e-12;
        if (mp.found_v) rep.check.observe(std::min(mp.vA - rep.v_lo, rep.v_hi - mp.vA) + tol, mp.A, s.t);
        if (mp.found_e) rep.check.observe(std::min(mp.eB - rep.e_lo, rep.e_hi - mp.eB) + tol, mp.B, s.t);
        rep.cells.push_back(mp);
    }
    return rep;
}

// ===========================================================================
// Time-integrated sup estimates
// ===========================================================================

struct SupEstimates {
    double eta = 0.0;
    double u_over_sqrt_e = 0.0;  // int sup_{r>=eta} |u|/sqrt(e) dt
    double log_e = 0.0;          // n=2: int sup log max{1,e}; n=3: int sup log max{1,e,1/e}
    double predicted_u = 0.0;    // eta^{(2-n)/2} + eta^{2-n}
    double predicted_log = 0.0;  // eta^{2-n}
};

inline auto sup_estimates(const Trajectory& traj, double eta) -> SupEstimates {
    if (traj.states.empty()) throw InsufficientDataError("sup_estimates: empty trajectory");
    const LagrangianState& s0 = traj.states.front();
    if (!(eta > s0.a && eta < 1.0)) throw DomainError("sup_estimates: eta must lie in (a, 1)");
    const int n = s0.n;
    SupEstimates out;
    out.eta = eta;
    out.predicted_u = std::pow(eta, (2.0 - n) / 2.0) + std::pow(eta, 2.0 - n);
    out.predicted_log = std::pow(eta, 2.0 - n);
    std::vector<double> t, su, sl;
    for (const auto& s : traj.states) {
        double mu = 0.0, ml = 0.0;
        for (int j = 0; j <= s.N(); ++j) {
            if (s.r[j] < eta) continue;
            const int c = std::min(j, s.N() - 1);
            const double e = (j == 0 || j == s.N()) ? s.e[c] : 0.5 * (s.e[j - 1] + s.e[j]);
            mu = std::max(mu, std::abs(s.u[j]) / std::sqrt(e));
        }
        for (int c = 0; c < s.N(); ++c) {
            if (s.cell_r(c) < eta) continue;
            const double e = s.e[c];
            const double l = (n == 2) ? std::log(std::max(1.0, e)) : std::abs(std::log(e));
            ml = std::max(ml, l);
        }
        t.push_back(s.t);
        su.push_back(mu);
        sl.push_back(ml);
    }
    for (std::size_t i = 1; i < t.size(); ++i) {
        const double h = t[i] - t[i - 1];
        out.u_over_sqrt_e += 0.5 * h * (su[i] + su[i - 1]);
        out.log_e += 0.5 * h * (sl[i] + sl[i - 1]);
    }
    return out;
}

// ===========================================================================
// Uniform integrability of density and internal energy
// ===========================================================================

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

namespace detail {

inline auto trap_weight(const std::vector<double>& r, std::size_t i) -> double {
    const std::size_t M = r.size();
    if (i == 0) return 0.5 * (r[1] - r[0]);
    if (i == M - 1) return 0.5 * (r[M - 1] - r[M - 2]);
    return 0.5 * (r[i + 1] - r[i - 1]);
}

// int_E f r^m dr with f linear between grid points; exact for that interpolant
template <class F>
auto interval_integral(const RadialProfile& p, Interval E, F&& f) -> double {
    const int n = p.n;
    const std::vector<double>& r = p.r;
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < r.size(); ++i) {
        const double lo = std::max(E.lo, r[i]);
        const double hi = std::min(E.hi, r[i + 1]);
        if (hi <= lo) continue;
        const double slope = (f(i + 1) - f(i)) / (r[i + 1] - r[i]);
        const double c0 = f(i) - slope * r[i];
        s += c0 * (ipow(hi, n) - ipow(lo, n)) / n + slope * (ipow(hi, n + 1) - ipow(lo, n + 1)) / (n + 1);
    }
    return s;
}

}  // namespace detail

/// sup over the profiles of int [rho(u^2/2 + psi(e)) + G(rho)] r^m dr
inline auto entropy_bound_CT(const std::vector<RadialProfile>& profiles) -> double {
    double CT = 0.0;
    for (const auto& p : profiles) {
        const int m = p.n - 1;
        double s = 0.0;
        for (std::size_t i = 0; i < p.r.size(); ++i) {
            const double rho = p.rho[i];
            const double f = rho * (0.5 * p.u[i] * p.u[i] + psi(p.e[i])) + convex_eval(ConvexFn::G, rho);
            s += detail::trap_weight(p.r, i) * f * ipow(p.r[i], m);
        }
        CT = std::max(CT, s);
    }
    return CT;
}

/// int_E rho r^m dr <= omega_1(E; C_T) and int_E rho e r^m dr <= C_T + omega_2(E; C_T)
inline auto uniform_integrability(const RadialProfile& p, const std::vector<Interval>& sets, double CT) -> BoundCheck {
    BoundCheck bc;
    bc.name = "uniform_integrability";
    bc.value = CT;
    const int n = p.n;
    for (const Interval& E : sets) {
        if (!(E.hi > E.lo)) {
            bc.observe(0.0, E.lo, p.t);
            continue;
        }
        const double Ln = (ipow(E.hi, n) - ipow(E.lo, n)) / n;
        const double mass = detail::interval_integral(p, E, [&](std::size_t i) { return p.rho[i]; });
        const double energy = detail::interval_integral(p, E, [&](std::size_t i) { return p.rho[i] * p.e[i]; });
        const double w1 = omega_bounds(Ln, CT, OmegaKind::Omega1);
        const double w2 = omega_bounds(Ln, CT, OmegaKind::Omega2);
        // with C_T -> 0 the first bound is an equality for unit density; allow round-off
        const double tol = 1e-12 * std::max(1.0, mass);
        bc.observe(w1 - mass + tol, 0.5 * (E.lo + E.hi), p.t);
        bc.observe(CT + w2 - energy + tol, 0.5 * (E.lo + E.hi), p.t);
    }
    return bc;
}

/// `count` intervals inside [lo, hi] from a seeded generator
inline auto random_intervals(double lo, double hi, int count, std::uint64_t seed) -> std::vector<Interval> {
    std::mt19937_64 gen(seed);
    std::vector<Interval> out;
    out.reserve(count);
    for (int i = 0; i < count; ++i) {
        // explicit scaling keeps the stream identical across standard libraries
        const double u1 = static_cast<double>(gen() >> 11) * 0x1.0p-53;
        const double u2 = static_cast<double>(gen() >> 11) * 0x1.0p-53;
        const double p = lo + (hi - lo) * u1;
        const double q = lo + (hi - lo) * u2;
        out.push_back({std::min(p, q), std::max(p, q)});
    }
    return out;
}

// ===========================================================================
// High-order functional
// ===========================================================================

struct HighOrderReport {
    double y = 0.0;
    double value = 0.0;             // with sigma weights
    double value_unweighted = 0.0;  // sigma replaced by 1
    double sup_part = 0.0;
    double integral_part = 0.0;
    double g_eps_sup = 0.0;  // sup_t int g_eps(x) |(v-1, u^2, e-1)|^2 dx
    double max_abs_F = 0.0;  // effective viscous flux
    std::vector<double> F_sup_by_sample;
};

namespace detail {

struct LyParts {
    double sup = 0.0;
    double integral = 0.0;
};

inline auto ly_parts(const Trajectory& traj, double y, bool weighted) -> LyParts {
    const auto& st = traj.states;
    const std::size_t K = st.size();
    LyParts out;
    std::vector<double> integrand(K, 0.0);
    for (std::size_t i = 0; i < K; ++i) {
        const LagrangianState& s = st[i];
        const double sig = weighted ? sigma_weight(s.t) : 1.0;
        const double dx = s.dx();
        const int m = s.m();
        double sup_int = 0.0, tint = 0.0;
        for (int c = 0; c < s.N(); ++c) {
            if (s.cell_x(c) < y) continue;
            const double rm = ipow(s.cell_r(c), m);
            const double Dxu = (s.u[c + 1] - s.u[c]) / dx;
            const double uc = 0.5 * (s.u[c] + s.u[c + 1]);
            double Dxe = 0.0;
            if (c > 0 && c + 1 < s.N()) Dxe = (s.e[c + 1] - s.e[c - 1]) / (2.0 * dx);
            const double v1 = s.v[c] - 1.0, u2 = uc * uc, e1 = s.e[c] - 1.0;
            sup_int += (v1 * v1 + u2 * u2 + e1 * e1 + sig * rm * rm * Dxu * Dxu + sig * sig * rm * rm * Dxe * Dxe) * dx;
            double Dtu = 0.0, Dte = 0.0;
            const std::size_t ip = std::min(i + 1, K - 1), im = (i == 0) ? 0 : i - 1;
            const double ht = st[ip].t - st[im].t;
            if (ht > 0.0) {
                const double up = 0.5 * (st[ip].u[c] + st[ip].u[c + 1]);
                const double um = 0.5 * (st[im].u[c] + st[im].u[c + 1]);
                Dtu = (up - um) / ht;
                Dte = (st[ip].e[c] - st[im].e[c]) / ht;
            }
            tint += (rm * rm * Dxu * Dxu + rm * rm * Dxe * Dxe + rm * rm * uc * uc * Dxu * Dxu + sig * Dtu * Dtu +
                     sig * sig * Dte * Dte) *
                    dx;
        }
        out.sup = std::max(out.sup, sup_int);
        integrand[i] = tint;
    }
    for (std::size_t i = 1; i < K; ++i)
        out.integral += 0.5 * (st[i].t - st[i - 1].t) * (integrand[i] + integrand[i - 1]);
    return out;
}

}  // namespace detail

inline auto high_order_functional(const Trajectory& traj, double eps) -> HighOrderReport {
    if (traj.states.size() < 3) throw InsufficientDataError("high_order_functional: need at least 3 samples");
    const auto& p = traj.params;
    HighOrderReport rep;
    rep.y = eps;
    const detail::LyParts w = detail::ly_parts(traj, eps, true);
    const detail::LyParts u = detail::ly_parts(traj, eps, false);
    rep.sup_part = w.sup;
    rep.integral_part = w.integral;
    rep.value = w.sup + w.integral;
    rep.value_unweighted = u.sup + u.integral;
    for (const auto& s : traj.states) {
        const double dx = s.dx();
        double gs = 0.0, fmax = 0.0;
        for (int c = 0; c < s.N(); ++c) {
            const double x = s.cell_x(c);
            const double v1 = s.v[c] - 1.0, e1 = s.e[c] - 1.0;
            const double uc = 0.5 * (s.u[c] + s.u[c + 1]);
            gs += g_eps(x, eps) * (v1 * v1 + uc * uc * uc * uc + e1 * e1) * dx;
            const double w_div = (ipow(s.r[c + 1], s.m()) * s.u[c + 1] - ipow(s.r[c], s.m()) * s.u[c]) / dx;
            const double F = p.beta() * w_div / s.v[c] - (p.gamma - 1.0) * (s.e[c] - s.v[c]) / s.v[c];
            fmax = std::max(fmax, std::abs(F));
        }
        rep.g_eps_sup = std::max(rep.g_eps_sup, gs);
        rep.F_sup_by_sample.push_back(fmax);
        rep.max_abs_F = std::max(rep.max_abs_F, fmax);
    }
    return rep;
}

}  // namespace radns
