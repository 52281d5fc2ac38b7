#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "banded.hpp"
#include "entropy.hpp"
#include "params.hpp"
#include "state.hpp"

namespace radns {

class StepRejected : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Trajectory {
    FluidParams params;
    SolverConfig cfg;
    std::vector<LagrangianState> states;
    std::vector<EntropyReport> entropy;  // aligned with states
    std::vector<double> dt_history;
    std::vector<int> newton_iters;
    int rejections = 0;
    int entropy_warnings = 0;
    double worst_step_entropy_excess = -std::numeric_limits<double>::infinity();
    double min_e = std::numeric_limits<double>::infinity();
    double C0 = 0.0;
};

class RunAborted : public std::runtime_error {
public:
    RunAborted(const std::string& msg, Trajectory partial) : std::runtime_error(msg), partial_(std::move(partial)) {}
    [[nodiscard]] auto partial() const -> const Trajectory& { return partial_; }

private:
    Trajectory partial_;
};

class MonitorViolation : public std::runtime_error {
public:
    MonitorViolation(const std::string& msg, Trajectory partial)
        : std::runtime_error(msg), partial_(std::move(partial)) {}
    [[nodiscard]] auto partial() const -> const Trajectory& { return partial_; }

private:
    Trajectory partial_;
};

// ===========================================================================
// Backward Euler on the staggered mass grid
// ===========================================================================
//
// Unknowns per step: u at nodes and e at cells, interleaved as (u_0,e_0,u_1,e_1,...,u_N).
// Nodes move kinematically, r = r_old + dt u, and v follows the change of r^n across each cell.

class ImplicitStepper {
public:
    explicit ImplicitStepper(FluidParams p, int max_newton = 30, double tol = 1e-13)
        : p_(p), max_newton_(max_newton), tol_(tol) {}

    [[nodiscard]] auto newton_iterations() const -> int { return last_iters_; }

    auto step(const LagrangianState& old, double dt) -> LagrangianState {
        setup(old, dt);
        const int N = N_;
        const int size = 2 * N + 1;
        Vec x(size);
        for (int j = 0; j <= N; ++j) x[2 * j] = (j == 0 || j == N) ? 0.0 : old.u[j];
        for (int c = 0; c < N; ++c) x[2 * c + 1] = old.e[c];

        Vec F(size), trial(size), Ft(size), dxv(size);
        if (!residual(x, F)) throw StepRejected("initial iterate invalid");
        double res = norm(F);
        last_iters_ = 0;
        bool converged = res <= tol_;
        for (int it = 0; it < max_newton_ && !converged; ++it) {
            ++last_iters_;
            jacobian(x, F);
            if (!lu_.factorize()) throw StepRejected("singular Newton matrix");
            for (int i = 0; i < size; ++i) dxv[i] = -F[i];
            lu_.solve(dxv);
            double lambda = 1.0;
            bool ok = false;
            for (int ls = 0; ls < 8; ++ls) {
                for (int i = 0; i < size; ++i) trial[i] = x[i] + lambda * dxv[i];
                if (residual(trial, Ft)) {
                    ok = true;
                    break;
                }
                lambda *= 0.5;
            }
            if (!ok) throw StepRejected("Newton iterate left the admissible set");
            const double res_new = norm(Ft);
            std::swap(x, trial);
            std::swap(F, Ft);
            // floor_ estimates the round-off level of the residual at the current iterate
            const double target = std::max(tol_, floor_);
            if (res_new <= target) {
                converged = true;
            } else if (res_new < 1e3 * target && res_new > 0.5 * res) {
                converged = true;  // stalled at round-off
            }
            res = res_new;
        }
        if (!converged) {
            char buf[96];
            std::snprintf(buf, sizeof buf, "Newton did not converge (residual %.3e)", res);
            throw StepRejected(buf);
        }
        return assemble(old, x, dt);
    }

private:
    using Vec = std::vector<double>;

    void setup(const LagrangianState& old, double dt) {
        old_ = &old;
        dt_ = dt;
        dx_ = old.dx();
        if (N_ != old.N()) {
            N_ = old.N();
            const int N = N_;
            lu_.resize(2 * N + 1, 3, 5);
            r_.resize(N + 1);
            R_.resize(N + 1);
            M_.resize(N + 1);
            q_.resize(N + 1);
            A_.resize(N + 1);
            Fl_.resize(N + 1);
            v_.resize(N);
            w_.resize(N);
            sig_.resize(N);
            amp_.resize(N);
        }
    }

    // false when the iterate leaves v>0, e>0 or is not finite
    auto residual(const Vec& x, Vec& F) -> bool {
        const LagrangianState& o = *old_;
        const int N = N_;
        const int n = o.n;
        const int m = n - 1;
        const double dt = dt_;
        const double dx = dx_;
        for (int j = 0; j <= N; ++j) {
            const double u = x[2 * j];
            r_[j] = o.r[j] + dt * u;
            if (!(r_[j] > 0.0)) return false;
            R_[j] = ipow(r_[j], n);
            double Msum = 0.0;
            for (int i = 0; i <= m; ++i) Msum += ipow(r_[j], i) * ipow(o.r[j], m - i);
            M_[j] = Msum / n;
            q_[j] = M_[j] * u;
            A_[j] = q_[j] * q_[j] / R_[j];
        }
        for (int c = 0; c < N; ++c) {
            const double e = x[2 * c + 1];
            w_[c] = (q_[c + 1] - q_[c]) / dx;
            // r^n - r_old^n = n dt q, so this is the r^n cell difference without its cancellation
            v_[c] = o.v[c] + dt * w_[c];
            if (!(v_[c] > 0.0) || !(e > 0.0) || !std::isfinite(e)) return false;
            sig_[c] = p_.beta() * w_[c] / v_[c] - p_.pressure(v_[c], e);
            amp_[c] = p_.beta() * std::abs(w_[c]) / v_[c] + p_.pressure(v_[c], e);
        }
        Fl_[0] = 0.0;
        Fl_[N] = 0.0;
        for (int j = 1; j < N; ++j) {
            const double V = 0.5 * (v_[j - 1] + v_[j]);
            Fl_[j] = ipow(r_[j], 2 * m) * (x[2 * j + 1] - x[2 * j - 1]) / (dx * V);
        }
        F[0] = x[0];
        F[2 * N] = x[2 * N];
        floor_ = 0.0;
        for (int j = 1; j < N; ++j) {
            F[2 * j] = x[2 * j] - o.u[j] - dt * M_[j] * (sig_[j] - sig_[j - 1]) / dx;
            const double mag = std::abs(x[2 * j]) + std::abs(o.u[j]) +
                               dt * M_[j] * (amp_[j] + amp_[j - 1]) / dx;
            floor_ = std::max(floor_, mag);
        }
        const double beta = p_.beta();
        for (int c = 0; c < N; ++c) {
            const double e = x[2 * c + 1];
            const double w = w_[c];
            const double src = -p_.pressure(v_[c], e) * w + beta * w * w / v_[c] -
                               2.0 * m * p_.mu * (A_[c + 1] - A_[c]) / dx + p_.kappa * (Fl_[c + 1] - Fl_[c]) / dx;
            F[2 * c + 1] = e - o.e[c] - dt * src;
            const double mag = e + o.e[c] +
                               dt * (amp_[c] * std::abs(w) +
                                     2.0 * m * p_.mu * (A_[c + 1] + A_[c]) / dx + p_.kappa * (std::abs(Fl_[c + 1]) + std::abs(Fl_[c])) / dx);
            floor_ = std::max(floor_, mag / std::max(1.0, o.e[c]));
        }
        floor_ *= 16.0 * std::numeric_limits<double>::epsilon();
        for (double f : F)
            if (!std::isfinite(f)) return false;
        return true;
    }

    [[nodiscard]] auto norm(const Vec& F) const -> double {
        double out = 0.0;
        for (int c = 0; c < N_; ++c) out = std::max(out, std::abs(F[2 * c + 1]) / std::max(1.0, old_->e[c]));
        for (int j = 0; j <= N_; ++j) out = std::max(out, std::abs(F[2 * j]));
        return out;
    }

    // colored finite differences; unknown block b couples to row blocks b-2..b+1
    void jacobian(const Vec& x, const Vec& F0) {
        const int N = N_;
        const int size = 2 * N + 1;
        Vec xp(size), Fp(size);
        lu_.zero();
        for (int comp = 0; comp < 2; ++comp) {
            for (int phase = 0; phase < 4; ++phase) {
                if (2 * phase + comp >= size) continue;
                double sign = 1.0;
                for (int attempt = 0; attempt < 2; ++attempt) {
                    xp = x;
                    for (int col = 2 * phase + comp; col < size; col += 8)
                        xp[col] += sign * 1e-7 * std::max(1.0, std::abs(x[col]));
                    if (residual(xp, Fp)) break;
                    if (attempt == 1) throw StepRejected("Jacobian probe left admissible set");
                    sign = -1.0;
                }
                for (int col = 2 * phase + comp; col < size; col += 8) {
                    const int b = col / 2;
                    const double h = xp[col] - x[col];
                    const int rlo = std::max(0, 2 * (b - 2));
                    const int rhi = std::min(size - 1, 2 * (b + 1) + 1);
                    for (int row = rlo; row <= rhi; ++row) lu_.at(row, col) = (Fp[row] - F0[row]) / h;
                }
            }
        }
    }

    auto assemble(const LagrangianState& o, const Vec& x, double dt) -> LagrangianState {
        Vec F(x.size());
        residual(x, F);
        LagrangianState s;
        s.t = o.t + dt;
        s.a = o.a;
        s.k = o.k;
        s.n = o.n;
        s.u.resize(N_ + 1);
        s.e.resize(N_);
        for (int j = 0; j <= N_; ++j) s.u[j] = x[2 * j];
        s.u[0] = 0.0;
        s.u[N_] = 0.0;
        for (int c = 0; c < N_; ++c) s.e[c] = x[2 * c + 1];
        s.v = v_;
        s.r = reconstruct_radius(s.v, s.a, s.n, s.dx());
        s.rm = M_;
        return s;
    }

    FluidParams p_;
    int max_newton_;
    double tol_;
    int last_iters_ = 0;

    const LagrangianState* old_ = nullptr;
    double dt_ = 0.0;
    double floor_ = 0.0;
    double dx_ = 0.0;
    int N_ = -1;
    Vec r_, R_, M_, q_, A_, Fl_, v_, w_, sig_, amp_;
    BandedLU lu_;
};

/// One implicit step; throws StepRejected on loss of positivity or Newton failure.
inline auto step(const LagrangianState& state, const FluidParams& params, double dt) -> LagrangianState {
    ImplicitStepper stepper(params);
    return stepper.step(state, dt);
}

/// dt = cfl * min(dx / max acoustic speed, dx / max r^m)
inline auto stable_dt(const LagrangianState& s, const FluidParams& p, double cfl) -> double {
    const int m = s.m();
    double cmax = 0.0;
    for (int c = 0; c < s.N(); ++c) {
        const double rm = ipow(std::max(s.r[c], s.r[c + 1]), m);
        const double cs = rm * std::sqrt(p.gamma * (p.gamma - 1.0) * s.e[c]) / s.v[c];
        cmax = std::max(cmax, cs);
    }
    const double dx = s.dx();
    double dt = (cmax > 0.0) ? dx / cmax : std::numeric_limits<double>::infinity();
    dt = std::min(dt, dx / ipow(s.r_edge(), m));
    return cfl * dt;
}

inline auto run(const LagrangianState& initial, const FluidParams& params, const SolverConfig& cfg) -> Trajectory {
    Trajectory traj;
    traj.params = params;
    traj.cfg = cfg;
    LagrangianState cur = initial;
    if (cur.rm.empty()) cur.rm = static_metric(cur.r, cur.m());
    traj.states.push_back(cur);
    EntropyReport rep = entropy_functional(cur, params);
    traj.entropy.push_back(rep);
    for (double e : cur.e) traj.min_e = std::min(traj.min_e, e);

    const std::vector<double> samples = cfg.sample_times();
    std::size_t next = 0;
    ImplicitStepper stepper(params, cfg.max_newton, cfg.newton_tol);
    Dissipation cum;
    double E_prev = rep.E;
    const double T = cfg.T;

    while (next < samples.size()) {
        const double target = samples[next];
        double dt = std::min(stable_dt(cur, params, cfg.cfl), target - cur.t);
        bool hits = (cur.t + dt >= target - 1e-12 * std::max(1.0, T));
        LagrangianState nxt;
        for (;;) {
            try {
                nxt = stepper.step(cur, dt);
                break;
            } catch (const StepRejected& ex) {
                ++traj.rejections;
                dt *= 0.5;
                hits = false;
                if (dt < cfg.dt_min)
                    throw RunAborted(std::string("step rejected below dt_min at t=") + std::to_string(cur.t) + ": " +
                                         ex.what(),
                                     traj);
            }
        }
        if (hits) nxt.t = target;
        traj.dt_history.push_back(dt);
        traj.newton_iters.push_back(stepper.newton_iterations());

        const Dissipation d = dissipation(nxt, params);
        const double E_new = entropy_value(nxt, params);
        const double excess = E_new + dt * d.total() - (E_prev * (1.0 + 1e-10) + 1e-12);
        traj.worst_step_entropy_excess = std::max(traj.worst_step_entropy_excess, excess);
        if (excess > 0.0) {
            ++traj.entropy_warnings;
            if (cfg.mode == MonitorMode::Strict)
                throw MonitorViolation("discrete entropy inequality violated at t=" + std::to_string(nxt.t), traj);
        }
        cum.heat += dt * d.heat;
        cum.bulk += dt * d.bulk;
        cum.shear += dt * d.shear;
        E_prev = E_new;
        for (double e : nxt.e) traj.min_e = std::min(traj.min_e, e);
        cur = std::move(nxt);

        const bool is_sample = hits;
        if (is_sample || cfg.keep_all_steps) {
            EntropyReport r;
            r.t = cur.t;
            r.E = E_new;
            r.D = d;
            r.cumulative = cum;
            traj.states.push_back(cur);
            traj.entropy.push_back(r);
        }
        if (is_sample) ++next;
    }
    return traj;
}

}  // namespace radns
