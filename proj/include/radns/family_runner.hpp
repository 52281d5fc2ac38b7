#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "eulerian_bridge.hpp"
#include "initial_data.hpp"
#include "lagrangian_solver.hpp"
#include "monitors.hpp"

namespace radns {

class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Sampled particle paths r~(x_i, t_j); r[j][i].
struct PathFamily {
    double a = 0.1;
    double k = 1.0;
    std::vector<double> x;
    std::vector<double> t;
    std::vector<std::vector<double>> r;
    std::vector<double> r_inner;  // x -> 0+ limit per sample
};

/// r~(x) on the discrete map: r^n is linear in x inside a cell
inline auto path_radius(const LagrangianState& s, double x) -> double {
    const double dx = s.dx();
    const int c = std::clamp(static_cast<int>(std::floor(x / dx)), 0, s.N() - 1);
    const double Rn = ipow(s.r[c], s.n) + s.n * s.v[c] * (x - c * dx);
    return std::pow(Rn, 1.0 / s.n);
}

/// x -> 0+ limit of r~(., t). The discrete path is continuous up to the inner node.
inline auto inner_limit(const LagrangianState& s) -> double { return s.r.front(); }

/// x in {2^-6, ..., 2^0} * k_min
inline auto probe_lattice(double k_min) -> std::vector<double> {
    std::vector<double> xs;
    for (int p = -6; p <= 0; ++p) xs.push_back(std::ldexp(k_min, p));
    return xs;
}

inline auto path_family(const Trajectory& traj, const std::vector<double>& xs) -> PathFamily {
    PathFamily pf;
    const LagrangianState& s0 = traj.states.front();
    pf.a = s0.a;
    pf.k = s0.k;
    pf.x = xs;
    for (const auto& s : traj.states) {
        pf.t.push_back(s.t);
        std::vector<double> row;
        for (double x : xs) row.push_back(path_radius(s, std::min(x, s.k)));
        pf.r.push_back(std::move(row));
        pf.r_inner.push_back(inner_limit(s));
    }
    return pf;
}

inline auto sup_distance(const PathFamily& p, const PathFamily& q) -> double {
    if (p.x != q.x || p.t.size() != q.t.size()) throw DataError("sup_distance: probe lattices differ");
    double d = 0.0;
    for (std::size_t j = 0; j < p.t.size(); ++j)
        for (std::size_t i = 0; i < p.x.size(); ++i) d = std::max(d, std::abs(p.r[j][i] - q.r[j][i]));
    return d;
}

struct RunSummary {
    double a = 0.0;
    double k = 0.0;
    int N = 0;
    double C0 = 0.0;
    double E0 = 0.0;
    bool complete = true;
    std::string abort_reason;
    int steps = 0;
    int rejections = 0;
    double min_e = 0.0;
    BoundCheck entropy, path, envelope, mean_value;
};

struct FamilyRun {
    RunSummary summary;
    LagrangianData data;
    Trajectory traj;
    PathFamily paths;
};

struct VacuumInterface {
    std::vector<double> a;                   // ascending
    std::vector<double> t;
    std::vector<std::vector<double>> r_by_a;  // x -> 0+ limit, [a][t]
    std::vector<double> r_under;             // a -> 0 estimate per t
    double C0 = 0.0;                         // measured at the smallest a
    bool bounded_by_C0 = true;
    bool small_t_decrease = false;           // r_under(t_1) <= r_under(t_last)
    std::vector<double> rho_min;             // min over a and cells of the density, per t
};

struct HolderFit {
    bool flat = false;
    double alpha_r = 0.0;
    double alpha_t = 0.0;
    std::vector<double> delta_r, omega_r;
    std::vector<double> delta_t, omega_t;
};

struct FamilyReport {
    std::vector<double> a_list, k_list;
    std::vector<FamilyRun> runs;  // a-major, k-minor
    std::vector<std::vector<double>> distance;
    std::vector<double> successive_k_distance;  // per a, between k_i and k_{i+1}; a-major
    std::vector<VacuumInterface> interfaces;    // per k
    std::vector<HolderFit> holder;              // per run
    bool complete = true;

    [[nodiscard]] auto index(std::size_t ia, std::size_t ik) const -> std::size_t { return ia * k_list.size() + ik; }
};

struct FamilyOptions {
    int workers = 1;
    double eps = 0.5;           // envelope cutoff
    double dx_per_unit_k = 0.0;  // > 0: N = k / dx so every run shares dx; otherwise cfg.N
};

/// Deterministic pool: task i always writes slot i, reduction happens afterwards in order.
inline void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn) {
    workers = std::max(1, std::min<int>(workers, static_cast<int>(count)));
    if (workers == 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errs(count);
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count) return;
                try {
                    fn(i);
                } catch (...) {
                    errs[i] = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errs)
        if (e) std::rethrow_exception(e);
}

inline auto summarize(const Trajectory& traj, double C0, double eps) -> RunSummary {
    RunSummary s;
    const LagrangianState& s0 = traj.states.front();
    s.a = s0.a;
    s.k = s0.k;
    s.N = s0.N();
    s.C0 = C0;
    s.E0 = traj.entropy.front().E;
    s.steps = static_cast<int>(traj.dt_history.size());
    s.rejections = traj.rejections;
    s.min_e = traj.min_e;
    s.entropy = check_entropy(traj);
    s.path.name = "path_bounds";
    s.envelope.name = "density_envelope";
    s.mean_value.name = "mean_value_cells";
    for (const auto& st : traj.states) {
        s.path.merge(check_path_bounds(st, C0));
        if (eps < st.k) s.envelope.merge(check_envelope(st, eps, C0, traj.params));
        if (st.k >= 1.0) s.mean_value.merge(cell_mean_values(st, C0, traj.params).check);
    }
    return s;
}

/// One pipeline: data at (a, k), solve, monitors, probe paths.
inline auto run_single(const RadialData& base, double a, double k, const FluidParams& params, SolverConfig cfg,
                       const std::vector<double>& probes, double eps) -> FamilyRun {
    FamilyRun fr;
    fr.data = build_lagrangian(base, a, k, cfg.N, params.n);
    const double C0 = data_entropy_constant(fr.data, params);
    try {
        fr.traj = run(fr.data.to_state(), params, cfg);
    } catch (const RunAborted& ex) {
        fr.traj = ex.partial();
        fr.summary = summarize(fr.traj, C0, eps);
        fr.summary.complete = false;
        fr.summary.abort_reason = ex.what();
        fr.paths = path_family(fr.traj, probes);
        return fr;
    } catch (const MonitorViolation& ex) {
        fr.traj = ex.partial();
        fr.summary = summarize(fr.traj, C0, eps);
        fr.summary.complete = false;
        fr.summary.abort_reason = ex.what();
        fr.paths = path_family(fr.traj, probes);
        return fr;
    }
    fr.traj.C0 = C0;
    fr.summary = summarize(fr.traj, C0, eps);
    fr.paths = path_family(fr.traj, probes);
    return fr;
}

/// underline_r(t): per run the x -> 0+ limit of the path, then a -> 0 by linear
/// extrapolation through the two smallest a, kept inside [0, value at the smallest a].
inline auto estimate_vacuum_interface(std::vector<const FamilyRun*> runs) -> VacuumInterface {
    if (runs.size() < 2) throw DataError("estimate_vacuum_interface: need at least two values of a");
    std::sort(runs.begin(), runs.end(), [](auto* p, auto* q) { return p->summary.a < q->summary.a; });
    VacuumInterface vi;
    vi.t = runs.front()->paths.t;
    for (const auto* r : runs) {
        if (r->paths.t != vi.t) throw DataError("estimate_vacuum_interface: runs sampled at different times");
        for (std::size_t j = 0; j < r->paths.r.size(); ++j) {
            const auto& row = r->paths.r[j];
            bool ok = row.empty() || r->paths.r_inner[j] < row.front();
            for (std::size_t i = 1; i < row.size(); ++i) ok = ok && row[i] > row[i - 1];
            if (!ok) throw DataError("estimate_vacuum_interface: path surface not increasing in x at t=" + std::to_string(r->paths.t[j]));
        }
        vi.a.push_back(r->summary.a);
        vi.r_by_a.push_back(r->paths.r_inner);
    }
    vi.C0 = runs.front()->summary.C0;
    vi.rho_min.assign(vi.t.size(), std::numeric_limits<double>::infinity());
    for (const auto* r : runs)
        for (std::size_t j = 0; j < vi.t.size() && j < r->traj.states.size(); ++j)
            for (double v : r->traj.states[j].v) vi.rho_min[j] = std::min(vi.rho_min[j], 1.0 / v);
    const double a0 = vi.a[0], a1 = vi.a[1];
    for (std::size_t j = 0; j < vi.t.size(); ++j) {
        const double r0 = vi.r_by_a[0][j], r1 = vi.r_by_a[1][j];
        const double lim = r0 - (r1 - r0) / (a1 - a0) * a0;
        const double ru = std::clamp(lim, 0.0, r0);
        vi.r_under.push_back(ru);
        if (ru > vi.C0) vi.bounded_by_C0 = false;
    }
    if (vi.t.size() >= 2) vi.small_t_decrease = vi.r_under[1] <= vi.r_under.back();
    return vi;
}

namespace detail {

inline auto slope_fit(const std::vector<double>& d, const std::vector<double>& w) -> double {
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (w[i] > 0.0) {
            lx.push_back(std::log(d[i]));
            ly.push_back(std::log(w[i]));
        }
    }
    if (lx.size() < 2) return std::numeric_limits<double>::quiet_NaN();
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= lx.size();
    my /= ly.size();
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxy += (lx[i] - mx) * (ly[i] - my);
        sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    return sxy / sxx;
}

}  // namespace detail

/// Weighted moduli sigma^{1/2}|du| + sigma|de| over dyadic separations in r and in t.
inline auto holder_moduli(const std::vector<RadialProfile>& profiles, int levels = 6) -> HolderFit {
    if (profiles.size() < 3) throw InsufficientDataError("holder_moduli: need profiles at >= 3 times");
    const std::vector<double>& r = profiles.front().r;
    if (r.size() < static_cast<std::size_t>(1 << levels) + 1)
        throw InsufficientDataError("holder_moduli: r-grid too coarse for the requested levels");
    HolderFit fit;
    const double hr = r[1] - r[0];
    for (int l = 0; l < levels; ++l) {
        const std::size_t step = std::size_t{1} << l;
        double om = 0.0;
        for (const auto& p : profiles) {
            const double sig = sigma_weight(p.t);
            for (std::size_t i = 0; i + step < p.r.size(); ++i)
                om = std::max(om, std::sqrt(sig) * std::abs(p.u[i + step] - p.u[i]) + sig * std::abs(p.e[i + step] - p.e[i]));
        }
        fit.delta_r.push_back(step * hr);
        fit.omega_r.push_back(om);
    }
    for (std::size_t step = 1; step < profiles.size(); step *= 2) {
        double om = 0.0;
        for (std::size_t j = 0; j + step < profiles.size(); ++j) {
            const auto& p = profiles[j];
            const auto& q = profiles[j + step];
            const double sig = sigma_weight(p.t);
            for (std::size_t i = 0; i < p.r.size(); ++i)
                om = std::max(om, std::sqrt(sig) * std::abs(q.u[i] - p.u[i]) + sig * std::abs(q.e[i] - p.e[i]));
        }
        fit.delta_t.push_back(profiles[step].t - profiles[0].t);
        fit.omega_t.push_back(om);
    }
    const bool flat_r = std::all_of(fit.omega_r.begin(), fit.omega_r.end(), [](double w) { return w == 0.0; });
    const bool flat_t = std::all_of(fit.omega_t.begin(), fit.omega_t.end(), [](double w) { return w == 0.0; });
    fit.flat = flat_r && flat_t;
    fit.alpha_r = flat_r ? std::numeric_limits<double>::quiet_NaN() : detail::slope_fit(fit.delta_r, fit.omega_r);
    fit.alpha_t = flat_t ? std::numeric_limits<double>::quiet_NaN() : detail::slope_fit(fit.delta_t, fit.omega_t);
    return fit;
}

/// Profiles of the stored samples (t > 0) on a fixed grid over [2a, r_edge(0)/2].
inline auto holder_profiles(const Trajectory& traj, int points = 1025) -> std::vector<RadialProfile> {
    const LagrangianState& s0 = traj.states.front();
    const std::vector<double> grid = uniform_r_grid(2.0 * s0.a, 0.5 * s0.r_edge(), points);
    std::vector<RadialProfile> out;
    for (const auto& s : traj.states)
        if (s.t > 0.0) out.push_back(cutoff_extend(pullback(s, grid), s.r_edge()));
    return out;
}

inline auto run_family(std::vector<double> a_list, std::vector<double> k_list, const RadialData& base,
                       const FluidParams& params, const SolverConfig& cfg, const FamilyOptions& opt = {})
    -> FamilyReport {
    if (a_list.empty() || k_list.empty()) throw ConfigError("family: a and k lists must be nonempty");
    std::sort(a_list.begin(), a_list.end());
    std::sort(k_list.begin(), k_list.end());
    FamilyReport rep;
    rep.a_list = a_list;
    rep.k_list = k_list;
    const std::vector<double> probes = probe_lattice(k_list.front());
    const std::size_t R = a_list.size() * k_list.size();
    rep.runs.resize(R);
    parallel_for(R, opt.workers, [&](std::size_t i) {
        const double a = a_list[i / k_list.size()];
        const double k = k_list[i % k_list.size()];
        SolverConfig c = cfg;
        if (opt.dx_per_unit_k > 0.0) c.N = static_cast<int>(std::lround(k / opt.dx_per_unit_k));
        rep.runs[i] = run_single(base, a, k, params, c, probes, opt.eps);
    });
    for (const auto& r : rep.runs) rep.complete = rep.complete && r.summary.complete;

    rep.distance.assign(R, std::vector<double>(R, 0.0));
    for (std::size_t i = 0; i < R; ++i)
        for (std::size_t j = i + 1; j < R; ++j) {
            double d = std::numeric_limits<double>::quiet_NaN();
            if (rep.runs[i].paths.t.size() == rep.runs[j].paths.t.size()) d = sup_distance(rep.runs[i].paths, rep.runs[j].paths);
            rep.distance[i][j] = rep.distance[j][i] = d;
        }
    for (std::size_t ia = 0; ia < a_list.size(); ++ia)
        for (std::size_t ik = 0; ik + 1 < k_list.size(); ++ik)
            rep.successive_k_distance.push_back(rep.distance[rep.index(ia, ik)][rep.index(ia, ik + 1)]);

    if (a_list.size() >= 2) {
        for (std::size_t ik = 0; ik < k_list.size(); ++ik) {
            std::vector<const FamilyRun*> col;
            for (std::size_t ia = 0; ia < a_list.size(); ++ia) col.push_back(&rep.runs[rep.index(ia, ik)]);
            rep.interfaces.push_back(estimate_vacuum_interface(col));
        }
    }
    for (const auto& r : rep.runs) {
        HolderFit h;
        try {
            h = holder_moduli(holder_profiles(r.traj));
        } catch (const InsufficientDataError&) {
            h.flat = true;
        }
        rep.holder.push_back(h);
    }
    return rep;
}

}  // namespace radns
