#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "cutoff.hpp"
#include "interp.hpp"
#include "params.hpp"
#include "scalar_kernel.hpp"
#include "state.hpp"

namespace radns {

struct FieldTriple {
    double rho = 1.0;
    double u = 0.0;
    double e = 1.0;
};

namespace detail {

// 3-point Gauss-Legendre on [-1, 1]
inline constexpr std::array<double, 3> kGaussX = {-0.7745966692414833770, 0.0, 0.7745966692414833770};
inline constexpr std::array<double, 3> kGaussW = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};

}  // namespace detail

/// Radial Cauchy data sampled on [0, R_max]; beyond the last sample the data are (1,0,1).
struct RadialData {
    std::vector<double> r;
    std::vector<double> rho0, u0, e0;
    double Cstar = 1.0;

    [[nodiscard]] auto r_max() const -> double { return r.back(); }

    [[nodiscard]] auto eval(double rq) const -> FieldTriple {
        if (rq > r.back()) return {};
        return {lerp_table(r, rho0, rq), lerp_table(r, u0, rq), lerp_table(r, e0, rq)};
    }

    [[nodiscard]] auto validate() const -> std::vector<std::string> {
        std::vector<std::string> errs;
        const std::size_t n = r.size();
        if (n < 2 || rho0.size() != n || u0.size() != n || e0.size() != n) {
            errs.emplace_back("radial data: need >=2 samples with matching columns");
            return errs;
        }
        if (r.front() != 0.0) errs.emplace_back("radial data: grid must start at r=0");
        for (std::size_t i = 1; i < n; ++i) {
            if (!(r[i] > r[i - 1])) {
                errs.emplace_back("radial data: r must be strictly increasing");
                break;
            }
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (!std::isfinite(rho0[i]) || !std::isfinite(u0[i]) || !std::isfinite(e0[i])) {
                errs.emplace_back("radial data: non-finite sample");
                break;
            }
            if (!(rho0[i] > 0.0) || !(e0[i] > 0.0)) {
                errs.emplace_back("radial data: rho and e must be positive");
                break;
            }
        }
        return errs;
    }
};

/// C_* = max(sup rho, 1/inf rho, 1/inf e, weighted entropy + L2 integral), never below 1
inline auto data_bound_constant(const RadialData& d, const FluidParams& p) -> double {
    double c = 1.0;
    for (std::size_t i = 0; i < d.r.size(); ++i)
        c = std::max({c, d.rho0[i], 1.0 / d.rho0[i], 1.0 / d.e0[i]});
    const int m = p.m();
    double I = 0.0;
    for (std::size_t i = 0; i + 1 < d.r.size(); ++i) {
        const double r0 = d.r[i];
        const double h = d.r[i + 1] - r0;
        for (int g = 0; g < 3; ++g) {
            const double rq = r0 + 0.5 * h * (1.0 + detail::kGaussX[g]);
            const FieldTriple f = d.eval(rq);
            const double dr = f.rho - 1.0;
            const double de = f.e - 1.0;
            const double val = f.rho * (0.5 * f.u * f.u + psi(f.e)) + (p.gamma - 1.0) * convex_eval(ConvexFn::G, f.rho) +
                               dr * dr + f.u * f.u * f.u * f.u + de * de;
            I += 0.5 * h * detail::kGaussW[g] * val * ipow(rq, m);
        }
    }
    return std::max(c, I);
}

inline auto make_radial_data(std::vector<double> r, std::vector<double> rho, std::vector<double> u,
                             std::vector<double> e, const FluidParams& p) -> RadialData {
    RadialData d{std::move(r), std::move(rho), std::move(u), std::move(e), 1.0};
    auto errs = d.validate();
    if (!errs.empty()) throw ConfigError(errs);
    d.Cstar = data_bound_constant(d, p);
    return d;
}

inline auto constant_data(const FluidParams& p, double r_max = 4.0, int samples = 4001) -> RadialData {
    std::vector<double> r(samples), rho(samples, 1.0), u(samples, 0.0), e(samples, 1.0);
    for (int i = 0; i < samples; ++i) r[i] = r_max * i / (samples - 1);
    return make_radial_data(r, rho, u, e, p);
}

struct BumpSpec {
    double amplitude = 1.0;
    double center = 0.5;
    double width = 0.25;
};

/// rho = 1 + A exp(-((r-c)/w)^2), u = 0, e = 1; sampled until the bump is below 1e-16
inline auto gaussian_bump(const FluidParams& p, BumpSpec b = {}, int samples_per_unit = 2000) -> RadialData {
    const double r_max = b.center + 6.5 * b.width;
    const int samples = static_cast<int>(std::ceil(r_max * samples_per_unit)) + 1;
    std::vector<double> r(samples), rho(samples), u(samples, 0.0), e(samples, 1.0);
    for (int i = 0; i < samples; ++i) {
        r[i] = r_max * i / (samples - 1);
        const double z = (r[i] - b.center) / b.width;
        rho[i] = 1.0 + b.amplitude * std::exp(-z * z);
    }
    rho.back() = 1.0;
    return make_radial_data(r, rho, u, e, p);
}

struct ShellSpec {
    double inner_density = 0.5;
    double shell_radius = 0.5;
    double r_max = 1.0;
};

/// piecewise constant density: inner_density below shell_radius, 1 outside
inline auto discontinuous_shell(const FluidParams& p, ShellSpec s = {}, int samples = 4001) -> RadialData {
    std::vector<double> r(samples), rho(samples), u(samples, 0.0), e(samples, 1.0);
    for (int i = 0; i < samples; ++i) {
        r[i] = s.r_max * i / (samples - 1);
        rho[i] = r[i] <= s.shell_radius ? s.inner_density : 1.0;
    }
    return make_radial_data(r, rho, u, e, p);
}

/// CSV with header columns r,rho,u,e (any order)
inline auto read_radial_csv(const std::string& path, const FluidParams& p) -> RadialData {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open data file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("empty data file: " + path);
    std::vector<std::string> cols;
    {
        std::stringstream ss(line);
        std::string c;
        while (std::getline(ss, c, ',')) {
            c.erase(0, c.find_first_not_of(" \t\r"));
            c.erase(c.find_last_not_of(" \t\r") + 1);
            cols.push_back(c);
        }
    }
    auto find = [&](const std::string& name) -> int {
        for (std::size_t i = 0; i < cols.size(); ++i)
            if (cols[i] == name) return static_cast<int>(i);
        throw ConfigError("data file " + path + " lacks column '" + name + "'");
    };
    const int ir = find("r"), irho = find("rho"), iu = find("u"), ie = find("e");
    std::vector<double> r, rho, u, e;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::vector<double> vals;
        std::stringstream ss(line);
        std::string c;
        while (std::getline(ss, c, ',')) {
            try {
                vals.push_back(std::stod(c));
            } catch (const std::exception&) {
                throw ConfigError(path + ":" + std::to_string(lineno) + ": not a number");
            }
        }
        if (vals.size() != cols.size()) throw ConfigError(path + ":" + std::to_string(lineno) + ": wrong column count");
        r.push_back(vals[ir]);
        rho.push_back(vals[irho]);
        u.push_back(vals[iu]);
        e.push_back(vals[ie]);
    }
    return make_radial_data(r, rho, u, e, p);
}

// ===========================================================================
// Exterior data on [a, inf)
// ===========================================================================

/// Mollified, inner-cut data on [a, inf). Sampled on a uniform grid with monotone cubic
/// interpolation between samples; (1,0,1) past the grid. An optional far-field truncation
/// radius r_trunc > 0 blends to (1,0,1) through chi((2r - r_trunc)/r_trunc).
struct ExteriorData {
    double a = 0.1;
    int n = 3;
    std::vector<double> r;
    std::vector<double> rho, u, e;  // sampled, truncation applied
    double r_trunc = 0.0;

    MonotoneCubic rho_i, u_i, e_i;  // untruncated interpolants

    [[nodiscard]] auto r_out() const -> double { return r.back(); }

    [[nodiscard]] auto phi(double rq) const -> double {
        return r_trunc > 0.0 ? chi_outer(rq, r_trunc) : 1.0;
    }

    [[nodiscard]] auto eval_untruncated(double rq) const -> FieldTriple {
        if (rq >= r.back()) return {};
        rq = std::max(rq, a);
        return {rho_i(rq), u_i(rq), e_i(rq)};
    }

    [[nodiscard]] auto eval(double rq) const -> FieldTriple {
        const FieldTriple f = eval_untruncated(rq);
        const double ph = phi(rq);
        if (ph == 1.0) return f;
        return {(f.rho - 1.0) * ph + 1.0, f.u * ph, (f.e - 1.0) * ph + 1.0};
    }

    // resample the stored arrays after a change of r_trunc
    void refresh_samples() {
        for (std::size_t i = 0; i < r.size(); ++i) {
            const FieldTriple f = eval(r[i]);
            rho[i] = f.rho;
            u[i] = f.u;
            e[i] = f.e;
        }
    }
};

namespace detail {

inline auto bump_kernel(double z) -> double { return (std::abs(z) < 1.0) ? std::exp(1.0 / (z * z - 1.0)) : 0.0; }

}  // namespace detail

/// Even/odd reflection, mollification over [-a/2, a/2], inner cutoff (f-1) S(r/a-1) + 1.
inline auto mollify_extend(const RadialData& data, double a, int n) -> ExteriorData {
    if (!(a > 0.0 && a < 1.0)) throw ConfigError("inner radius a must lie in (0,1)");
    // composite Gauss nodes for the mollifier
    constexpr int kSub = 64;
    std::vector<double> zeta, wts;
    double wsum = 0.0;
    for (int s = 0; s < kSub; ++s) {
        const double lo = -0.5 * a + a * s / kSub;
        const double h = a / kSub;
        for (int g = 0; g < 3; ++g) {
            const double z = lo + 0.5 * h * (1.0 + detail::kGaussX[g]);
            const double w = 0.5 * h * detail::kGaussW[g] * detail::bump_kernel(2.0 * z / a);
            zeta.push_back(z);
            wts.push_back(w);
            wsum += w;
        }
    }
    for (double& w : wts) w /= wsum;

    ExteriorData ext;
    ext.a = a;
    ext.n = n;
    const double r_out = data.r_max() + a;
    const double h = std::min(a / 64.0, 1.0 / 2000.0);
    const int M = static_cast<int>(std::ceil((r_out - a) / h));
    ext.r.resize(M + 1);
    ext.rho.resize(M + 1);
    ext.u.resize(M + 1);
    ext.e.resize(M + 1);
    for (int i = 0; i <= M; ++i) {
        const double ri = (i == M) ? r_out : a + i * h;
        double drho = 0.0, du = 0.0, de = 0.0;
        for (std::size_t q = 0; q < zeta.size(); ++q) {
            const double s = ri - zeta[q];
            const FieldTriple f = data.eval(std::abs(s));
            drho += wts[q] * (f.rho - 1.0);
            du += wts[q] * (s < 0.0 ? -f.u : f.u);
            de += wts[q] * (f.e - 1.0);
        }
        const double ca = chi_inner(ri, a);
        ext.r[i] = ri;
        ext.rho[i] = drho * ca + 1.0;
        ext.u[i] = du * ca;
        ext.e[i] = de * ca + 1.0;
    }
    ext.rho.back() = 1.0;
    ext.u.back() = 0.0;
    ext.e.back() = 1.0;
    ext.rho_i = MonotoneCubic(ext.r, ext.rho);
    ext.u_i = MonotoneCubic(ext.r, ext.u);
    // the inner cutoff is flat at r = a, so e has a zero one-sided slope there
    ext.e_i = MonotoneCubic(ext.r, ext.e, 0.0);
    return ext;
}

/// Entropy integral of exterior data: int [rho(u^2/2 + psi(e)) + (gamma-1) G(rho)] r^m dr
inline auto exterior_entropy_integral(const ExteriorData& d, const FluidParams& p) -> double {
    const int m = d.n - 1;
    double I = 0.0;
    for (std::size_t i = 0; i + 1 < d.r.size(); ++i) {
        const double h = d.r[i + 1] - d.r[i];
        for (int g = 0; g < 3; ++g) {
            const double rq = d.r[i] + 0.5 * h * (1.0 + detail::kGaussX[g]);
            const FieldTriple f = d.eval(rq);
            const double val =
                f.rho * (0.5 * f.u * f.u + psi(f.e)) + (p.gamma - 1.0) * convex_eval(ConvexFn::G, f.rho);
            I += 0.5 * h * detail::kGaussW[g] * val * ipow(rq, m);
        }
    }
    return I;
}

// ===========================================================================
// Mass map x = int_a^r rho r^m dr and its inverse
// ===========================================================================

/// Cumulative mass of the untruncated exterior density and its inverse r~(x).
class MassMap {
public:
    MassMap() = default;

    explicit MassMap(const ExteriorData& d) : d_(&d) {
        const int m = d.n - 1;
        cum_.assign(d.r.size(), 0.0);
        for (std::size_t i = 0; i + 1 < d.r.size(); ++i) cum_[i + 1] = cum_[i] + partial(i, d.r[i + 1], m);
        guess_ = MonotoneCubic(cum_, d.r);
    }

    [[nodiscard]] auto total() const -> double { return cum_.back(); }

    [[nodiscard]] auto mass(double rq) const -> double {
        const ExteriorData& d = *d_;
        const int n = d.n;
        if (rq <= d.a) return 0.0;
        if (rq >= d.r.back()) return cum_.back() + (ipow(rq, n) - ipow(d.r.back(), n)) / n;
        const std::size_t i = locate(d.r, rq);
        return cum_[i] + partial(i, rq, n - 1);
    }

    /// r~(x); bisection polished to round-off (well below the 1e-12 tolerance in x)
    [[nodiscard]] auto radius(double x) const -> double {
        const ExteriorData& d = *d_;
        const int n = d.n;
        if (x <= 0.0) return d.a;
        if (x >= cum_.back()) return std::pow(ipow(d.r.back(), n) + n * (x - cum_.back()), 1.0 / n);
        const std::size_t i = locate(cum_, x);
        double lo = d.r[i], hi = d.r[i + 1];
        double rq = std::clamp(guess_(x), lo, hi);
        const int m = n - 1;
        // safeguarded Newton
        for (int it = 0; it < 100; ++it) {
            const double f = cum_[i] + partial(i, rq, m) - x;
            if (f == 0.0) return rq;
            if (f > 0.0) hi = rq; else lo = rq;
            const double dfdr = d.eval_untruncated(rq).rho * ipow(rq, m);
            double nxt = rq - f / dfdr;
            if (!(nxt > lo && nxt < hi)) nxt = 0.5 * (lo + hi);
            if (std::abs(nxt - rq) <= 4.0 * std::numeric_limits<double>::epsilon() * rq || hi - lo <= 0.0) return nxt;
            rq = nxt;
        }
        return rq;
    }

    /// D_x r~ = 1 / (r~^m rho(r~))
    [[nodiscard]] auto radius_deriv(double x) const -> double {
        const double rq = radius(x);
        return 1.0 / (ipow(rq, d_->n - 1) * d_->eval_untruncated(rq).rho);
    }

private:
    static auto locate(const std::vector<double>& tab, double q) -> std::size_t {
        auto it = std::upper_bound(tab.begin(), tab.end(), q);
        std::size_t i = static_cast<std::size_t>(it - tab.begin());
        i = (i == 0) ? 0 : i - 1;
        return std::min(i, tab.size() - 2);
    }

    // int_{r_i}^{rq} rho s^m ds; exact for the cubic interpolant times s^m (m<=2)
    [[nodiscard]] auto partial(std::size_t i, double rq, int m) const -> double {
        const ExteriorData& d = *d_;
        const double r0 = d.r[i];
        const double h = rq - r0;
        if (h <= 0.0) return 0.0;
        double s = 0.0;
        for (int g = 0; g < 3; ++g) {
            const double z = r0 + 0.5 * h * (1.0 + detail::kGaussX[g]);
            s += detail::kGaussW[g] * d.eval_untruncated(z).rho * ipow(z, m);
        }
        return 0.5 * h * s;
    }

    const ExteriorData* d_ = nullptr;
    std::vector<double> cum_;
    MonotoneCubic guess_;
};

/// Far-field truncation at r~_a^0(k) computed from the untruncated density.
inline auto truncate_farfield(const ExteriorData& data, double k) -> ExteriorData {
    if (!(k >= 1.0)) throw ConfigError("mass index k must be >= 1");
    ExteriorData out = data;
    out.r_trunc = 0.0;
    const MassMap map(out);
    const double edge = map.radius(k);
    out.r_trunc = edge;
    out.refresh_samples();
    return out;
}

// ===========================================================================
// Lagrangian data on [0, k]
// ===========================================================================

struct LagrangianData {
    double a = 0.1;
    double k = 1.0;
    int n = 3;
    std::vector<double> x;     // nodes
    std::vector<double> v0;    // cell averages
    std::vector<double> u0;    // nodes
    std::vector<double> e0;    // cell averages
    std::vector<double> r0;    // nodes, reconstructed from v0
    std::vector<double> rmap;  // nodes, r~_a^0(x_j) of the untruncated data
    std::vector<double> vq, uq, eq;  // 3 Gauss points per cell, for quadrature
    double r_trunc = 0.0;

    [[nodiscard]] auto N() const -> int { return static_cast<int>(v0.size()); }
    [[nodiscard]] auto dx() const -> double { return k / N(); }

    [[nodiscard]] auto to_state() const -> LagrangianState {
        LagrangianState s;
        s.t = 0.0;
        s.a = a;
        s.k = k;
        s.n = n;
        s.v = v0;
        s.u = u0;
        s.e = e0;
        s.r = r0;
        s.rm = static_metric(r0, n - 1);
        return s;
    }
};

/// Pulls the truncated data back along r~_a^0; `data` is the untruncated exterior data.
inline auto to_lagrangian(const ExteriorData& data, double k, int N) -> LagrangianData {
    if (N < 2) throw ConfigError("N must be >= 2");
    if (data.r_trunc > 0.0) throw ConfigError("to_lagrangian expects untruncated exterior data");
    const ExteriorData trunc = truncate_farfield(data, k);
    // past the sampled grid the density is 1, so every k is reachable
    const MassMap map(data);

    LagrangianData L;
    L.a = data.a;
    L.k = k;
    L.n = data.n;
    L.r_trunc = trunc.r_trunc;
    const double dx = k / N;
    L.x.resize(N + 1);
    L.rmap.resize(N + 1);
    L.u0.resize(N + 1);
    for (int j = 0; j <= N; ++j) {
        L.x[j] = j * dx;
        L.rmap[j] = (j == 0) ? data.a : map.radius(L.x[j]);
        L.u0[j] = trunc.eval(L.rmap[j]).u;
    }
    L.u0.front() = 0.0;
    L.u0.back() = 0.0;
    L.v0.resize(N);
    L.e0.resize(N);
    L.vq.resize(3 * N);
    L.uq.resize(3 * N);
    L.eq.resize(3 * N);
    for (int c = 0; c < N; ++c) {
        double vs = 0.0, es = 0.0;
        for (int g = 0; g < 3; ++g) {
            const double xq = (c + 0.5 * (1.0 + detail::kGaussX[g])) * dx;
            const FieldTriple f = trunc.eval(map.radius(xq));
            L.vq[3 * c + g] = 1.0 / f.rho;
            L.uq[3 * c + g] = f.u;
            L.eq[3 * c + g] = f.e;
            vs += 0.5 * detail::kGaussW[g] / f.rho;
            es += 0.5 * detail::kGaussW[g] * f.e;
        }
        // where truncation is inactive the cell average of v follows exactly from the map
        if (L.rmap[c + 1] < 0.5 * L.r_trunc)
            vs = (ipow(L.rmap[c + 1], L.n) - ipow(L.rmap[c], L.n)) / (L.n * dx);
        L.v0[c] = vs;
        L.e0[c] = es;
    }
    L.r0 = reconstruct_radius(L.v0, L.a, L.n, dx);
    return L;
}

/// Full data pipeline: mollify/extend at a, truncate at k, pull back onto N cells.
inline auto build_lagrangian(const RadialData& data, double a, double k, int N, int n) -> LagrangianData {
    return to_lagrangian(mollify_extend(data, a, n), k, N);
}

namespace detail {

inline auto c0_integrand(double v, double u, double e) -> double {
    const double u2 = u * u;
    return 0.5 * u2 + psi(e) + psi(v) + (v - 1.0) * (v - 1.0) + u2 * u2 + (e - 1.0) * (e - 1.0);
}

}  // namespace detail

/// C0 = int_0^k u^2/2 + psi(e) + psi(v) + (v-1)^2 + u^4 + (e-1)^2 dx.
/// Gauss samples when present (they resolve the thin inner layer), cell/node sums otherwise.
inline auto data_entropy_constant(const LagrangianData& d, const FluidParams& /*params*/) -> double {
    const double dx = d.dx();
    const int N = d.N();
    double c0 = 0.0;
    if (d.vq.size() == static_cast<std::size_t>(3 * N)) {
        for (int c = 0; c < N; ++c)
            for (int g = 0; g < 3; ++g)
                c0 += 0.5 * dx * detail::kGaussW[g] * detail::c0_integrand(d.vq[3 * c + g], d.uq[3 * c + g], d.eq[3 * c + g]);
        return c0;
    }
    for (int c = 0; c < N; ++c) c0 += detail::c0_integrand(d.v0[c], 0.0, d.e0[c]) * dx;
    for (int j = 1; j < N; ++j) {
        const double u2 = d.u0[j] * d.u0[j];
        c0 += (0.5 * u2 + u2 * u2) * dx;
    }
    return c0;
}

}  // namespace radns
