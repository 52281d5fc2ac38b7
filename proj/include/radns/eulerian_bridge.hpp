#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "cutoff.hpp"
#include "state.hpp"

namespace radns {

class InvalidStateError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Eulerian fields on an r-grid. ur, er hold the r-derivatives of u and e.
struct RadialProfile {
    double t = 0.0;
    double a = 0.1;
    int n = 3;
    double r_edge = 1.0;
    std::vector<double> r;
    std::vector<double> rho, u, e;
    std::vector<double> ur, er;
    std::vector<double> phi;  // cutoff weight; 1 before extension
    std::vector<double> x;    // mass coordinate, NaN outside the fluid region
};

/// Inverse of the discrete mass map. r^n is linear in x inside each cell, so the
/// inverse is exact: x = x_c + (r^n - r_c^n) / (n v_c).
inline auto mass_coordinate(const LagrangianState& s, double rq) -> double {
    if (rq <= s.r.front()) return 0.0;
    if (rq >= s.r.back()) return s.k;
    auto it = std::upper_bound(s.r.begin(), s.r.end(), rq);
    const int c = std::clamp(static_cast<int>(it - s.r.begin()) - 1, 0, s.N() - 1);
    const double x = c * s.dx() + (ipow(rq, s.n) - ipow(s.r[c], s.n)) / (s.n * s.v[c]);
    return std::clamp(x, c * s.dx(), (c + 1) * s.dx());
}

inline auto uniform_r_grid(double a, double r_out, int points) -> std::vector<double> {
    std::vector<double> g(points);
    for (int i = 0; i < points; ++i) g[i] = a + (r_out - a) * i / (points - 1);
    g.back() = r_out;
    return g;
}

/// Fields pulled back along the particle paths. Inside the fluid region rho is the cell
/// density 1/v_c, u is linear in r between nodes and e linear in r between cell radii.
/// Points beyond r_edge are marked with x = NaN and left at (1,0,1).
inline auto pullback(const LagrangianState& s, const std::vector<double>& r_grid) -> RadialProfile {
    RadialProfile p;
    p.t = s.t;
    p.a = s.a;
    p.n = s.n;
    p.r_edge = s.r_edge();
    p.r = r_grid;
    const std::size_t M = r_grid.size();
    p.rho.assign(M, 1.0);
    p.u.assign(M, 0.0);
    p.e.assign(M, 1.0);
    p.ur.assign(M, 0.0);
    p.er.assign(M, 0.0);
    p.phi.assign(M, 1.0);
    p.x.assign(M, std::nan(""));

    const int N = s.N();
    std::vector<double> rc(N);
    for (int c = 0; c < N; ++c) rc[c] = s.cell_r(c);

    for (std::size_t i = 0; i < M; ++i) {
        const double rq = r_grid[i];
        if (rq < s.r.front() - 1e-14 || rq > s.r.back() + 1e-14) continue;
        auto it = std::upper_bound(s.r.begin(), s.r.end(), rq);
        const int c = std::clamp(static_cast<int>(it - s.r.begin()) - 1, 0, N - 1);
        p.x[i] = mass_coordinate(s, rq);
        p.rho[i] = 1.0 / s.v[c];
        const double hr = s.r[c + 1] - s.r[c];
        const double lam = (rq - s.r[c]) / hr;
        p.u[i] = (1.0 - lam) * s.u[c] + lam * s.u[c + 1];
        p.ur[i] = (s.u[c + 1] - s.u[c]) / hr;
        // e between cell radii
        int lo;
        if (rq <= rc[0]) {
            p.e[i] = s.e[0];
            p.er[i] = 0.0;
            continue;
        }
        if (rq >= rc[N - 1]) {
            p.e[i] = s.e[N - 1];
            p.er[i] = 0.0;
            continue;
        }
        lo = (rq >= rc[c]) ? c : c - 1;
        const double he = rc[lo + 1] - rc[lo];
        const double mu = (rq - rc[lo]) / he;
        p.e[i] = (1.0 - mu) * s.e[lo] + mu * s.e[lo + 1];
        p.er[i] = (s.e[lo + 1] - s.e[lo]) / he;
    }
    return p;
}

/// Extension (1,0,1) + phi (rho-1, u, e-1) with phi = chi((2r - r_edge)/r_edge).
inline auto cutoff_extend(const RadialProfile& in, double r_edge) -> RadialProfile {
    if (!(r_edge > in.a)) throw InvalidStateError("cutoff_extend: r_edge must exceed a");
    RadialProfile p = in;
    p.r_edge = r_edge;
    for (std::size_t i = 0; i < p.r.size(); ++i) {
        const double rq = p.r[i];
        const double ph = chi_outer(rq, r_edge);
        const double dph = chi_outer_deriv(rq, r_edge);
        p.phi[i] = ph;
        if (ph == 1.0) continue;
        if (ph == 0.0) {
            p.rho[i] = 1.0;
            p.u[i] = 0.0;
            p.e[i] = 1.0;
            p.ur[i] = 0.0;
            p.er[i] = 0.0;
            continue;
        }
        p.ur[i] = ph * in.ur[i] + dph * in.u[i];
        p.er[i] = ph * in.er[i] + dph * (in.e[i] - 1.0);
        p.rho[i] = (in.rho[i] - 1.0) * ph + 1.0;
        p.u[i] = in.u[i] * ph;
        p.e[i] = (in.e[i] - 1.0) * ph + 1.0;
    }
    return p;
}

/// Default output grid: [a, 1.5 r_edge].
inline auto eulerian_profile(const LagrangianState& s, int points = 1024, double r_out = 0.0) -> RadialProfile {
    if (r_out <= 0.0) r_out = 1.5 * s.r_edge();
    return cutoff_extend(pullback(s, uniform_r_grid(s.a, r_out, points)), s.r_edge());
}

/// J at nodes: node-averaged v times r^{-m}
inline auto jacobian(const LagrangianState& s) -> std::vector<double> {
    const int N = s.N();
    std::vector<double> J(N + 1);
    for (int j = 0; j <= N; ++j) {
        double V;
        if (j == 0) V = s.v[0];
        else if (j == N) V = s.v[N - 1];
        else V = 0.5 * (s.v[j - 1] + s.v[j]);
        J[j] = V / ipow(s.r[j], s.m());
    }
    return J;
}

}  // namespace radns
