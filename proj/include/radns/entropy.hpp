#pragma once

#include <cmath>
#include <vector>

#include "params.hpp"
#include "scalar_kernel.hpp"
#include "state.hpp"

namespace radns {

struct Dissipation {
    double heat = 0.0;
    double bulk = 0.0;
    double shear = 0.0;

    [[nodiscard]] auto total() const -> double { return heat + bulk + shear; }
};

struct EntropyReport {
    double t = 0.0;
    double E = 0.0;
    Dissipation D;
    double C0 = 0.0;
    Dissipation cumulative;  // time integral of D up to t
};

inline auto entropy_value(const LagrangianState& s, const FluidParams& p) -> double {
    const double dx = s.dx();
    double E = 0.0;
    for (int j = 1; j < s.N(); ++j) E += 0.5 * s.u[j] * s.u[j] * dx;
    for (int c = 0; c < s.N(); ++c) E += (psi(s.e[c]) + (p.gamma - 1.0) * psi(s.v[c])) * dx;
    return E;
}

/// Discrete dissipation matching the solver stencils. Each channel is a sum of weighted squares.
inline auto dissipation(const LagrangianState& s, const FluidParams& p) -> Dissipation {
    const int N = s.N();
    const int n = s.n;
    const int m = s.m();
    const double dx = s.dx();
    const std::vector<double>& M = s.rm.empty() ? static_metric(s.r, m) : s.rm;

    Dissipation d;
    for (int j = 1; j < N; ++j) {
        const double K = ipow(s.r[j], 2 * m);
        const double V = 0.5 * (s.v[j - 1] + s.v[j]);
        const double de = (s.e[j] - s.e[j - 1]) / dx;
        d.heat += p.kappa * K * de * de / (V * s.e[j - 1] * s.e[j]) * dx;
    }
    const double shear_w = 2.0 * m * p.mu / n;
    for (int c = 0; c < N; ++c) {
        const double q0 = M[c] * s.u[c];
        const double q1 = M[c + 1] * s.u[c + 1];
        const double w = (q1 - q0) / dx;
        const double sR0 = std::sqrt(ipow(s.r[c], n));
        const double sR1 = std::sqrt(ipow(s.r[c + 1], n));
        // mean of u/r whose chain rule for q^2/r^n is exact on a cell
        const double sbar = (q0 / sR0 + q1 / sR1) / (sR0 + sR1);
        const double ve = s.v[c] * s.e[c];
        d.bulk += p.bulk() * w * w / ve * dx;
        const double sq = w - n * s.v[c] * sbar;
        d.shear += shear_w * sq * sq / ve * dx;
    }
    return d;
}

inline auto entropy_functional(const LagrangianState& s, const FluidParams& p) -> EntropyReport {
    EntropyReport rep;
    rep.t = s.t;
    rep.E = entropy_value(s, p);
    rep.D = dissipation(s, p);
    return rep;
}

}  // namespace radns
