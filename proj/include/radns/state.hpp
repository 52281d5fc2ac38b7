#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace radns {

inline auto ipow(double x, int p) -> double {
    double out = 1.0;
    for (int i = 0; i < p; ++i) out *= x;
    return out;
}

/// Staggered mass grid on [0,k]: u, r at the N+1 nodes x_j = j dx; v, e at the N cell centers.
struct LagrangianState {
    double t = 0.0;
    double a = 0.1;
    double k = 1.0;
    int n = 3;
    std::vector<double> v;   // cells
    std::vector<double> u;   // nodes
    std::vector<double> e;   // cells
    std::vector<double> r;   // nodes
    std::vector<double> rm;  // nodes: metric weight r^m used by the step that produced this state

    [[nodiscard]] auto N() const -> int { return static_cast<int>(v.size()); }
    [[nodiscard]] auto m() const -> int { return n - 1; }
    [[nodiscard]] auto dx() const -> double { return k / N(); }
    [[nodiscard]] auto node_x(int j) const -> double { return j * dx(); }
    [[nodiscard]] auto cell_x(int c) const -> double { return (c + 0.5) * dx(); }

    // r^n is linear in x inside a cell
    [[nodiscard]] auto cell_r(int c) const -> double {
        const double R0 = ipow(r[c], n);
        const double R1 = ipow(r[c + 1], n);
        return std::pow(0.5 * (R0 + R1), 1.0 / n);
    }

    [[nodiscard]] auto r_edge() const -> double { return r.back(); }
};

/// r_j = (a^n + n * sum_{i<j} v_i dx)^{1/n}; the cell sum is the exact quadrature for cellwise v.
inline auto reconstruct_radius(const std::vector<double>& v, double a, int n, double dx) -> std::vector<double> {
    std::vector<double> r(v.size() + 1);
    double R = ipow(a, n);
    r[0] = a;
    double acc = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        acc += v[i];
        r[i + 1] = std::pow(R + n * dx * acc, 1.0 / n);
    }
    return r;
}

inline auto mass_identity_residual(const LagrangianState& s) -> double {
    const double An = ipow(s.a, s.n);
    const double dx = s.dx();
    double acc = 0.0;
    double worst = std::abs(ipow(s.r[0], s.n) - An);
    for (int i = 0; i < s.N(); ++i) {
        acc += s.v[i];
        worst = std::max(worst, std::abs(ipow(s.r[i + 1], s.n) - An - s.n * dx * acc));
    }
    return worst;
}

inline auto static_metric(const std::vector<double>& r, int m) -> std::vector<double> {
    std::vector<double> out(r.size());
    for (std::size_t j = 0; j < r.size(); ++j) out[j] = ipow(r[j], m);
    return out;
}

}  // namespace radns
