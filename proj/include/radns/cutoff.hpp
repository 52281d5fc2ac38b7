#pragma once

#include <algorithm>
#include <cmath>

namespace radns {

// quintic smoothstep: 0 for s<=0, 1 for s>=1, C2, max slope 15/8
inline auto smoothstep(double s) -> double {
    if (s <= 0.0) return 0.0;
    if (s >= 1.0) return 1.0;
    return s * s * s * (10.0 + s * (-15.0 + 6.0 * s));
}

inline auto smoothstep_deriv(double s) -> double {
    if (s <= 0.0 || s >= 1.0) return 0.0;
    const double q = s * (1.0 - s);
    return 30.0 * q * q;
}

/// chi = 1 for zeta<=0, 0 for zeta>=1, |chi'| <= 2. Shared by truncation and extension.
inline auto chi(double zeta) -> double { return 1.0 - smoothstep(zeta); }
inline auto chi_deriv(double zeta) -> double { return -smoothstep_deriv(zeta); }

// inner cutoff: 0 for r<=a, 1 for r>=2a
inline auto chi_inner(double r, double a) -> double { return smoothstep(r / a - 1.0); }
inline auto chi_inner_deriv(double r, double a) -> double { return smoothstep_deriv(r / a - 1.0) / a; }

// far-field cutoff: 1 for r <= r_edge/2, 0 for r >= r_edge
inline auto chi_outer(double r, double r_edge) -> double {
    return chi((2.0 * r - r_edge) / r_edge);
}
inline auto chi_outer_deriv(double r, double r_edge) -> double {
    return 2.0 / r_edge * chi_deriv((2.0 * r - r_edge) / r_edge);
}

inline auto sigma_weight(double t) -> double { return std::clamp(t, 0.0, 1.0); }

/// C1 spatial cutoff g_eps on the mass coordinate
inline auto g_eps(double x, double eps) -> double {
    if (x <= 0.5 * eps) return 0.0;
    if (x <= 0.75 * eps) {
        const double d = x - 0.5 * eps;
        return 8.0 / (eps * eps) * d * d;
    }
    if (x <= eps) {
        const double d = x - eps;
        return 1.0 - 8.0 / (eps * eps) * d * d;
    }
    return 1.0;
}

inline auto g_eps_deriv(double x, double eps) -> double {
    if (x <= 0.5 * eps || x >= eps) return 0.0;
    if (x <= 0.75 * eps) return 16.0 / (eps * eps) * (x - 0.5 * eps);
    return -16.0 / (eps * eps) * (x - eps);
}

}  // namespace radns
