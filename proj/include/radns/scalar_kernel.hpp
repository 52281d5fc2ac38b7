#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace radns {

class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class UnsupportedError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

enum class ConvexFn { G, Psi, H };
enum class Branch { Left, Right };

inline auto to_string(ConvexFn fn) -> std::string {
    switch (fn) {
        case ConvexFn::G: return "G";
        case ConvexFn::Psi: return "psi";
        case ConvexFn::H: return "H";
    }
    return "?";
}

// G(z)=1-z+z log z, psi(z)=z-1-log z, H(z)=z log z
inline auto convex_eval(ConvexFn fn, double zeta) -> double {
    if (!(zeta > 0.0)) throw DomainError("convex_eval: zeta must be positive");
    const double d = zeta - 1.0;
    switch (fn) {
        case ConvexFn::G: return (zeta == 1.0) ? 0.0 : 1.0 - zeta + zeta * std::log(zeta);
        case ConvexFn::Psi:
            if (zeta == 1.0) return 0.0;
            // zeta - 1 is exact on [0.5, 2]; outside it log1p(d) would round d
            return (zeta >= 0.5 && zeta <= 2.0) ? d - std::log1p(d) : d - std::log(zeta);
        case ConvexFn::H: return (zeta == 1.0) ? 0.0 : zeta * std::log(zeta);
    }
    return 0.0;
}

inline auto convex_deriv(ConvexFn fn, double zeta) -> double {
    switch (fn) {
        case ConvexFn::G: return std::log(zeta);
        case ConvexFn::Psi: return 1.0 - 1.0 / zeta;
        case ConvexFn::H: return 1.0 + std::log(zeta);
    }
    return 0.0;
}

inline auto convex_argmin(ConvexFn fn) -> double {
    return fn == ConvexFn::H ? std::exp(-1.0) : 1.0;
}

inline auto convex_min(ConvexFn fn) -> double {
    return fn == ConvexFn::H ? -std::exp(-1.0) : 0.0;
}

namespace detail {

static constexpr double kLargeArg = 700.0;

// fixed-point seeds for the right branch at large y; avoids a long bracket walk
inline auto right_branch_asymptotic(ConvexFn fn, double y) -> double {
    double z = y;
    for (int it = 0; it < 60; ++it) {
        double next = z;
        switch (fn) {
            case ConvexFn::Psi: next = 1.0 + y + std::log(z); break;
            case ConvexFn::G: next = (y - 1.0 + z) / std::log(z); break;
            case ConvexFn::H: next = y / std::log(z); break;
        }
        if (std::abs(next - z) <= 1e-15 * next) return next;
        z = next;
    }
    return z;
}

inline auto polish(ConvexFn fn, double y, double z, double lo, double hi) -> double {
    for (int it = 0; it < 5; ++it) {
        const double res = convex_eval(fn, z) - y;
        const double d = convex_deriv(fn, z);
        if (res == 0.0 || d == 0.0) break;
        const double next = z - res / d;
        if (!(next >= lo && next <= hi)) break;
        if (std::abs(convex_eval(fn, next) - y) >= std::abs(res)) break;
        z = next;
    }
    return z;
}

}  // namespace detail

/// Left/right inverse of G, psi, H. Bisection in log(zeta) to relative width 1e-14, then Newton polish.
inline auto branch_inverse(ConvexFn fn, Branch branch, double y) -> double {
    const double zmin = convex_argmin(fn);
    const double fmin = convex_min(fn);
    if (std::isnan(y)) throw DomainError("branch_inverse: NaN argument");
    if (y < fmin) throw DomainError("branch_inverse: argument below range minimum of " + to_string(fn));
    if (branch == Branch::Left && fn == ConvexFn::H)
        throw UnsupportedError("branch_inverse: left branch of H is not supported");
    if (branch == Branch::Left && fn == ConvexFn::G && y >= 1.0)
        throw DomainError("branch_inverse: left branch of G has range [0,1)");
    if (y == fmin) return zmin;

    if (branch == Branch::Right) {
        if (y > detail::kLargeArg) {
            const double z = detail::right_branch_asymptotic(fn, y);
            return detail::polish(fn, y, z, zmin, std::numeric_limits<double>::max());
        }
        double lo = zmin;
        double hi = 2.0 * zmin;
        while (convex_eval(fn, hi) < y) {
            lo = hi;
            hi *= 2.0;
        }
        double llo = std::log(lo);
        double lhi = std::log(hi);
        while (lhi - llo > 1e-14) {
            const double mid = 0.5 * (llo + lhi);
            if (mid <= llo || mid >= lhi) break;
            if (convex_eval(fn, std::exp(mid)) < y)
                llo = mid;
            else
                lhi = mid;
        }
        const double z = std::exp(0.5 * (llo + lhi));
        return detail::polish(fn, y, z, std::exp(llo), std::exp(lhi));
    }

    // left branch of psi or G
    if (fn == ConvexFn::Psi && y > detail::kLargeArg) {
        // psi(z) = y with z tiny: z = exp(z - 1 - y); underflows to 0 past y ~ 745
        const double z = std::exp(-1.0 - y);
        return z > 0.0 ? detail::polish(fn, y, z, 0.0, 1.0) : z;
    }
    double hi = zmin;
    double lo = 0.5 * zmin;
    while (convex_eval(fn, lo) < y) {
        hi = lo;
        lo *= 0.5;
        if (lo < 1e-300) break;
    }
    double llo = std::log(lo);
    double lhi = std::log(hi);
    while (lhi - llo > 1e-14) {
        const double mid = 0.5 * (llo + lhi);
        if (mid <= llo || mid >= lhi) break;
        if (convex_eval(fn, std::exp(mid)) < y)
            lhi = mid;
        else
            llo = mid;
    }
    const double z = std::exp(0.5 * (llo + lhi));
    return detail::polish(fn, y, z, std::exp(llo), std::exp(lhi));
}

inline auto psi(double z) -> double { return convex_eval(ConvexFn::Psi, z); }
inline auto psi_left_inv(double y) -> double { return branch_inverse(ConvexFn::Psi, Branch::Left, y); }
inline auto psi_right_inv(double y) -> double { return branch_inverse(ConvexFn::Psi, Branch::Right, y); }

// ===========================================================================
// Density envelopes
// ===========================================================================

struct EnvelopeParams {
    double a = 0.1;
    double C0 = 1.0;
    int n = 3;
    double beta = 0.3;

    [[nodiscard]] auto m() const -> int { return n - 1; }
};

struct EnvelopeBounds {
    double v_lower;
    double v_upper;
    double log_lower;  // exact even when v_lower underflows
    double log_upper;  // +inf when v_upper overflows
};

inline auto envelope_h(const EnvelopeParams& p, double z) -> double {
    if (!(z > 0.0)) throw DomainError("envelope: z must be positive");
    const double inner = std::pow(p.a, p.n) + p.n * z * psi_left_inv(p.C0 / z);
    return std::pow(inner, -2.0 * p.m() / p.n);
}

inline auto envelope_f(const EnvelopeParams& p, double z) -> double {
    return std::exp(p.C0 * envelope_h(p, z));
}

inline auto envelope_gamma(const EnvelopeParams& p, double z, double t) -> double {
    const double h = envelope_h(p, z);
    return std::exp(-(p.m() * p.C0 * t / p.beta) * std::pow(h, p.n / (2.0 * p.m())));
}

inline auto envelope_bounds(const EnvelopeParams& p, double z, double t) -> EnvelopeBounds {
    if (!(z > 0.0)) throw DomainError("envelope_bounds: z must be positive");
    if (t < 0.0) throw DomainError("envelope_bounds: t must be nonnegative");
    const double h = envelope_h(p, z);
    const double C0 = p.C0;
    const double log_f = C0 * h;
    const double f = std::exp(log_f);
    // h^{n/2m} is the reciprocal of the bracket inside h
    const double h_pow = std::pow(h, p.n / (2.0 * p.m()));

    const double inner_up = C0 * t * f + C0 * (1.0 + t) * h * f * std::exp(C0 * t * f);
    const double log_up = std::log(C0) + 2.0 * std::log1p(t) + log_f + inner_up;
    const double log_lo = std::log(C0) - std::log1p(t) - log_f - t * C0 * f * f -
                          (p.m() * C0 * t / p.beta) * h_pow;
    return {std::exp(log_lo), std::exp(log_up), log_lo, log_up};
}

// ===========================================================================
// Set-function bounds
// ===========================================================================

enum class OmegaKind { F1, F2, F3, Omega1, Omega2 };

inline auto f1(double y, double z) -> double {
    if (y < 0.0) throw DomainError("f1: negative measure");
    if (y == 0.0) return 0.0;
    return y * branch_inverse(ConvexFn::G, Branch::Right, z / y);
}

inline auto f2(double y, double z) -> double {
    if (y < 0.0) throw DomainError("f2: negative measure");
    if (y == 0.0) return 0.0;
    return y * psi_right_inv(z / y) - z;
}

inline auto f3(double y, double z) -> double {
    if (y < 0.0) throw DomainError("f3: negative measure");
    if (y == 0.0) return 0.0;
    return y * branch_inverse(ConvexFn::H, Branch::Right, z / y);
}

// closed-form slopes in y
inline auto df1_dy(double y, double z) -> double {
    const double g = branch_inverse(ConvexFn::G, Branch::Right, z / y);
    return (g - 1.0) / std::log(g);
}

inline auto df2_dy(double y, double z) -> double {
    const double s = psi_right_inv(z / y);
    return s * std::log(s) / (s - 1.0);
}

inline auto df3_dy(double y, double z) -> double {
    const double h = branch_inverse(ConvexFn::H, Branch::Right, z / y);
    return h / (1.0 + std::log(h));
}

/// set_measure is L_n(E) = int_E r^m dr
inline auto omega_bounds(double set_measure, double z, OmegaKind which) -> double {
    if (set_measure < 0.0) throw DomainError("omega_bounds: negative set measure");
    if (!(z > 0.0)) throw DomainError("omega_bounds: z must be positive");
    switch (which) {
        case OmegaKind::F1: return f1(set_measure, z);
        case OmegaKind::F2: return f2(set_measure, z);
        case OmegaKind::F3: return f3(set_measure, z);
        case OmegaKind::Omega1: return f1(set_measure, z);
        case OmegaKind::Omega2: return f2(f1(set_measure, z), z);
    }
    return 0.0;
}

}  // namespace radns
