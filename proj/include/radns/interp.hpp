#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace radns {

/// Fritsch-Carlson monotone cubic Hermite interpolant on strictly increasing knots.
class MonotoneCubic {
public:
    MonotoneCubic() = default;

    /// left_slope: clamped derivative at the first knot (NaN: one-sided secant)
    MonotoneCubic(std::vector<double> x, std::vector<double> y, double left_slope = std::nan(""))
        : x_(std::move(x)), y_(std::move(y)) {
        const std::size_t n = x_.size();
        if (n < 2 || y_.size() != n) throw std::invalid_argument("MonotoneCubic: need >=2 matching knots");
        for (std::size_t i = 1; i < n; ++i)
            if (!(x_[i] > x_[i - 1])) throw std::invalid_argument("MonotoneCubic: knots not increasing");

        std::vector<double> delta(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i) delta[i] = (y_[i + 1] - y_[i]) / (x_[i + 1] - x_[i]);

        d_.assign(n, 0.0);
        d_[0] = std::isnan(left_slope) ? delta[0] : left_slope;
        d_[n - 1] = delta[n - 2];
        for (std::size_t i = 1; i + 1 < n; ++i) {
            if (delta[i - 1] * delta[i] <= 0.0) {
                d_[i] = 0.0;
            } else {
                // weighted harmonic mean (Fritsch-Butland form)
                const double h0 = x_[i] - x_[i - 1];
                const double h1 = x_[i + 1] - x_[i];
                const double w1 = 2.0 * h1 + h0;
                const double w2 = h1 + 2.0 * h0;
                d_[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
            }
        }
        for (std::size_t i = 0; i + 1 < n; ++i) {
            if (delta[i] == 0.0) {
                d_[i] = 0.0;
                d_[i + 1] = 0.0;
                continue;
            }
            if (d_[i] * delta[i] < 0.0) d_[i] = 0.0;
            const double al = d_[i] / delta[i];
            const double be = d_[i + 1] / delta[i];
            const double s = al * al + be * be;
            if (s > 9.0) {
                const double tau = 3.0 / std::sqrt(s);
                d_[i] = tau * al * delta[i];
                d_[i + 1] = tau * be * delta[i];
            }
        }
    }

    [[nodiscard]] auto size() const -> std::size_t { return x_.size(); }
    [[nodiscard]] auto xmin() const -> double { return x_.front(); }
    [[nodiscard]] auto xmax() const -> double { return x_.back(); }
    [[nodiscard]] auto knots() const -> const std::vector<double>& { return x_; }
    [[nodiscard]] auto values() const -> const std::vector<double>& { return y_; }

    // clamps to the end values outside the knot range
    [[nodiscard]] auto operator()(double xq) const -> double {
        if (xq <= x_.front()) return y_.front();
        if (xq >= x_.back()) return y_.back();
        const std::size_t i = segment(xq);
        const double h = x_[i + 1] - x_[i];
        const double s = (xq - x_[i]) / h;
        const double s2 = s * s;
        const double s3 = s2 * s;
        return (2 * s3 - 3 * s2 + 1) * y_[i] + (s3 - 2 * s2 + s) * h * d_[i] + (-2 * s3 + 3 * s2) * y_[i + 1] +
               (s3 - s2) * h * d_[i + 1];
    }

    [[nodiscard]] auto deriv(double xq) const -> double {
        if (xq < x_.front() || xq > x_.back()) return 0.0;
        const std::size_t i = segment(std::min(xq, x_.back()));
        const double h = x_[i + 1] - x_[i];
        const double s = (xq - x_[i]) / h;
        const double s2 = s * s;
        return ((6 * s2 - 6 * s) * y_[i] + (6 * s - 6 * s2) * y_[i + 1]) / h + (3 * s2 - 4 * s + 1) * d_[i] +
               (3 * s2 - 2 * s) * d_[i + 1];
    }

private:
    [[nodiscard]] auto segment(double xq) const -> std::size_t {
        auto it = std::upper_bound(x_.begin(), x_.end(), xq);
        std::size_t i = static_cast<std::size_t>(it - x_.begin());
        if (i == 0) return 0;
        i -= 1;
        return std::min(i, x_.size() - 2);
    }

    std::vector<double> x_, y_, d_;
};

/// Linear interpolation with clamped ends.
inline auto lerp_table(const std::vector<double>& x, const std::vector<double>& y, double xq) -> double {
    if (xq <= x.front()) return y.front();
    if (xq >= x.back()) return y.back();
    auto it = std::upper_bound(x.begin(), x.end(), xq);
    const std::size_t i = static_cast<std::size_t>(it - x.begin()) - 1;
    const double s = (xq - x[i]) / (x[i + 1] - x[i]);
    return (1.0 - s) * y[i] + s * y[i + 1];
}

}  // namespace radns
