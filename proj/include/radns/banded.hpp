#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

namespace radns {

/// Banded LU with partial pivoting (row storage, room for pivot fill-in).
class BandedLU {
public:
    BandedLU() = default;
    BandedLU(int n, int kl, int ku) { resize(n, kl, ku); }

    void resize(int n, int kl, int ku) {
        n_ = n;
        kl_ = kl;
        ku_ = ku;
        w_ = 2 * kl + ku + 1;
        a_.assign(static_cast<std::size_t>(n) * w_, 0.0);
        piv_.assign(n, 0);
    }

    void zero() { std::fill(a_.begin(), a_.end(), 0.0); }

    [[nodiscard]] auto n() const -> int { return n_; }

    // (i, j) with -kl <= j - i <= ku + kl
    auto at(int i, int j) -> double& { return a_[static_cast<std::size_t>(i) * w_ + (j - i + kl_)]; }

    // returns false on a zero pivot
    auto factorize() -> bool {
        const int span = ku_ + kl_;
        for (int k = 0; k < n_; ++k) {
            const int last = std::min(n_ - 1, k + kl_);
            int p = k;
            double best = std::abs(at(k, k));
            for (int i = k + 1; i <= last; ++i) {
                if (std::abs(at(i, k)) > best) {
                    best = std::abs(at(i, k));
                    p = i;
                }
            }
            piv_[k] = p;
            if (!(best > 0.0) || !std::isfinite(best)) return false;
            const int jmax = std::min(n_ - 1, k + span);
            if (p != k)
                for (int j = k; j <= jmax; ++j) std::swap(at(k, j), at(p, j));
            const double inv = 1.0 / at(k, k);
            for (int i = k + 1; i <= last; ++i) {
                const double l = at(i, k) * inv;
                at(i, k) = l;
                if (l == 0.0) continue;
                for (int j = k + 1; j <= jmax; ++j) at(i, j) -= l * at(k, j);
            }
        }
        return true;
    }

    void solve(std::vector<double>& b) {
        for (int k = 0; k < n_; ++k) {
            if (piv_[k] != k) std::swap(b[k], b[piv_[k]]);
            const int last = std::min(n_ - 1, k + kl_);
            for (int i = k + 1; i <= last; ++i) b[i] -= at(i, k) * b[k];
        }
        const int span = ku_ + kl_;
        for (int k = n_ - 1; k >= 0; --k) {
            double s = b[k];
            const int jmax = std::min(n_ - 1, k + span);
            for (int j = k + 1; j <= jmax; ++j) s -= at(k, j) * b[j];
            b[k] = s / at(k, k);
        }
    }

private:
    int n_ = 0, kl_ = 0, ku_ = 0, w_ = 1;
    std::vector<double> a_;
    std::vector<int> piv_;
};

}  // namespace radns
