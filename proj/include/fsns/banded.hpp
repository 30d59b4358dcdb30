#pragma once

#include "fsns/common.hpp"

namespace fsns {

/// Small banded linear solver with partial pivoting (LAPACK-style storage
/// would be overkill at these sizes; rows are kept dense over the band).
/// Bandwidths kl/ku are the number of sub/superdiagonals before pivoting;
/// pivoting can push fill into ku + kl superdiagonals.
class BandedMatrix {
  public:
    BandedMatrix(int n, int kl, int ku)
        : n_(n), kl_(kl), ku_(ku), width_(kl + (ku + kl) + 1), a_(static_cast<size_t>(n) * width_, 0.0) {}

    /// Access A(i, j); valid for j in [i - kl, i + ku + kl].
    double& at(int i, int j) {
        const int off = j - i + kl_;
        if (off < 0 || off >= width_) throw ContractError("banded: index outside band");
        return a_[static_cast<size_t>(i) * width_ + off];
    }

    /// Factor and solve in place (single right-hand side).
    void solve(std::vector<double>& b) {
        if (static_cast<int>(b.size()) != n_) throw ContractError("banded: rhs size mismatch");
        // Gaussian elimination with row partial pivoting within the band.
        for (int k = 0; k < n_; ++k) {
            int piv = k;
            double best = std::abs(get(k, k));
            for (int i = k + 1; i <= std::min(n_ - 1, k + kl_); ++i) {
                const double v = std::abs(get(i, k));
                if (v > best) {
                    best = v;
                    piv = i;
                }
            }
            if (best == 0.0) throw ContractError("banded: singular matrix");
            if (piv != k) {
                for (int j = k; j <= std::min(n_ - 1, k + ku_ + kl_); ++j)
                    std::swap(ref(k, j), ref(piv, j));
                std::swap(b[k], b[piv]);
            }
            const double d = get(k, k);
            for (int i = k + 1; i <= std::min(n_ - 1, k + kl_); ++i) {
                const double m = get(i, k) / d;
                if (m == 0.0) continue;
                for (int j = k + 1; j <= std::min(n_ - 1, k + ku_ + kl_); ++j)
                    ref(i, j) -= m * get(k, j);
                ref(i, k) = 0.0;
                b[i] -= m * b[k];
            }
        }
        for (int i = n_ - 1; i >= 0; --i) {
            double s = b[i];
            for (int j = i + 1; j <= std::min(n_ - 1, i + ku_ + kl_); ++j) s -= get(i, j) * b[j];
            b[i] = s / get(i, i);
        }
    }

  private:
    double get(int i, int j) const {
        const int off = j - i + kl_;
        if (off < 0 || off >= width_) return 0.0;
        return a_[static_cast<size_t>(i) * width_ + off];
    }
    double& ref(int i, int j) { return at(i, j); }

    int n_, kl_, ku_, width_;
    std::vector<double> a_;
};

}  // namespace fsns
