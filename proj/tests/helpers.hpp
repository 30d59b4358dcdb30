#pragma once

#include <random>

#include "catch2/catch_amalgamated.hpp"
#include "fsns/commutators.hpp"

namespace testutil {

using namespace fsns;

/// Surface built from a few Fourier modes, with every derived quantity
/// (extension, chart derivatives) available in closed form. Wavenumbers are
/// integer multiples of 2*pi/L so the grid resolves each mode exactly.
struct ModeSurface {
    struct Mode {
        int m = 1;       // integer wavenumber
        double a = 0.0;  // cos amplitude
        double b = 0.0;  // sin amplitude
    };
    std::vector<Mode> modes;
    double L = 2 * pi;

    double k(const Mode& mo) const { return 2 * pi * mo.m / L; }

    double h(double y) const {
        double s = 0.0;
        for (const auto& mo : modes) s += mo.a * std::cos(k(mo) * y) + mo.b * std::sin(k(mo) * y);
        return s;
    }
    double hy(double y) const {
        double s = 0.0;
        for (const auto& mo : modes) {
            const double kk = k(mo);
            s += kk * (-mo.a * std::sin(kk * y) + mo.b * std::cos(kk * y));
        }
        return s;
    }
    double hyy(double y) const {
        double s = 0.0;
        for (const auto& mo : modes) {
            const double kk = k(mo);
            s -= kk * kk * (mo.a * std::cos(kk * y) + mo.b * std::sin(kk * y));
        }
        return s;
    }

    double mult(const Mode& mo, double z) const {
        const double kk = k(mo);
        return std::exp(-z * z * (1.0 + kk * kk));
    }
    double eta(double y, double z) const {
        double s = 0.0;
        for (const auto& mo : modes)
            s += mult(mo, z) * (mo.a * std::cos(k(mo) * y) + mo.b * std::sin(k(mo) * y));
        return s;
    }
    double eta_y(double y, double z) const {
        double s = 0.0;
        for (const auto& mo : modes) {
            const double kk = k(mo);
            s += mult(mo, z) * kk * (-mo.a * std::sin(kk * y) + mo.b * std::cos(kk * y));
        }
        return s;
    }
    double eta_z(double y, double z) const {
        double s = 0.0;
        for (const auto& mo : modes) {
            const double kk = k(mo);
            s += -2.0 * z * (1.0 + kk * kk) * mult(mo, z) *
                 (mo.a * std::cos(kk * y) + mo.b * std::sin(kk * y));
        }
        return s;
    }

    Field sample_h(const Domain& dom) const {
        Field out(dom.nh());
        for (int i = 0; i < dom.nh(); ++i) out[i] = h(dom.grid.y_of(i));
        return out;
    }
};

inline Domain make_domain_1d(int ny = 32, int nz = 48, double z_max = 3.0, double stretch = 2.0) {
    GridConfig cfg;
    cfg.dim_h = 1;
    cfg.ny = ny;
    cfg.nz = nz;
    cfg.z_max = z_max;
    cfg.stretch = stretch;
    return Domain(cfg);
}

/// Seeded smooth band-limited volume field: a handful of y-modes times
/// smooth z-profiles, sampled from the closed form.
inline Field random_volume(const Domain& dom, std::mt19937_64& rng, int kmax = 4, double amp = 1.0) {
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    struct Term {
        double a, kk, ph, q, r;
    };
    std::vector<Term> terms;
    for (int m = 0; m <= kmax; ++m)
        terms.push_back({amp * uni(rng) / (1.0 + m * m), 2 * pi * m / dom.grid.length(),
                         pi * uni(rng), 0.5 * (uni(rng) + 1.2), uni(rng)});
    Field f(dom.volume_size());
    const int n_z = dom.nz();
    for (int ih = 0; ih < dom.nh(); ++ih) {
        const double y = dom.grid.y_of(ih);
        for (int j = 0; j < n_z; ++j) {
            const double z = dom.grid.z[j];
            double s = 0.0;
            for (const auto& t : terms)
                s += t.a * std::cos(t.kk * y + t.ph) * std::exp(t.q * z) * (1.0 + t.r * z);
            f[static_cast<size_t>(ih) * n_z + j] = s;
        }
    }
    return f;
}

inline ModeSurface random_surface(std::mt19937_64& rng, double amp, int nmodes = 3, double L = 2 * pi) {
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    ModeSurface s;
    s.L = L;
    for (int m = 1; m <= nmodes; ++m) s.modes.push_back({m, amp * uni(rng) / m, amp * uni(rng) / m});
    return s;
}

/// 6th-order centered difference, for fine-step closed-form oracles.
template <typename F>
double cdiff6(F&& f, double x, double h) {
    return (45.0 * (f(x + h) - f(x - h)) - 9.0 * (f(x + 2 * h) - f(x - 2 * h)) +
            (f(x + 3 * h) - f(x - 3 * h))) /
           (60.0 * h);
}

inline double max_abs_diff(const Field& a, const Field& b) {
    double m = 0.0;
    for (size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace testutil
