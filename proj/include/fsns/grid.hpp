#pragma once

#include <algorithm>
#include <cstdint>

#include "fsns/common.hpp"

namespace fsns {

struct GridConfig {
    int dim_h = 1;          // horizontal dimension, 1 or 2
    double length = 2 * pi; // horizontal period per direction
    int ny = 64;            // horizontal points per direction (power of two)
    int nz = 96;            // vertical points
    double z_max = 3.0;     // truncation depth (> 0)
    double stretch = 1.0;   // vertical grading parameter (>= 1)
};

/// Finite-difference weights on arbitrary nodes (Fornberg's recurrence).
/// Returns weights w such that f^(m)(x0) ~= sum_k w[k] f(x[k]).
inline std::vector<double> fd_weights(double x0, const std::vector<double>& x, int m) {
    const int n = static_cast<int>(x.size());
    std::vector<std::vector<double>> c(n, std::vector<double>(m + 1, 0.0));
    double c1 = 1.0;
    double c4 = x[0] - x0;
    c[0][0] = 1.0;
    for (int i = 1; i < n; ++i) {
        const int mn = std::min(i, m);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = x[i] - x0;
        for (int j = 0; j < i; ++j) {
            const double c3 = x[i] - x[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k)
                    c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for (int k = mn; k >= 1; --k)
                c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    std::vector<double> w(n);
    for (int i = 0; i < n; ++i) w[i] = c[i][m];
    return w;
}

/// Banded vertical differentiation operator: per-row stencil window + weights.
struct VertStencils {
    int width = 0;
    std::vector<int> first;   // first node index of each row's window
    std::vector<double> w;    // nz x width weights, row-major

    /// d/dz (or d2/dz2) of one z-column: src/dst length nz, stride between
    /// consecutive z samples.
    void apply(const double* src, double* dst, int nz, std::ptrdiff_t stride = 1) const {
        for (int j = 0; j < nz; ++j) {
            double acc = 0.0;
            const double* wr = &w[static_cast<size_t>(j) * width];
            const int f = first[j];
            for (int k = 0; k < width; ++k) acc += wr[k] * src[(f + k) * stride];
            dst[j * stride] = acc;
        }
    }
};

inline VertStencils make_vert_stencils(const std::vector<double>& z, int width, int order) {
    const int nz = static_cast<int>(z.size());
    if (width > nz) throw ContractError("stencil width exceeds node count");
    VertStencils s;
    s.width = width;
    s.first.resize(nz);
    s.w.resize(static_cast<size_t>(nz) * width);
    for (int j = 0; j < nz; ++j) {
        int f = std::clamp(j - width / 2, 0, nz - width);
        s.first[j] = f;
        std::vector<double> nodes(z.begin() + f, z.begin() + f + width);
        auto wj = fd_weights(z[j], nodes, order);
        std::copy(wj.begin(), wj.end(), s.w.begin() + static_cast<size_t>(j) * width);
    }
    return s;
}

/// Periodic horizontal grid x graded vertical grid on the truncated lower
/// half-space [-z_max, 0]. Owns node locations, quadrature weights,
/// wavenumber lattice and vertical differentiation stencils.
class GridSpec {
  public:
    GridConfig cfg;
    std::vector<double> z;        // nz nodes, z[0] = -z_max, z[nz-1] = 0
    std::vector<double> zw;       // trapezoid quadrature weights on z
    std::vector<double> xi;       // per-direction wavenumbers, length ny
    VertStencils d1;              // 4th-order first derivative (5-point)
    VertStencils d2;              // second derivative (5-point)
    VertStencils d1_low;          // 2nd-order first derivative (3-point)
    VertStencils d2_low;          // 2nd-order second derivative (3-point)

    int dim_h() const { return cfg.dim_h; }
    int ny() const { return cfg.ny; }
    int nz() const { return cfg.nz; }
    double length() const { return cfg.length; }
    /// Total horizontal points ny^dim_h.
    int nh() const { return cfg.dim_h == 1 ? cfg.ny : cfg.ny * cfg.ny; }
    /// Horizontal cell area L^dim_h / nh.
    double dy_cell() const { return std::pow(cfg.length, cfg.dim_h) / nh(); }
    double dy() const { return cfg.length / cfg.ny; }
    double dz_min() const {
        double m = z[1] - z[0];
        for (int j = 1; j + 1 < cfg.nz; ++j) m = std::min(m, z[j + 1] - z[j]);
        return m;
    }
    double y_of(int i) const { return cfg.length * i / cfg.ny; }

    /// Volume integral of f (plain measure dy dz).
    double integrate(const std::vector<double>& f) const {
        double acc = 0.0;
        const int n_z = cfg.nz;
        for (int ih = 0; ih < nh(); ++ih)
            for (int j = 0; j < n_z; ++j) acc += zw[j] * f[static_cast<size_t>(ih) * n_z + j];
        return acc * dy_cell();
    }

    bool same_layout(const GridSpec& o) const {
        return cfg.dim_h == o.cfg.dim_h && cfg.ny == o.cfg.ny && cfg.nz == o.cfg.nz &&
               cfg.length == o.cfg.length && cfg.z_max == o.cfg.z_max &&
               cfg.stretch == o.cfg.stretch;
    }
};

inline bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

/// Graded vertical map: z(s) = -z_max * [(1-s)/K + (1-1/K)(1-s)^2], K = stretch.
/// Spacing adjacent to z = 0 scales like z_max / (K * (nz-1)); K = 1 is uniform.
inline GridSpec build_grid(const GridConfig& cfg) {
    if (!is_pow2(cfg.ny)) throw ConfigError("grid.ny must be a power of two, got " + std::to_string(cfg.ny));
    if (cfg.nz < 8) throw ConfigError("grid.nz must be >= 8, got " + std::to_string(cfg.nz));
    if (!(cfg.z_max > 0)) throw ConfigError("grid.z_max must be > 0");
    if (!(cfg.stretch >= 1)) throw ConfigError("grid.stretch must be >= 1");
    if (cfg.dim_h != 1 && cfg.dim_h != 2) throw ConfigError("grid.dim_h must be 1 or 2");
    if (!(cfg.length > 0)) throw ConfigError("grid.length must be > 0");

    GridSpec g;
    g.cfg = cfg;
    const int nz = cfg.nz;
    g.z.resize(nz);
    const double K = cfg.stretch;
    for (int j = 0; j < nz; ++j) {
        const double s = static_cast<double>(j) / (nz - 1);
        const double u = 1.0 - s;
        g.z[j] = -cfg.z_max * (u / K + (1.0 - 1.0 / K) * u * u);
    }
    g.z[0] = -cfg.z_max;
    g.z[nz - 1] = 0.0;

    g.zw.assign(nz, 0.0);
    for (int j = 0; j + 1 < nz; ++j) {
        const double h = g.z[j + 1] - g.z[j];
        g.zw[j] += 0.5 * h;
        g.zw[j + 1] += 0.5 * h;
    }

    g.xi.resize(cfg.ny);
    const double k0 = 2 * pi / cfg.length;
    for (int i = 0; i < cfg.ny; ++i) {
        const int m = (i <= cfg.ny / 2) ? i : i - cfg.ny;
        g.xi[i] = k0 * m;
    }

    g.d1 = make_vert_stencils(g.z, std::min(5, nz), 1);
    g.d2 = make_vert_stencils(g.z, std::min(5, nz), 2);
    g.d1_low = make_vert_stencils(g.z, 3, 1);
    g.d2_low = make_vert_stencils(g.z, 3, 2);
    return g;
}

}  // namespace fsns
