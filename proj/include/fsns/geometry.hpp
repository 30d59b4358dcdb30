#pragma once

#include <array>

#include "fsns/domain.hpp"

namespace fsns {

/// Gaussian lift of the surface elevation into the half-space:
/// eta_hat(xi, z) = exp(-z^2 (1 + |xi|^2)) h_hat(xi), inverted per z-level.
/// The trace at z = 0 reproduces h exactly (multiplier is 1 there).
inline Field extend_height(const SurfaceHeight& h, const Domain& dom) {
    const int ncol = dom.spec.columns(), n_z = dom.nz();
    std::vector<std::complex<double>> c(static_cast<size_t>(ncol) * n_z);
    for (int ic = 0; ic < ncol; ++ic) {
        const double m = 1.0 + dom.spec.xi_sq(ic);
        for (int iz = 0; iz < n_z; ++iz) {
            const double z = dom.grid.z[iz];
            c[static_cast<size_t>(ic) * n_z + iz] = std::exp(-z * z * m) * h.spectral[ic];
        }
    }
    return dom.spec.inverse(c);
}

/// d/dz of the lift, taken analytically through the multiplier:
/// d_z eta_hat = -2 z (1 + |xi|^2) eta_hat.
inline Field extend_height_dz(const SurfaceHeight& h, const Domain& dom) {
    const int ncol = dom.spec.columns(), n_z = dom.nz();
    std::vector<std::complex<double>> c(static_cast<size_t>(ncol) * n_z);
    for (int ic = 0; ic < ncol; ++ic) {
        const double m = 1.0 + dom.spec.xi_sq(ic);
        for (int iz = 0; iz < n_z; ++iz) {
            const double z = dom.grid.z[iz];
            c[static_cast<size_t>(ic) * n_z + iz] = -2.0 * z * m * std::exp(-z * z * m) * h.spectral[ic];
        }
    }
    return dom.spec.inverse(c);
}

/// Chart phi = A z + eta and every metric quantity the calculus and dynamics
/// layers consume. Vector components are ordered (horizontal..., vertical).
struct ChartMetric {
    double A = 1.0;
    Field eta, phi;
    std::vector<Field> dphi_h;  // horizontal derivatives of phi (= of eta), dim_h entries
    Field J;                    // d_z phi = A + d_z eta
    Field dphi_t;               // d_t phi = lift of dh/dt
    std::vector<Field> N;       // extended normal (-d_1 eta, [-d_2 eta], 1)
    std::vector<Field> n;       // unit normal N/|N|
    Field N_mag;                // |N|
    // Time derivatives of the metric, for conormal time derivatives:
    std::vector<Field> dt_dphi_h;  // d_t d_i phi
    Field dt_J;                    // d_t d_z phi

    int dim_h() const { return static_cast<int>(dphi_h.size()); }
    int n_comp() const { return dim_h() + 1; }
};

/// Tangential projector applied pointwise: (I - n (x) n) vec.
inline std::vector<Field> project_tangential(const ChartMetric& m, const std::vector<Field>& vec) {
    const int nc = m.n_comp();
    const size_t n = m.J.size();
    std::vector<Field> out(nc, Field(n));
    for (size_t k = 0; k < n; ++k) {
        double dot = 0.0;
        for (int i = 0; i < nc; ++i) dot += m.n[i][k] * vec[i][k];
        for (int i = 0; i < nc; ++i) out[i][k] = vec[i][k] - m.n[i][k] * dot;
    }
    return out;
}

inline ChartMetric assemble_chart(const SurfaceHeight& h, const SurfaceHeight& dh_dt, double A,
                                  const Domain& dom) {
    if (!(A > 0)) throw ContractError("chart slope A must be positive");
    const int dh = dom.grid.dim_h();
    const int n_z = dom.nz();
    ChartMetric m;
    m.A = A;
    m.eta = extend_height(h, dom);
    Field eta_z = extend_height_dz(h, dom);

    m.phi = dom.zeros_volume();
    m.J = dom.zeros_volume();
    for (int ih = 0; ih < dom.nh(); ++ih)
        for (int iz = 0; iz < n_z; ++iz) {
            const size_t k = static_cast<size_t>(ih) * n_z + iz;
            m.phi[k] = A * dom.grid.z[iz] + m.eta[k];
            m.J[k] = A + eta_z[k];
        }

    m.dphi_h.resize(dh);
    for (int d = 0; d < dh; ++d) m.dphi_h[d] = dom.spec.deriv(m.eta, d);

    m.dphi_t = extend_height(dh_dt, dom);
    m.dt_J = extend_height_dz(dh_dt, dom);
    m.dt_dphi_h.resize(dh);
    for (int d = 0; d < dh; ++d) m.dt_dphi_h[d] = dom.spec.deriv(m.dphi_t, d);

    const size_t nvol = dom.volume_size();
    m.N.assign(dh + 1, Field(nvol));
    m.n.assign(dh + 1, Field(nvol));
    m.N_mag.resize(nvol);
    for (size_t k = 0; k < nvol; ++k) {
        double mag2 = 1.0;
        for (int d = 0; d < dh; ++d) {
            m.N[d][k] = -m.dphi_h[d][k];
            mag2 += m.dphi_h[d][k] * m.dphi_h[d][k];
        }
        m.N[dh][k] = 1.0;
        const double mag = std::sqrt(mag2);
        m.N_mag[k] = mag;
        for (int i = 0; i <= dh; ++i) m.n[i][k] = m.N[i][k] / mag;
    }
    return m;
}

/// Slope normalization A = 1 + 2 max|d_z eta(0)|, so J(0) >= 1 pointwise.
inline double choose_chart_slope(const SurfaceHeight& h, const Domain& dom) {
    Field eta_z = extend_height_dz(h, dom);
    return 1.0 + 2.0 * sup_norm(eta_z);
}

struct DiffeoCheck {
    double min_J = 0.0;
    bool pass = false;
    int at_ih = 0, at_iz = 0;  // location of the minimum, for logging
};

inline DiffeoCheck check_diffeomorphism(const ChartMetric& m, double c0, const Domain& dom) {
    DiffeoCheck r;
    r.min_J = m.J[0];
    const int n_z = dom.nz();
    for (int ih = 0; ih < dom.nh(); ++ih)
        for (int iz = 0; iz < n_z; ++iz) {
            const double j = m.J[static_cast<size_t>(ih) * n_z + iz];
            if (j < r.min_J) {
                r.min_J = j;
                r.at_ih = ih;
                r.at_iz = iz;
            }
        }
    r.pass = r.min_J >= c0;
    return r;
}

struct SurfaceGeometry {
    Field H;                   // double mean curvature div_y(grad h / sqrt(1+|grad h|^2))
    std::vector<Field> grad_h; // dim_h components
    double area = 0.0;         // |Sigma| = integral sqrt(1+|grad h|^2) dy
    double volume = 0.0;       // integral J dy dz over the truncated chart
};

inline Field mean_curvature(const SurfaceHeight& h, const Domain& dom) {
    const int dh = dom.grid.dim_h();
    std::vector<Field> g(dh);
    for (int d = 0; d < dh; ++d) g[d] = dom.spec.deriv_level(h.values, d);
    Field H(dom.nh(), 0.0);
    std::vector<Field> w(dh, Field(dom.nh()));
    for (int k = 0; k < dom.nh(); ++k) {
        double s = 1.0;
        for (int d = 0; d < dh; ++d) s += g[d][k] * g[d][k];
        const double r = 1.0 / std::sqrt(s);
        for (int d = 0; d < dh; ++d) w[d][k] = g[d][k] * r;
    }
    for (int d = 0; d < dh; ++d) {
        Field dw = dom.spec.deriv_level(w[d], d);
        for (int k = 0; k < dom.nh(); ++k) H[k] += dw[k];
    }
    return H;
}

inline SurfaceGeometry surface_geometry(const SurfaceHeight& h, const ChartMetric& m, const Domain& dom) {
    SurfaceGeometry sg;
    const int dh = dom.grid.dim_h();
    sg.H = mean_curvature(h, dom);
    sg.grad_h.resize(dh);
    for (int d = 0; d < dh; ++d) sg.grad_h[d] = dom.spec.deriv_level(h.values, d);
    Field root(dom.nh());
    for (int k = 0; k < dom.nh(); ++k) {
        double s = 1.0;
        for (int d = 0; d < dh; ++d) s += sg.grad_h[d][k] * sg.grad_h[d][k];
        root[k] = std::sqrt(s);
    }
    sg.area = dom.integrate_surface(root);
    sg.volume = dom.integrate(m.J);
    return sg;
}

}  // namespace fsns
