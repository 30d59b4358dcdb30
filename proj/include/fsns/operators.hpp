#pragma once

#include "fsns/geometry.hpp"

namespace fsns {

/// Transformed derivatives: dphi_h for the horizontal directions,
/// dphi_z for the vertical, dphi_t when a time derivative field is supplied.
/// d_i^phi f = d_i f - (d_i phi / d_z phi) d_z f,   i in {t, 1, 2}
/// d_3^phi f = (1 / d_z phi) d_z f

inline Field dphi_h(const Field& f, const ChartMetric& m, int dir, const Domain& dom) {
    Field out = dom.spec.deriv(f, dir);
    Field fz = dom.dz(f);
    for (size_t k = 0; k < out.size(); ++k) out[k] -= m.dphi_h[dir][k] / m.J[k] * fz[k];
    return out;
}

inline Field dphi_z(const Field& f, const ChartMetric& m, const Domain& dom) {
    Field out = dom.dz(f);
    for (size_t k = 0; k < out.size(); ++k) out[k] /= m.J[k];
    return out;
}

inline Field dphi_t(const Field& f, const Field& df_dt, const ChartMetric& m, const Domain& dom) {
    if (df_dt.size() != f.size()) throw ContractError("dphi_t requires a time-derivative field");
    Field fz = dom.dz(f);
    Field out(f.size());
    for (size_t k = 0; k < out.size(); ++k) out[k] = df_dt[k] - m.dphi_t[k] / m.J[k] * fz[k];
    return out;
}

/// Gradient (dim_h + 1 components), composed from the first derivatives.
inline std::vector<Field> grad_phi(const Field& f, const ChartMetric& m, const Domain& dom) {
    const int dh = m.dim_h();
    std::vector<Field> out(dh + 1);
    for (int d = 0; d < dh; ++d) out[d] = dphi_h(f, m, d, dom);
    out[dh] = dphi_z(f, m, dom);
    return out;
}

inline Field div_phi(const std::vector<Field>& v, const ChartMetric& m, const Domain& dom) {
    const int dh = m.dim_h();
    if (static_cast<int>(v.size()) != dh + 1) throw ContractError("div_phi: component count mismatch");
    Field out = dphi_z(v[dh], m, dom);
    for (int d = 0; d < dh; ++d) {
        Field t = dphi_h(v[d], m, d, dom);
        for (size_t k = 0; k < out.size(); ++k) out[k] += t[k];
    }
    return out;
}

/// Conservative-form divergence (1/J)[d_1(J v_1) + d_2(J v_2) + d_z(v . Ntil)]
/// with Ntil = (-d_1 phi, -d_2 phi, 1). Analytically equal to div_phi; the
/// discrete difference is pure truncation error, which the identity
/// diagnostics rely on.
inline Field div_phi_conservative(const std::vector<Field>& v, const ChartMetric& m, const Domain& dom) {
    const int dh = m.dim_h();
    const size_t n = m.J.size();
    Field flux(n);
    for (size_t k = 0; k < n; ++k) {
        double a = v[dh][k];
        for (int d = 0; d < dh; ++d) a -= m.dphi_h[d][k] * v[d][k];
        flux[k] = a;
    }
    Field out = dom.dz(flux);
    for (int d = 0; d < dh; ++d) {
        Field jv(n);
        for (size_t k = 0; k < n; ++k) jv[k] = m.J[k] * v[d][k];
        Field t = dom.spec.deriv(jv, d);
        for (size_t k = 0; k < n; ++k) out[k] += t[k];
    }
    for (size_t k = 0; k < n; ++k) out[k] /= m.J[k];
    return out;
}

/// Symmetric gradient S^phi v, packed row-major ((dh+1) x (dh+1), symmetric).
struct SymTensor {
    int nc = 0;
    std::vector<Field> e;  // nc*nc entries
    const Field& operator()(int i, int j) const { return e[static_cast<size_t>(i) * nc + j]; }
    Field& operator()(int i, int j) { return e[static_cast<size_t>(i) * nc + j]; }
};

/// Full (unsymmetrized) gradient tensor G_ij = d_i^phi v_j.
inline SymTensor grad_tensor_phi(const std::vector<Field>& v, const ChartMetric& m, const Domain& dom) {
    const int nc = m.n_comp();
    SymTensor g;
    g.nc = nc;
    g.e.resize(static_cast<size_t>(nc) * nc);
    for (int j = 0; j < nc; ++j) {
        auto gj = grad_phi(v[j], m, dom);
        for (int i = 0; i < nc; ++i) g(i, j) = std::move(gj[i]);
    }
    return g;
}

inline SymTensor sym_grad_phi(const std::vector<Field>& v, const ChartMetric& m, const Domain& dom) {
    SymTensor g = grad_tensor_phi(v, m, dom);
    const int nc = g.nc;
    SymTensor s;
    s.nc = nc;
    s.e.resize(static_cast<size_t>(nc) * nc);
    for (int i = 0; i < nc; ++i)
        for (int j = i; j < nc; ++j) {
            Field t(g(i, j).size());
            for (size_t k = 0; k < t.size(); ++k) t[k] = 0.5 * (g(i, j)[k] + g(j, i)[k]);
            s(j, i) = t;
            s(i, j) = std::move(t);
        }
    return s;
}

/// Laplacian in divergence form: (1/J) div(E grad f) with
///   E = [ J I_h        -grad_y phi                  ]
///       [ -grad_y phi^t  (1 + |grad_y phi|^2) / J   ]
/// assembled with nested first-derivative stencils.
inline Field laplace_phi(const Field& f, const ChartMetric& m, const Domain& dom) {
    const int dh = m.dim_h();
    const size_t n = m.J.size();
    std::vector<Field> df(dh + 1);
    for (int d = 0; d < dh; ++d) df[d] = dom.spec.deriv(f, d);
    df[dh] = dom.dz(f);

    std::vector<Field> q(dh + 1, Field(n));
    for (size_t k = 0; k < n; ++k) {
        double g2 = 1.0;
        for (int d = 0; d < dh; ++d) g2 += m.dphi_h[d][k] * m.dphi_h[d][k];
        for (int d = 0; d < dh; ++d)
            q[d][k] = m.J[k] * df[d][k] - m.dphi_h[d][k] * df[dh][k];
        double qz = g2 / m.J[k] * df[dh][k];
        for (int d = 0; d < dh; ++d) qz -= m.dphi_h[d][k] * df[d][k];
        q[dh][k] = qz;
    }

    Field out = dom.dz(q[dh]);
    for (int d = 0; d < dh; ++d) {
        Field t = dom.spec.deriv(q[d], d);
        for (size_t k = 0; k < n; ++k) out[k] += t[k];
    }
    for (size_t k = 0; k < n; ++k) out[k] /= m.J[k];
    return out;
}

/// Laplacian as the composition sum_i d_i^phi d_i^phi f (independent route).
inline Field laplace_phi_composed(const Field& f, const ChartMetric& m, const Domain& dom) {
    const int dh = m.dim_h();
    Field out = dphi_z(dphi_z(f, m, dom), m, dom);
    for (int d = 0; d < dh; ++d) {
        Field t = dphi_h(dphi_h(f, m, d, dom), m, d, dom);
        for (size_t k = 0; k < out.size(); ++k) out[k] += t[k];
    }
    return out;
}

}  // namespace fsns
