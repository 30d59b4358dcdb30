#pragma once

#include "fsns/conormal.hpp"

namespace fsns {

namespace detail {

/// d_i^phi of a plain field; i in {0=t, 1, 2, 3=z}. For i = 0 the caller must
/// supply the time derivative of the field.
inline Field dphi_any(int i, const Field& x, const Field* xt, const ChartMetric& m, const Domain& dom) {
    switch (i) {
        case 0:
            if (!xt) throw ContractError("dphi_any: i = t needs the time derivative");
            return dphi_t(x, *xt, m, dom);
        case 1:
        case 2:
            return dphi_h(x, m, i - 1, dom);
        case 3:
            return dphi_z(x, m, dom);
        default:
            throw ContractError("dphi_any: i must be 0..3");
    }
}

/// d_t(d_i^phi f) from the stack and the metric time derivatives.
inline Field dt_of_dphi(int i, const TimeStack& f, const ChartMetric& m, const Domain& dom) {
    if (f.depth() < 2) throw ContractError("dt_of_dphi: stack depth < 2");
    const size_t n = m.J.size();
    Field fz = dom.dz(f.d[0]);
    Field ftz = dom.dz(f.d[1]);
    Field out(n);
    if (i == 1 || i == 2) {
        const int d = i - 1;
        Field dft = dom.spec.deriv(f.d[1], d);
        for (size_t k = 0; k < n; ++k) {
            const double jj = m.J[k];
            const double coef_t = (m.dt_dphi_h[d][k] * jj - m.dphi_h[d][k] * m.dt_J[k]) / (jj * jj);
            out[k] = dft[k] - coef_t * fz[k] - m.dphi_h[d][k] / jj * ftz[k];
        }
    } else if (i == 3) {
        for (size_t k = 0; k < n; ++k)
            out[k] = ftz[k] / m.J[k] - fz[k] * m.dt_J[k] / (m.J[k] * m.J[k]);
    } else {
        throw ContractError("dt_of_dphi: second time derivatives are not carried");
    }
    return out;
}

inline TimeStack shift_stack(const TimeStack& f) {
    if (f.depth() < 2) throw ContractError("shift_stack: stack depth < 2");
    TimeStack s;
    s.d.assign(f.d.begin() + 1, f.d.end());
    return s;
}

/// Spatial conormal field applied to a plain field; which in {1, 2, 3}.
inline Field z_spatial(int which, const Field& x, const Domain& dom) {
    if (which == 3) return z3_apply(x, dom);
    return dom.spec.deriv(x, which - 1);
}

/// The coefficient field a = d_i phi: d_t phi, d_1 phi, d_2 phi, or -1 (i = 3
/// per the replacement rule in the expanded commutator).
inline Field coeff_a(int i, const ChartMetric& m, const Domain& dom) {
    if (i == 0) return m.dphi_t;
    if (i == 1 || i == 2) return m.dphi_h[i - 1];
    if (i == 3) return Field(dom.volume_size(), -1.0);
    throw ContractError("coeff_a: i must be 0..3");
}

}  // namespace detail

/// Defining-residual route for the conormal commutator:
///   C_i^alpha(f) = Z^alpha(d_i^phi f) - d_i^phi(Z^alpha f) + d_z^phi f * d_i^phi(Z^alpha eta).
/// Stacks must be deep enough for the time derivatives actually requested;
/// the pairing of Z0 with i = t is rejected (it needs second time derivatives
/// the metric does not carry).
inline Field commutator_residual(const TimeStack& f, const MultiIndex& a, int i, const ChartMetric& m,
                                 const Domain& dom) {
    if (a.order() < 1) throw ContractError("commutator_residual: |alpha| >= 1 required");
    if (i == 0 && a.a0 >= 1) throw ContractError("commutator_residual: Z0 paired with i = t is unsupported");

    const bool need_t = (i == 0);

    // Stack of g = d_i^phi f up to the time depth alpha0 requires.
    TimeStack g(detail::dphi_any(i, f.d[0], f.depth() > 1 ? &f.d[1] : nullptr, m, dom));
    if (a.a0 >= 1) g.d.push_back(detail::dt_of_dphi(i, f, m, dom));
    if (a.a0 >= 2) throw ContractError("commutator_residual: alpha0 <= 1 supported");
    Field term1 = conormal_apply(g, a, dom);

    Field zf = conormal_apply(f, a, dom);
    Field zf_t;
    if (need_t) zf_t = conormal_apply(detail::shift_stack(f), a, dom);
    Field term2 = detail::dphi_any(i, zf, need_t ? &zf_t : nullptr, m, dom);

    TimeStack eta(m.eta, m.dphi_t);
    Field zeta = conormal_apply(eta, a, dom);
    Field zeta_t;
    if (need_t) {
        if (a.a0 >= 1) throw ContractError("commutator_residual: eta stack too shallow");
        zeta_t = conormal_apply(detail::shift_stack(eta), a, dom);
    }
    Field term3 = detail::dphi_any(i, zeta, need_t ? &zeta_t : nullptr, m, dom);

    Field fz = dphi_z(f.d[0], m, dom);
    Field out(term1.size());
    for (size_t k = 0; k < out.size(); ++k) out[k] = term1[k] - term2[k] + fz[k] * term3[k];
    return out;
}

/// Expanded closed form for |alpha| = 1: the three-term sum
///   C_{i,1} = -[Z, a/J, d_z f]
///   C_{i,2} = -d_z f [Z, a, 1/J] - a (Z(1/J) + Z(d_z eta)/J^2) d_z f
///   C_{i,3} = -(a/J) [Z, d_z] f + (a/J^2) d_z f [Z, d_z] eta
/// with a = d_i phi (a = -1 for i = 3). Symmetric commutators of a first-order
/// derivation vanish identically; for Z = Z0 every bracket does, so the form
/// evaluates to zero via the exact metric time derivatives.
inline Field commutator_expanded(const TimeStack& f, int zwhich, int i, const ChartMetric& m,
                                 const Domain& dom) {
    if (zwhich < 0 || zwhich > 3) throw ContractError("commutator_expanded: Z index must be 0..3");
    if (i == 0 && zwhich == 0) throw ContractError("commutator_expanded: Z0 paired with i = t is unsupported");
    const size_t n = dom.volume_size();
    Field a = detail::coeff_a(i, m, dom);
    Field p = dom.dz(f.d[0]);

    if (zwhich == 0) {
        // Z0(1/J) = -dt_J/J^2 and Z0(d_z eta) = dt_J cancel inside C_{i,2};
        // [Z0, d_z] = 0. The closed form is identically zero.
        return Field(n, 0.0);
    }

    Field inv_j(n), dz_eta(n);
    for (size_t k = 0; k < n; ++k) {
        inv_j[k] = 1.0 / m.J[k];
        dz_eta[k] = m.J[k] - m.A;
    }

    auto zs = [&](const Field& x) { return detail::z_spatial(zwhich, x, dom); };
    auto sym = [&](const Field& u, const Field& v) {
        Field uv(n);
        for (size_t k = 0; k < n; ++k) uv[k] = u[k] * v[k];
        Field zuv = zs(uv), zu = zs(u), zv = zs(v);
        Field out(n);
        for (size_t k = 0; k < n; ++k) out[k] = zuv[k] - zu[k] * v[k] - u[k] * zv[k];
        return out;
    };

    Field u(n);
    for (size_t k = 0; k < n; ++k) u[k] = a[k] * inv_j[k];
    Field c1 = sym(u, p);

    Field bracket2 = sym(a, inv_j);
    Field z_invj = zs(inv_j), z_dzeta = zs(dz_eta);

    // [Z, d_z] applied to f and to eta.
    Field zdz_f = zs(p);
    Field dzz_f = dom.dz(zs(f.d[0]));
    Field eta_z = dom.dz(m.eta);
    Field zdz_eta_c = zs(eta_z);
    Field dzz_eta_c = dom.dz(zs(m.eta));

    Field out(n);
    for (size_t k = 0; k < n; ++k) {
        const double jj = m.J[k];
        const double comm_f = zdz_f[k] - dzz_f[k];
        const double comm_eta = zdz_eta_c[k] - dzz_eta_c[k];
        const double c2 = -p[k] * bracket2[k] - a[k] * (z_invj[k] + z_dzeta[k] / (jj * jj)) * p[k];
        const double c3 = -u[k] * comm_f + a[k] / (jj * jj) * p[k] * comm_eta;
        out[k] = -c1[k] + c2 + c3;
    }
    return out;
}

}  // namespace fsns
