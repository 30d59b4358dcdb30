#pragma once

#include <algorithm>

#include "fsns/conormal.hpp"
#include "fsns/dynamics.hpp"

namespace fsns {

// ---------------------------------------------------------------------------
// Energy ledger

struct EnergyLedger {
    double kinetic = 0.0;           // int (1/2) rho |v|^2 dV_t
    double internal = 0.0;          // int p/(gamma - 1) dV_t
    double external = 0.0;          // p_e |Omega_t|
    double capillary = 0.0;         // sigma |Sigma_t|
    double total = 0.0;             // sum of the four
    double dissipation_rate = 0.0;  // int 2 mu eps |S^phi v|^2 + lambda eps (div^phi v)^2 dV_t
    double bottom_flux_rate = 0.0;  // viscous power input through the bottom wall
};

inline EnergyLedger energy_ledger(const FlowState& s, const PhysParams& par, const Domain& dom) {
    const int dh = dom.grid.dim_h();
    const int nc = dh + 1;
    EnergyLedger e;

    Field kin(dom.volume_size());
    for (size_t k = 0; k < kin.size(); ++k) {
        double v2 = 0.0;
        for (int j = 0; j < nc; ++j) v2 += s.v[j][k] * s.v[j][k];
        kin[k] = 0.5 * s.rho[k] * v2;
    }
    e.kinetic = dom.integrate_weighted(kin, s.metric.J);

    Field p = pressure(s.rho, par.gamma);
    e.internal = dom.integrate_weighted(p, s.metric.J) / (par.gamma - 1.0);

    auto sg = surface_geometry(s.h, s.metric, dom);
    e.external = par.p_e * sg.volume;
    e.capillary = par.sigma * sg.area;

    if (par.viscous()) {
        auto S = sym_grad_phi(s.v, s.metric, dom);
        Field divv = div_phi(s.v, s.metric, dom);
        Field d(dom.volume_size());
        for (size_t k = 0; k < d.size(); ++k) {
            double s2 = 0.0;
            for (int i = 0; i < nc; ++i)
                for (int j = 0; j < nc; ++j) s2 += S(i, j)[k] * S(i, j)[k];
            d[k] = 2.0 * par.mu * par.eps * s2 + par.lambda * par.eps * divv[k] * divv[k];
        }
        e.dissipation_rate = dom.integrate_weighted(d, s.metric.J);

        // Power exerted on the fluid by the bottom wall: v3 = 0 kills the
        // normal traction, leaving the tangential shear acting on the slip
        // velocity (zero for exact free-slip, truncation-small after a step).
        Field flux = dom.zeros_surface();
        for (int d0 = 0; d0 < dh; ++d0) {
            Field sv = dom.trace_bottom(S(dh, d0));
            Field vb = dom.trace_bottom(s.v[d0]);
            for (int ih = 0; ih < dom.nh(); ++ih)
                flux[ih] -= 2.0 * par.mu * par.eps * sv[ih] * vb[ih];
        }
        e.bottom_flux_rate = dom.integrate_surface(flux);
    }
    e.total = e.kinetic + e.internal + e.external + e.capillary;
    return e;
}

/// Running trapezoid integrals of the rate entries, and the closed-system
/// balance defect |E(t) - E(0) + int D - int B|.
class EnergyTracker {
  public:
    void push(const EnergyLedger& e, double t) {
        if (has_prev_) {
            const double w = 0.5 * (t - prev_t_);
            cum_dissipation_ += w * (prev_.dissipation_rate + e.dissipation_rate);
            cum_bottom_flux_ += w * (prev_.bottom_flux_rate + e.bottom_flux_rate);
        } else {
            first_ = e;
        }
        prev_ = e;
        prev_t_ = t;
        has_prev_ = true;
    }
    double cumulative_dissipation() const { return cum_dissipation_; }
    double cumulative_bottom_flux() const { return cum_bottom_flux_; }
    double balance_defect() const {
        if (!has_prev_) throw ContractError("energy tracker: no snapshots pushed");
        return std::abs(prev_.total - first_.total + cum_dissipation_ - cum_bottom_flux_);
    }
    const EnergyLedger& first() const { return first_; }
    const EnergyLedger& last() const { return prev_; }

  private:
    EnergyLedger first_, prev_;
    double prev_t_ = 0.0;
    double cum_dissipation_ = 0.0, cum_bottom_flux_ = 0.0;
    bool has_prev_ = false;
};

// ---------------------------------------------------------------------------
// Good unknowns

/// V^alpha = Z^alpha v - d_z^phi v Z^alpha eta and the analogue Q^alpha for
/// the pressure; the combination whose evolution closes at top conormal order.
struct GoodUnknowns {
    std::vector<Field> V;
    Field Q;
};

inline GoodUnknowns good_unknowns(const FlowState& s, const Tendencies& td, const MultiIndex& a,
                                  const PhysParams& par, const Domain& dom) {
    if (a.order() < 1) throw ContractError("good_unknowns: |alpha| >= 1 required");
    if (a.a0 > 1)
        throw ContractError("good_unknowns: alpha0 <= 1 (stacks carry one time derivative)");
    const int nc = dom.grid.dim_h() + 1;

    Field p = pressure(s.rho, par.gamma);
    Field dpdt(p.size());
    for (size_t k = 0; k < p.size(); ++k)
        dpdt[k] = par.gamma * std::pow(s.rho[k], par.gamma - 1.0) * td.drho[k];
    Field pz = dphi_z(p, s.metric, dom);

    TimeStack eta_s(s.metric.eta, s.metric.dphi_t);
    Field za_eta = conormal_apply(eta_s, a, dom);

    GoodUnknowns g;
    g.V.resize(nc);
    for (int j = 0; j < nc; ++j) {
        g.V[j] = conormal_apply(TimeStack(s.v[j], td.dv[j]), a, dom);
        Field vz = dphi_z(s.v[j], s.metric, dom);
        for (size_t k = 0; k < g.V[j].size(); ++k) g.V[j][k] -= vz[k] * za_eta[k];
    }
    g.Q = conormal_apply(TimeStack(std::move(p), std::move(dpdt)), a, dom);
    for (size_t k = 0; k < g.Q.size(); ++k) g.Q[k] -= pz[k] * za_eta[k];
    return g;
}

inline GoodUnknowns good_unknowns(const FlowState& s, const MultiIndex& a, const PhysParams& par,
                                  const Domain& dom) {
    return good_unknowns(s, rhs(s, par, dom), a, par, dom);
}

// ---------------------------------------------------------------------------
// Taylor sign

struct TaylorSign {
    Field trace;              // -d_z^phi p at z = 0, per surface node
    double min_value = 0.0;
    int at_ih = 0;
    bool degenerate = false;  // min <= 0: sign condition fails or is marginal
};

inline TaylorSign taylor_sign(const FlowState& s, const PhysParams& par, const Domain& dom) {
    const int nzv = dom.nz();
    const auto& st = dom.grid.d1;
    const int w = st.width;
    const int first = st.first[nzv - 1];
    const double* wrow = &st.w[static_cast<size_t>(nzv - 1) * w];
    Field p = pressure(s.rho, par.gamma);
    TaylorSign out;
    out.trace.resize(dom.nh());
    for (int ih = 0; ih < dom.nh(); ++ih) {
        const size_t base = static_cast<size_t>(ih) * nzv;
        const double ps = p[base + nzv - 1];
        // Offset form: the stencil annihilates constants exactly in floating
        // point, so a uniform pressure reads exactly zero, never a round-off
        // value of spurious sign.
        double acc = 0.0;
        for (int k = 0; k < w; ++k) acc += wrow[k] * (p[base + first + k] - ps);
        out.trace[ih] = -acc / s.metric.J[base + nzv - 1];
        if (ih == 0 || out.trace[ih] < out.min_value) {
            out.min_value = out.trace[ih];
            out.at_ih = ih;
        }
    }
    out.degenerate = !(out.min_value > 0.0);
    return out;
}

// ---------------------------------------------------------------------------
// Structural residuals

/// Residuals of the boundary-adapted identities, each evaluated with two
/// independent discrete routes so that the residual is pure truncation:
///  - normal derivative:  d_z v . n = (J/|N|)(div^phi v - d_1 v_1 - d_2 v_2),
///    divergence via the conservative route;
///  - vorticity:          2 S_n = omega_n + 2 Pi (d_1 v . N, d_2 v . N, 0)^t,
///    omega via the conservative curl (for d_h = 1 the scalar reduction).
struct StructuralResiduals {
    double div_identity_sup = 0.0, div_identity_l2 = 0.0;
    double vort_identity_sup = 0.0, vort_identity_l2 = 0.0;
    double sn_trace_sup = 0.0;    // sup |Pi(S^phi v N)| on z = 0
    double zeta_trace_sup = 0.0;  // sup |zeta_n| on z = 0
};

inline StructuralResiduals structural_residuals(const FlowState& s, const Domain& dom) {
    const auto& m = s.metric;
    const int dh = dom.grid.dim_h();
    const int nc = dh + 1;
    const int nzv = dom.nz();
    const size_t n = dom.volume_size();
    StructuralResiduals out;

    {
        Field divc = div_phi_conservative(s.v, m, dom);
        for (int d = 0; d < dh; ++d) {
            Field t = dom.spec.deriv(s.v[d], d);
            for (size_t k = 0; k < n; ++k) divc[k] -= t[k];
        }
        std::vector<Field> dzv(nc);
        for (int j = 0; j < nc; ++j) dzv[j] = dom.dz(s.v[j]);
        Field r(n);
        for (size_t k = 0; k < n; ++k) {
            double lhs = 0.0;
            for (int j = 0; j < nc; ++j) lhs += dzv[j][k] * m.n[j][k];
            r[k] = lhs - m.J[k] / m.N_mag[k] * divc[k];
        }
        out.div_identity_sup = sup_norm(r);
        out.div_identity_l2 = std::sqrt(dom.l2sq_weighted(r, m.J));
    }

    auto S = sym_grad_phi(s.v, m, dom);
    std::vector<Field> sn(nc, Field(n));
    for (size_t k = 0; k < n; ++k)
        for (int j = 0; j < nc; ++j) {
            double a = 0.0;
            for (int i = 0; i < nc; ++i) a += m.N[i][k] * S(i, j)[k];
            sn[j][k] = a;
        }
    std::vector<Field> snp = project_tangential(m, sn);

    // J d_i^phi v_j in flux form: d_i(J v_j) - d_z(d_i phi v_j) horizontally,
    // plainly d_z v_j vertically. Discretely independent of the sharp route.
    auto flux_term = [&](int i, int j) {
        if (i == dh) return dom.dz(s.v[j]);
        Field a(n), b(n);
        for (size_t k = 0; k < n; ++k) {
            a[k] = m.J[k] * s.v[j][k];
            b[k] = m.dphi_h[i][k] * s.v[j][k];
        }
        Field da = dom.spec.deriv(a, i);
        Field db = dom.dz(b);
        for (size_t k = 0; k < n; ++k) da[k] -= db[k];
        return da;
    };
    std::vector<Field> wn(nc, Field(n, 0.0));
    for (int i = 0; i < nc; ++i)
        for (int j = i + 1; j < nc; ++j) {
            Field fij = flux_term(i, j), fji = flux_term(j, i);
            for (size_t k = 0; k < n; ++k) {
                const double om = (fij[k] - fji[k]) / m.J[k];
                wn[j][k] += m.N[i][k] * om;
                wn[i][k] -= m.N[j][k] * om;
            }
        }

    std::vector<Field> tang(nc, Field(n, 0.0));
    for (int d0 = 0; d0 < dh; ++d0)
        for (int j = 0; j < nc; ++j) {
            Field t = dom.spec.deriv(s.v[j], d0);
            for (size_t k = 0; k < n; ++k) tang[d0][k] += t[k] * m.N[j][k];
        }
    std::vector<Field> tang_p = project_tangential(m, tang);

    {
        Field r(n);
        for (size_t k = 0; k < n; ++k) {
            double acc = 0.0;
            for (int j = 0; j < nc; ++j) {
                const double rj = 2.0 * snp[j][k] - wn[j][k] - 2.0 * tang_p[j][k];
                acc += rj * rj;
            }
            r[k] = std::sqrt(acc);
        }
        out.vort_identity_sup = sup_norm(r);
        out.vort_identity_l2 = std::sqrt(dom.l2sq_weighted(r, m.J));
    }

    for (int ih = 0; ih < dom.nh(); ++ih) {
        const size_t k = static_cast<size_t>(ih) * nzv + nzv - 1;
        double a2 = 0.0;
        for (int j = 0; j < nc; ++j) a2 += snp[j][k] * snp[j][k];
        out.sn_trace_sup = std::max(out.sn_trace_sup, std::sqrt(a2));
    }

    // zeta_n = omega_n + 2 Pi {(grad_y d_t eta, 0)^t - (grad^phi N)^t v};
    // vanishes on z = 0 when the kinematic BC and the stress closure hold.
    auto G = grad_tensor_phi(s.v, m, dom);
    std::vector<Field> zeta(nc, Field(n, 0.0));
    for (size_t k = 0; k < n; ++k)
        for (int j = 0; j < nc; ++j) {
            double a = 0.0;
            for (int i = 0; i < nc; ++i) a += m.N[i][k] * (G(i, j)[k] - G(j, i)[k]);
            zeta[j][k] = a;
        }
    std::vector<Field> w2(nc, Field(n, 0.0));
    for (int d0 = 0; d0 < dh; ++d0) w2[d0] = dom.spec.deriv(m.dphi_t, d0);
    for (int i = 0; i < nc; ++i) {
        Field acc(n, 0.0);
        for (int c = 0; c < nc; ++c) {
            Field dN = (i == dh) ? dphi_z(m.N[c], m, dom) : dphi_h(m.N[c], m, i, dom);
            for (size_t k = 0; k < n; ++k) acc[k] += dN[k] * s.v[c][k];
        }
        for (size_t k = 0; k < n; ++k) w2[i][k] -= acc[k];
    }
    std::vector<Field> w2p = project_tangential(m, w2);
    for (int ih = 0; ih < dom.nh(); ++ih) {
        const size_t k = static_cast<size_t>(ih) * nzv + nzv - 1;
        double a2 = 0.0;
        for (int j = 0; j < nc; ++j) {
            const double zj = zeta[j][k] + 2.0 * w2p[j][k];
            a2 += zj * zj;
        }
        out.zeta_trace_sup = std::max(out.zeta_trace_sup, std::sqrt(a2));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Layer probe

struct LayerProbe {
    double eps_dzz_v = 0.0;     // eps ||d_z^2 v||_inf
    double delta_p_norm = 0.0;  // ||Delta^phi p||_{H^1_co}
    double layer_width = 0.0;   // depth where |d_z v_y| decays to 10% of surface value
    double sn_trace_sup = 0.0;
    StructuralResiduals identity_residuals;
};

inline LayerProbe layer_probe(const FlowState& s, const PhysParams& par, const Domain& dom) {
    const int dh = dom.grid.dim_h();
    const int nc = dh + 1;
    const int nzv = dom.nz();
    LayerProbe out;
    out.identity_residuals = structural_residuals(s, dom);
    out.sn_trace_sup = out.identity_residuals.sn_trace_sup;

    double m2 = 0.0;
    for (int j = 0; j < nc; ++j) m2 = std::max(m2, sup_norm(dom.dzz(s.v[j])));
    out.eps_dzz_v = par.eps * m2;

    Field p = pressure(s.rho, par.gamma);
    out.delta_p_norm = std::sqrt(
        conormal_norm_sq(TimeStack(laplace_phi(p, s.metric, dom)), 1, s.metric, true, dom));

    // Level-wise max of the horizontal shear |d_z v_y|, scanned downward from
    // the surface until it falls below 10% of its surface value.
    std::vector<double> g(nzv, 0.0);
    for (int d0 = 0; d0 < dh; ++d0) {
        Field dzv = dom.dz(s.v[d0]);
        for (int ih = 0; ih < dom.nh(); ++ih)
            for (int iz = 0; iz < nzv; ++iz)
                g[iz] = std::max(g[iz], std::abs(dzv[static_cast<size_t>(ih) * nzv + iz]));
    }
    const double s0 = g[nzv - 1];
    out.layer_width = dom.grid.cfg.z_max;  // rest state, or no decay within the box
    if (s0 > 0.0) {
        const double cut = 0.1 * s0;
        for (int iz = nzv - 2; iz >= 0; --iz)
            if (g[iz] <= cut) {
                const double z1 = dom.grid.z[iz + 1], z0 = dom.grid.z[iz];
                const double f1 = g[iz + 1], f0 = g[iz];
                const double zc = (f1 == f0) ? z0 : z1 + (z0 - z1) * (f1 - cut) / (f1 - f0);
                out.layer_width = -zc;
                break;
            }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Conormal energy functional

struct ThetaAddends {
    double pv_hm = 0.0;            // ||(p, v)||_{H^m}^2
    double grad_pv_hm2 = 0.0;      // ||grad(p, v)||_{H^{m-2}}^2
    double lap_p_h1 = 0.0;         // ||Delta^phi p||_{H^1}^2
    double surf_h_hm = 0.0;        // |(h, sqrt(sigma) grad_y h)|_{H^m}^2
    double grad_pv_h1inf = 0.0;    // ||grad(p, v)||_{H^{1,inf}}^2
    double eps_grad_pv_hm1 = 0.0;  // eps ||grad(p, v)||_{H^{m-1}}^2
    double eps_lap_p_h2 = 0.0;     // eps ||Delta^phi p||_{H^2}^2
    double eps_d2v_inf = 0.0;      // eps ||grad^2 v||_{L^inf}^2
    double eps_h_half = 0.0;       // eps |Z^{<=m} h|_{1/2}^2
    double x_sq = 0.0;             // sum: the instantaneous X_m norm squared
};

struct GoodUnknownNorm {
    MultiIndex alpha;
    double v_norm = 0.0, q_norm = 0.0;
};

struct ConormalReport {
    double theta = 1.0;        // sup(1 + X_m^2) + the three time integrals
    double sup_term = 1.0;
    double int_pressure = 0.0; // int ||grad p||_{m-1}^2 + ||Delta p||_2^2 + ||grad v||_{m-1}^4
    double int_visc = 0.0;     // eps int ||grad v||_m^2 + ||grad^2 v||_{m-2}^2
    double int_visc2 = 0.0;    // eps^2 int ||grad^2 v||_{m-1}^2
    ThetaAddends last;
    std::vector<GoodUnknownNorm> good_unknowns;  // weighted L2 norms at the last snapshot
    double taylor_min = 0.0;
    bool taylor_degenerate = false;
    bool healthy = true;       // density band and chart diffeomorphism at every snapshot
};

namespace detail {

inline bool zero_state(const FlowState& s) {
    if (sup_norm(s.rho) != 0.0 || sup_norm(s.h.values) != 0.0) return false;
    for (const auto& c : s.v)
        if (sup_norm(c) != 0.0) return false;
    return true;
}

struct ThetaSample {
    ThetaAddends a;
    double i1 = 0.0, i2 = 0.0, i3 = 0.0;
};

inline ThetaSample theta_sample(const FlowState& s, const Tendencies& td, int m,
                                const PhysParams& par, const Domain& dom) {
    ThetaSample out;
    const auto& mtr = s.metric;
    const int dh = dom.grid.dim_h();
    const int nc = dh + 1;
    auto& a = out.a;

    Field p = pressure(s.rho, par.gamma);
    Field dpdt(p.size());
    for (size_t k = 0; k < p.size(); ++k)
        dpdt[k] = par.gamma * std::pow(s.rho[k], par.gamma - 1.0) * td.drho[k];

    a.pv_hm = conormal_norm_sq(TimeStack(p, dpdt), m, mtr, true, dom, 1);
    for (int j = 0; j < nc; ++j)
        a.pv_hm += conormal_norm_sq(TimeStack(s.v[j], td.dv[j]), m, mtr, true, dom, 1);

    // Derived fields carry spatial conormal indices only (recorded decision:
    // their time derivatives would need second derivatives of the data).
    auto co2 = [&](const Field& f, int order) {
        return (order < 0) ? 0.0 : conormal_norm_sq(TimeStack(f), order, mtr, true, dom);
    };

    std::vector<Field> gp = grad_phi(p, mtr, dom);
    std::vector<Field> gv, hv;
    for (int j = 0; j < nc; ++j) {
        auto g = grad_phi(s.v[j], mtr, dom);
        for (auto& c : g) gv.push_back(std::move(c));
    }
    for (const auto& c : gv) {
        auto g = grad_phi(c, mtr, dom);
        for (auto& f : g) hv.push_back(std::move(f));
    }

    double gp_m1 = 0.0, gv_m1 = 0.0, gv_m = 0.0, hv_m2 = 0.0, hv_m1 = 0.0;
    for (const auto& f : gp) {
        gp_m1 += co2(f, m - 1);
        a.grad_pv_hm2 += co2(f, m - 2);
    }
    for (const auto& f : gv) {
        gv_m1 += co2(f, m - 1);
        gv_m += co2(f, m);
        a.grad_pv_hm2 += co2(f, m - 2);
    }
    for (const auto& f : hv) {
        hv_m2 += co2(f, m - 2);
        hv_m1 += co2(f, m - 1);
    }

    Field lap = laplace_phi(p, mtr, dom);
    a.lap_p_h1 = co2(lap, 1);
    const double lap_h2 = co2(lap, 2);
    a.eps_lap_p_h2 = par.eps * lap_h2;
    a.eps_grad_pv_hm1 = par.eps * (gp_m1 + gv_m1);

    double sup1 = 0.0;
    for (const auto& f : gp) sup1 = std::max(sup1, conormal_sup(TimeStack(f), 1, dom));
    for (const auto& f : gv) sup1 = std::max(sup1, conormal_sup(TimeStack(f), 1, dom));
    a.grad_pv_h1inf = sup1 * sup1;

    double sup2 = 0.0;
    for (const auto& f : hv) sup2 = std::max(sup2, sup_norm(f));
    a.eps_d2v_inf = par.eps * sup2 * sup2;

    TimeStack hs(s.h.values, s.dh_dt);
    a.surf_h_hm = surface_conormal_norm_sq(hs, m, dom, 1);
    for (int d0 = 0; d0 < dh; ++d0) {
        TimeStack gh(dom.spec.deriv_level(s.h.values, d0), dom.spec.deriv_level(s.dh_dt, d0));
        a.surf_h_hm += par.sigma * surface_conormal_norm_sq(gh, m, dom, 1);
    }
    double hhalf = 0.0;
    for (const auto& al : conormal_indices(m, 1, dh))
        if (al.a3 == 0)
            hhalf += surface_sobolev_sq(surface_conormal_apply(hs, al, dom), 0.5, dom);
    a.eps_h_half = par.eps * hhalf;

    a.x_sq = a.pv_hm + a.grad_pv_hm2 + a.lap_p_h1 + a.surf_h_hm + a.grad_pv_h1inf +
             a.eps_grad_pv_hm1 + a.eps_lap_p_h2 + a.eps_d2v_inf + a.eps_h_half;

    out.i1 = gp_m1 + lap_h2 + gv_m1 * gv_m1;
    out.i2 = par.eps * (gv_m + hv_m2);
    out.i3 = par.eps * par.eps * hv_m1;
    return out;
}

}  // namespace detail

/// Accumulates the conormal energy functional Theta_m over a run:
///   Theta_m(T) = sup_t (1 + X_m(t)^2) + the three parabolic time integrals,
/// sampled at the pushed snapshots (trapezoid in time). Time derivatives come
/// from the semi-discrete right-hand side, never from snapshot differencing.
class ThetaAccumulator {
  public:
    ThetaAccumulator(int m, int m_cap, PhysParams par) : m_(m), par_(std::move(par)) {
        if (m < 1) throw ContractError("theta: m >= 1 required");
        if (m > m_cap)
            throw ContractError("theta: m = " + std::to_string(m) +
                                " exceeds the configured cap m_cap = " + std::to_string(m_cap));
    }

    void push(const FlowState& s, const Domain& dom) {
        if (detail::zero_state(s)) {
            Tendencies td;
            td.drho = dom.zeros_volume();
            td.dv.assign(dom.grid.dim_h() + 1, dom.zeros_volume());
            td.dh = dom.zeros_surface();
            push(s, td, dom);
        } else {
            push(s, rhs(s, par_, dom), dom);
        }
    }

    void push(const FlowState& s, const Tendencies& td, const Domain& dom) {
        const bool zero = detail::zero_state(s);
        detail::ThetaSample smp =
            zero ? detail::ThetaSample{} : detail::theta_sample(s, td, m_, par_, dom);
        rep_.sup_term = std::max(rep_.sup_term, 1.0 + smp.a.x_sq);
        if (has_prev_) {
            const double w = 0.5 * (s.t - prev_t_);
            rep_.int_pressure += w * (prev_.i1 + smp.i1);
            rep_.int_visc += w * (prev_.i2 + smp.i2);
            rep_.int_visc2 += w * (prev_.i3 + smp.i3);
        }
        prev_ = smp;
        prev_t_ = s.t;
        has_prev_ = true;
        rep_.last = smp.a;

        rep_.good_unknowns.clear();
        if (!zero) {
            for (const auto& al : conormal_indices(m_, 1, dom.grid.dim_h())) {
                if (al.order() < 1) continue;
                GoodUnknowns gu = good_unknowns(s, td, al, par_, dom);
                GoodUnknownNorm gn;
                gn.alpha = al;
                double vsq = 0.0;
                for (const auto& c : gu.V) vsq += dom.l2sq_weighted(c, s.metric.J);
                gn.v_norm = std::sqrt(vsq);
                gn.q_norm = std::sqrt(dom.l2sq_weighted(gu.Q, s.metric.J));
                rep_.good_unknowns.push_back(gn);
            }
            auto ts = taylor_sign(s, par_, dom);
            rep_.taylor_min = ts.min_value;
            rep_.taylor_degenerate = ts.degenerate;
        } else {
            rep_.taylor_min = 0.0;
            rep_.taylor_degenerate = true;
        }

        bool ok = true;
        for (double r : s.rho)
            if (!(r >= par_.rho_min() && r <= par_.rho_max())) {
                ok = false;
                break;
            }
        ok = ok && check_diffeomorphism(s.metric, par_.c0_health, dom).pass;
        rep_.healthy = rep_.healthy && ok;

        rep_.theta = rep_.sup_term + rep_.int_pressure + rep_.int_visc + rep_.int_visc2;
    }

    const ConormalReport& report() const {
        if (!has_prev_) throw ContractError("theta: no snapshots pushed");
        return rep_;
    }
    int order() const { return m_; }

  private:
    int m_;
    PhysParams par_;
    ConormalReport rep_;
    detail::ThetaSample prev_;
    double prev_t_ = 0.0;
    bool has_prev_ = false;
};

/// One-shot evaluation on a single snapshot (no time integrals accrue).
inline ConormalReport theta_m(const FlowState& s, int m, int m_cap, const PhysParams& par,
                              const Domain& dom) {
    ThetaAccumulator acc(m, m_cap, par);
    acc.push(s, dom);
    return acc.report();
}

}  // namespace fsns
