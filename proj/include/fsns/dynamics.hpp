#pragma once

#include <functional>

#include "fsns/banded.hpp"
#include "fsns/operators.hpp"
#include "fsns/params.hpp"

namespace fsns {

inline Field pressure(const Field& rho, double gamma) {
    Field p(rho.size());
    for (size_t k = 0; k < rho.size(); ++k) {
        if (!(rho[k] > 0.0)) throw HealthError("nonpositive density");
        p[k] = std::pow(rho[k], gamma);
    }
    return p;
}

inline Field sound_speed(const Field& rho, double gamma) {
    Field c(rho.size());
    for (size_t k = 0; k < rho.size(); ++k) {
        if (!(rho[k] > 0.0)) throw HealthError("nonpositive density");
        c[k] = std::sqrt(gamma * std::pow(rho[k], gamma - 1.0));
    }
    return c;
}

/// Prognostic state. The metric is derived data, rebuilt from (h, v traces)
/// whenever either changes; dh_dt is the kinematic tendency used for d_t eta.
struct FlowState {
    Field rho;
    std::vector<Field> v;  // dim_h + 1 components
    SurfaceHeight h;
    double t = 0.0;
    double A = 1.0;  // chart slope, fixed at initialization
    Field dh_dt;
    ChartMetric metric;
};

/// Kinematic tendency dh/dt = -v_y|_0 . grad_y h + v3|_0, dealiased.
inline Field kinematic_dh_dt(const std::vector<Field>& v, const SurfaceHeight& h, const Domain& dom) {
    const int dh = dom.grid.dim_h();
    Field out = dom.trace_top(v[dh]);
    for (int d = 0; d < dh; ++d) {
        Field gd = dom.spec.deriv_level(h.values, d);
        Field vt = dom.trace_top(v[d]);
        for (int k = 0; k < dom.nh(); ++k) out[k] -= vt[k] * gd[k];
    }
    dom.spec.dealias_level(out);
    return out;
}

inline void rebuild_metric(FlowState& s, const Domain& dom) {
    s.dh_dt = kinematic_dh_dt(s.v, s.h, dom);
    s.metric = assemble_chart(s.h, make_surface_height(dom, s.dh_dt), s.A, dom);
}

/// ALE vertical transport speed V_z = (v . N - d_t eta) / J; vanishes at the
/// surface when the kinematic BC holds.
inline Field ale_speed(const FlowState& s, const Domain& dom) {
    const int nc = s.metric.n_comp();
    Field out(dom.volume_size());
    for (size_t k = 0; k < out.size(); ++k) {
        double vn = 0.0;
        for (int i = 0; i < nc; ++i) vn += s.v[i][k] * s.metric.N[i][k];
        out[k] = (vn - s.metric.dphi_t[k]) / s.metric.J[k];
    }
    return out;
}

struct Tendencies {
    Field drho;
    std::vector<Field> dv;
    Field dh;
};

namespace detail {

/// Transport operator v_y . grad_y f + V_z d_z f.
inline Field transport(const Field& f, const std::vector<Field>& v, const Field& vz,
                       const Domain& dom) {
    const int dh = dom.grid.dim_h();
    Field fz = dom.dz(f);
    Field out(f.size());
    for (size_t k = 0; k < f.size(); ++k) out[k] = vz[k] * fz[k];
    for (int d = 0; d < dh; ++d) {
        Field fd = dom.spec.deriv(f, d);
        for (size_t k = 0; k < f.size(); ++k) out[k] += v[d][k] * fd[k];
    }
    return out;
}

/// Coefficient of d_zz in the viscous operator acting on component j;
/// the stiff block treated implicitly.
inline Field implicit_coeff(const FlowState& s, const PhysParams& par, int j, const Domain& dom) {
    const int dh = dom.grid.dim_h();
    Field c(dom.volume_size());
    for (size_t k = 0; k < c.size(); ++k) {
        double g2 = 1.0;
        for (int d = 0; d < dh; ++d) g2 += s.metric.dphi_h[d][k] * s.metric.dphi_h[d][k];
        const double extra =
            (j == dh) ? 1.0 : s.metric.dphi_h[j][k] * s.metric.dphi_h[j][k];
        c[k] = par.eps * (par.mu * g2 + (par.mu + par.lambda) * extra) /
               (s.rho[k] * s.metric.J[k] * s.metric.J[k]);
    }
    return c;
}

/// L v = c(y,z) d_zz v with the low-order (3-point) stencil; the operator the
/// implicit half-steps integrate and the explicit stage subtracts.
inline Field implicit_operator(const Field& coeff, const Field& v, const Domain& dom) {
    Field d2 = dom.dz_with(dom.grid.d2_low, v);
    for (size_t k = 0; k < d2.size(); ++k) d2[k] *= coeff[k];
    return d2;
}

/// Weak high-order vertical dissipation. The one-sided boundary rows of the
/// 4th-order d_z stencil support a slowly growing boundary mode for the
/// undamped hyperbolic system; this term damps grid-scale vertical content
/// at rate ~ chi c / dz while perturbing smooth fields at O(dz^3). The
/// velocity needs it only on the inviscid path, but the continuity equation
/// carries no physical dissipation at any eps, so rho gets it always:
/// without it grid-scale density content accumulates as eps shrinks and
/// pollutes the pressure-Laplacian diagnostics.
inline void add_z_dissipation(Field& td, const Field& f, const Field& c, double chi,
                              const Domain& dom) {
    const int nz = dom.nz();
    // S^t S with S the narrow third difference in index space: negative
    // semi-definite damping (interior rows are the classical 6th difference),
    // so the term cannot feed boundary modes. A second-difference S leaves
    // O(dz) truncation on the rows adjacent to the boundary (the f'' parts of
    // neighboring S rows stop cancelling there), which caps the inviscid
    // solution error at O(dz^2); the third difference keeps the edge rows at
    // O(dz^2) local and the interior at O(dz^5).
    const int nr = nz - 3;  // number of S rows
    std::vector<double> s3(nr);
    static constexpr double w3[4] = {1.0, -3.0, 3.0, -1.0};
    for (int ih = 0; ih < dom.nh(); ++ih) {
        const size_t base = static_cast<size_t>(ih) * nz;
        for (int r = 0; r < nr; ++r)
            s3[r] = f[base + r] - 3.0 * f[base + r + 1] + 3.0 * f[base + r + 2] - f[base + r + 3];
        for (int j = 0; j < nz; ++j) {
            double acc = 0.0;
            for (int q = 0; q < 4; ++q) {
                const int r = j - q;
                if (r >= 0 && r < nr) acc += w3[q] * s3[r];
            }
            const double dz_loc = (j == 0) ? dom.grid.z[1] - dom.grid.z[0]
                                           : dom.grid.z[j] - dom.grid.z[j - 1];
            td[base + j] -= chi * c[base + j] * acc / dz_loc;
        }
    }
}

}  // namespace detail

/// Semi-discrete tendencies of system (transport form):
///   d rho/dt = -(v_y . grad_y + V_z d_z) rho - rho div^phi v
///   d v/dt   = -(v_y . grad_y + V_z d_z) v - (1/rho) grad^phi p
///              + (eps/rho) (2 mu div^phi S^phi v + lambda grad^phi div^phi v)
///   d h/dt   = kinematic BC trace.
inline Tendencies rhs(const FlowState& s, const PhysParams& par, const Domain& dom) {
    const int dh = dom.grid.dim_h();
    const int nc = dh + 1;
    Tendencies out;
    Field vz = ale_speed(s, dom);

    Field p = pressure(s.rho, par.gamma);
    auto gp = grad_phi(p, s.metric, dom);
    Field divv = div_phi(s.v, s.metric, dom);

    out.drho = detail::transport(s.rho, s.v, vz, dom);
    for (size_t k = 0; k < out.drho.size(); ++k)
        out.drho[k] = -out.drho[k] - s.rho[k] * divv[k];

    std::vector<Field> visc;
    if (par.viscous()) {
        auto S = sym_grad_phi(s.v, s.metric, dom);
        visc.assign(nc, dom.zeros_volume());
        for (int j = 0; j < nc; ++j) {
            // (div^phi 2 mu S)_j = sum_i d_i^phi (2 mu S_ij)
            for (int i = 0; i < nc; ++i) {
                Field term = (i == dh) ? dphi_z(S(i, j), s.metric, dom)
                                       : dphi_h(S(i, j), s.metric, i, dom);
                for (size_t k = 0; k < term.size(); ++k) visc[j][k] += 2.0 * par.mu * term[k];
            }
        }
        auto gd = grad_phi(divv, s.metric, dom);
        for (int j = 0; j < nc; ++j)
            for (size_t k = 0; k < visc[j].size(); ++k) visc[j][k] += par.lambda * gd[j][k];
    }

    out.dv.resize(nc);
    for (int j = 0; j < nc; ++j) {
        Field adv = detail::transport(s.v[j], s.v, vz, dom);
        out.dv[j].resize(adv.size());
        for (size_t k = 0; k < adv.size(); ++k) {
            double a = -adv[k] - gp[j][k] / s.rho[k];
            if (par.viscous()) a += par.eps / s.rho[k] * visc[j][k];
            out.dv[j][k] = a;
        }
        dom.spec.dealias(out.dv[j]);
    }
    dom.spec.dealias(out.drho);
    {
        Field c = sound_speed(s.rho, par.gamma);
        detail::add_z_dissipation(out.drho, s.rho, c, 0.02, dom);
        if (!par.viscous())
            for (int j = 0; j < nc; ++j)
                detail::add_z_dissipation(out.dv[j], s.v[j], c, 0.02, dom);
    }
    out.dh = kinematic_dh_dt(s.v, s.h, dom);

    require_finite(out.drho, "drho/dt");
    for (int j = 0; j < nc; ++j) require_finite(out.dv[j], "dv/dt");
    require_finite(out.dh, "dh/dt");
    return out;
}

/// Dynamic boundary closure.
/// Viscous mode: solves per surface node the (d_h+1)x(d_h+1) SPD system
///   (mu eps/J)(|N|^2 I + N x N) q + (lambda eps/J)(N x N) q = r
/// for q = d_z v(0), where r is the stress target minus the contribution of
/// horizontal derivatives, then back-substitutes the surface row value
/// through the one-sided first-derivative stencil. The horizontal-derivative
/// part depends on the surface values themselves, so the solve is iterated
/// to a fixed point.
/// Euler mode: Dirichlet rho = (p_e - sigma H)^{1/gamma} at z = 0.
/// Bottom: v3 = 0; additionally d_z v_y = 0 when viscous.
inline void apply_dynamic_bc(FlowState& s, const PhysParams& par, const Domain& dom) {
    const int dh = dom.grid.dim_h();
    const int nc = dh + 1;
    const int nz = dom.nz();
    const int nh = dom.nh();

    // Bottom rows.
    if (par.bottom_bc == BottomBC::NoPenetrationSlip) {
        const auto& st = dom.grid.d1;  // row 0 window starts at node 0
        for (int ih = 0; ih < nh; ++ih) {
            const size_t base = static_cast<size_t>(ih) * nz;
            s.v[dh][base] = 0.0;
            if (par.viscous()) {
                for (int d = 0; d < dh; ++d) {
                    double acc = 0.0;
                    for (int k = 1; k < st.width; ++k) acc += st.w[k] * s.v[d][base + k];
                    s.v[d][base] = -acc / st.w[0];
                }
            }
        }
    }

    Field H = mean_curvature(s.h, dom);

    if (!par.viscous()) {
        // Euler closure: pressure Dirichlet on the density trace.
        for (int ih = 0; ih < nh; ++ih) {
            const double pb = par.p_e - par.sigma * H[ih];
            if (!(pb > 0.0))
                throw HealthError("Euler surface closure: p_e - sigma H <= 0 at a surface node");
            s.rho[static_cast<size_t>(ih) * nz + nz - 1] = std::pow(pb, 1.0 / par.gamma);
        }
        return;
    }

    // Surface stress target (p - p_e + sigma H) N, with p from the surface
    // density trace (rho carries no surface BC in viscous mode).
    const auto& st = dom.grid.d1;
    const int w = st.width;
    const int first = st.first[nz - 1];
    const double* wrow = &st.w[static_cast<size_t>(nz - 1) * w];
    const double w_surf = wrow[w - 1];

    std::vector<Field> vtr(nc);
    for (int j = 0; j < nc; ++j) vtr[j] = dom.trace_top(s.v[j]);
    Field ptr = dom.trace_top(s.rho);
    for (int ih = 0; ih < nh; ++ih) ptr[ih] = std::pow(ptr[ih], par.gamma);

    std::vector<double> Ns(nc), q(nc), rp(nc);
    for (int iter = 0; iter < 12; ++iter) {
        // Horizontal derivatives of the current surface rows.
        std::vector<std::vector<Field>> K(dh, std::vector<Field>(nc));
        for (int i = 0; i < dh; ++i)
            for (int j = 0; j < nc; ++j) K[i][j] = dom.spec.deriv_level(vtr[j], i);

        double change = 0.0;
        for (int ih = 0; ih < nh; ++ih) {
            const size_t base = static_cast<size_t>(ih) * nz;
            const size_t top = base + nz - 1;
            double n2 = 0.0;
            for (int i = 0; i < nc; ++i) {
                Ns[i] = s.metric.N[i][top];
                n2 += Ns[i] * Ns[i];
            }
            const double jj = s.metric.J[top];
            const double target = ptr[ih] - par.p_e + par.sigma * H[ih];

            // Known part: 2 mu eps (S_known N)_j + lambda eps tr(K) N_j with
            // K the purely horizontal gradient (row i = vertical is zero).
            double trK = 0.0;
            for (int i = 0; i < dh; ++i) trK += K[i][i][ih];
            for (int j = 0; j < nc; ++j) {
                // Symmetrized known part: sum_i N_i (K_ij + K_ji) with K the
                // horizontal trace gradient (vertical row zero, all columns).
                double sym = 0.0;
                for (int i = 0; i < dh; ++i) sym += Ns[i] * K[i][j][ih];
                if (j < dh)
                    for (int i = 0; i < nc; ++i) sym += Ns[i] * K[j][i][ih];
                rp[j] = target * Ns[j] - par.mu * par.eps * sym - par.lambda * par.eps * trK * Ns[j];
            }

            const double a = par.mu * par.eps * n2 / jj;
            const double b = (par.mu + par.lambda) * par.eps / jj;
            double nr = 0.0;
            for (int j = 0; j < nc; ++j) nr += Ns[j] * rp[j];
            const double corr = b * nr / (a * (a + b * n2));
            for (int j = 0; j < nc; ++j) q[j] = rp[j] / a - corr * Ns[j];

            // Surface row value from the one-sided stencil: q_j = sum w_k v_k.
            for (int j = 0; j < nc; ++j) {
                double acc = 0.0;
                for (int k = 0; k + 1 < w; ++k) acc += wrow[k] * s.v[j][base + first + k];
                const double nv = (q[j] - acc) / w_surf;
                change = std::max(change, std::abs(nv - vtr[j][ih]));
                vtr[j][ih] = nv;
            }
        }
        for (int j = 0; j < nc; ++j)
            for (int ih = 0; ih < nh; ++ih) s.v[j][static_cast<size_t>(ih) * nz + nz - 1] = vtr[j][ih];
        if (change < 1e-12) break;
    }
}

/// CFL time step: horizontal acoustic/advective limit plus the vertical
/// ALE/acoustic limit in chart coordinates. The implicit half-steps absorb
/// only the low-order d_zz block, and the surface row of the solve is frozen
/// while the dynamic closure repositions it afterwards, so the explicitly
/// treated viscous pieces still demand dt ~ dz^2 rho J^2 / eps on fine
/// vertical grids; the constant below is calibrated against stretched-grid
/// shear-layer runs (stable at 0.08 dz^2/c, unstable at 0.16; 0.05 leaves a
/// safety margin and is applied independently of the cfl factor). A
/// capillary cap applies when sigma > 0.
inline double cfl_dt(const FlowState& s, const PhysParams& par, const StepperConfig& sc,
                     const Domain& dom) {
    const int dh = dom.grid.dim_h();
    const int nz = dom.nz();
    Field c = sound_speed(s.rho, par.gamma);
    Field vz = ale_speed(s, dom);
    const double dy = dom.grid.dy();
    double dt = sc.dt_max / sc.cfl;  // so cfl * dt <= dt_max below
    double rho_min = s.rho[0];
    for (int ih = 0; ih < dom.nh(); ++ih)
        for (int j = 0; j < nz; ++j) {
            const size_t k = static_cast<size_t>(ih) * nz + j;
            rho_min = std::min(rho_min, s.rho[k]);
            double vy = 0.0;
            for (int d = 0; d < dh; ++d) vy += std::abs(s.v[d][k]);
            dt = std::min(dt, dy / (vy + c[k]));
            const double dz_loc =
                (j == 0) ? dom.grid.z[1] - dom.grid.z[0]
                         : (j == nz - 1 ? dom.grid.z[nz - 1] - dom.grid.z[nz - 2]
                                        : std::min(dom.grid.z[j] - dom.grid.z[j - 1],
                                                   dom.grid.z[j + 1] - dom.grid.z[j]));
            const double speed_z =
                std::abs(vz[k]) + c[k] * s.metric.N_mag[k] / s.metric.J[k];
            dt = std::min(dt, dz_loc / speed_z);
            if (par.viscous()) {
                double g2 = 1.0;
                for (int d = 0; d < dh; ++d)
                    g2 += s.metric.dphi_h[d][k] * s.metric.dphi_h[d][k];
                const double cz = par.eps * (par.mu * g2 + par.mu + par.lambda) /
                                  (s.rho[k] * s.metric.J[k] * s.metric.J[k]);
                dt = std::min(dt, 0.05 * dz_loc * dz_loc / (cz * sc.cfl));
            }
        }
    dt *= sc.cfl;
    if (par.sigma > 0.0)
        dt = std::min(dt, 0.5 * std::pow(dy, 1.5) / std::sqrt(par.sigma / rho_min));
    return std::min(dt, sc.dt_max);
}

inline void health_check(const FlowState& s, const PhysParams& par, const Domain& dom) {
    require_finite(s.rho, "rho");
    for (const auto& c : s.v) require_finite(c, "v");
    require_finite(s.h.values, "h");
    for (double r : s.rho)
        if (r < par.rho_min() || r > par.rho_max())
            throw HealthError("density left the health band [1/(4C0), 4C0]");
    auto dc = check_diffeomorphism(s.metric, par.c0_health, dom);
    if (!dc.pass)
        throw HealthError("chart degeneracy: min J = " + std::to_string(dc.min_J) +
                          " < c0 at (ih=" + std::to_string(dc.at_ih) +
                          ", iz=" + std::to_string(dc.at_iz) + ")");
}

/// Optional boundary pinning hook (anchored-Dirichlet / MMS mode); called
/// after each stage with the stage time.
using BoundaryPin = std::function<void(FlowState&, double)>;

namespace detail {

/// Crank-Nicolson half-step of the implicit vertical block over tau. The
/// Dirichlet rows are frozen at their current values for the solve; with
/// moving boundary data this leaves an O(dt^2) defect whose constant grows
/// with N_z, so order studies against manufactured solutions subordinate the
/// time step (dt ~ dz^2) on the viscous path.
inline void implicit_half_step(FlowState& s, const PhysParams& par, double tau, const Domain& dom) {
    const int dh = dom.grid.dim_h();
    const int nc = dh + 1;
    const int nz = dom.nz();
    const auto& d2 = dom.grid.d2_low;
    const auto& d1 = dom.grid.d1_low;
    for (int j = 0; j < nc; ++j) {
        Field coeff = implicit_coeff(s, par, j, dom);
        Field lv = implicit_operator(coeff, s.v[j], dom);
        for (int ih = 0; ih < dom.nh(); ++ih) {
            const size_t base = static_cast<size_t>(ih) * nz;
            BandedMatrix A(nz, 2, 2);
            std::vector<double> b(nz);
            for (int r = 0; r < nz; ++r) {
                const size_t k = base + r;
                const bool bottom = (r == 0), top = (r == nz - 1);
                if (top) {
                    // Surface value held; the dynamic closure repositions it.
                    A.at(r, r) = 1.0;
                    b[r] = s.v[j][k];
                } else if (bottom && par.bottom_bc == BottomBC::NoPenetrationSlip && j == dh) {
                    A.at(r, r) = 1.0;
                    b[r] = 0.0;
                } else if (bottom && par.bottom_bc == BottomBC::NoPenetrationSlip) {
                    // Free-slip: one-sided d_z v = 0.
                    for (int q = 0; q < d1.width; ++q) A.at(r, d1.first[r] + q) = d1.w[q];
                    b[r] = 0.0;
                } else if (bottom || top) {
                    A.at(r, r) = 1.0;
                    b[r] = s.v[j][k];
                } else {
                    const double cc = 0.5 * tau * coeff[k];
                    A.at(r, r) = 1.0;
                    const int f = d2.first[r];
                    const double* wr = &d2.w[static_cast<size_t>(r) * d2.width];
                    for (int q = 0; q < d2.width; ++q) A.at(r, f + q) -= cc * wr[q];
                    b[r] = s.v[j][k] + 0.5 * tau * lv[k];
                }
            }
            A.solve(b);
            for (int r = 0; r < nz; ++r) s.v[j][base + r] = b[r];
        }
    }
}

inline void close_stage(FlowState& s, const PhysParams& par, const Domain& dom,
                        const BoundaryPin& pin) {
    dom.spec.dealias_level(s.h.values);
    s.h = make_surface_height(dom, std::move(s.h.values));
    if (pin) pin(s, s.t);
    rebuild_metric(s, dom);
    if (!pin) apply_dynamic_bc(s, par, dom);
    rebuild_metric(s, dom);
}

}  // namespace detail

/// One IMEX step: CN half-step on the vertical viscous block, SSP-RK3 on the
/// remaining tendencies (full RHS minus the implicit operator), CN half-step.
inline void advance(FlowState& s, const PhysParams& par, const StepperConfig& sc, double dt,
                    const Domain& dom, const BoundaryPin& pin = {},
                    const std::function<Tendencies(const FlowState&)>& rhs_fn = {}) {
    const int dh = dom.grid.dim_h();
    const int nc = dh + 1;

    auto eval_rhs = [&](const FlowState& st) {
        Tendencies td = rhs_fn ? rhs_fn(st) : rhs(st, par, dom);
        if (par.viscous()) {
            for (int j = 0; j < nc; ++j) {
                Field coeff = detail::implicit_coeff(st, par, j, dom);
                Field lv = detail::implicit_operator(coeff, st.v[j], dom);
                for (size_t k = 0; k < lv.size(); ++k) td.dv[j][k] -= lv[k];
            }
        }
        return td;
    };

    auto apply = [&](const FlowState& from, const Tendencies& td, double fac, FlowState& to) {
        for (size_t k = 0; k < from.rho.size(); ++k) to.rho[k] = from.rho[k] + fac * td.drho[k];
        for (int j = 0; j < nc; ++j)
            for (size_t k = 0; k < from.v[j].size(); ++k)
                to.v[j][k] = from.v[j][k] + fac * td.dv[j][k];
        for (int k = 0; k < dom.nh(); ++k) to.h.values[k] = from.h.values[k] + fac * td.dh[k];
        to.t = from.t + fac;
    };

    if (par.viscous()) {
        detail::implicit_half_step(s, par, 0.5 * dt, dom);
        detail::close_stage(s, par, dom, pin);
    }

    FlowState u0 = s;
    FlowState u1 = s, u2 = s;

    Tendencies t0 = eval_rhs(u0);
    apply(u0, t0, dt, u1);
    detail::close_stage(u1, par, dom, pin);

    Tendencies t1 = eval_rhs(u1);
    apply(u1, t1, dt, u2);
    // u2 <- 3/4 u0 + 1/4 u2
    for (size_t k = 0; k < u2.rho.size(); ++k) u2.rho[k] = 0.75 * u0.rho[k] + 0.25 * u2.rho[k];
    for (int j = 0; j < nc; ++j)
        for (size_t k = 0; k < u2.v[j].size(); ++k)
            u2.v[j][k] = 0.75 * u0.v[j][k] + 0.25 * u2.v[j][k];
    for (int k = 0; k < dom.nh(); ++k)
        u2.h.values[k] = 0.75 * u0.h.values[k] + 0.25 * u2.h.values[k];
    u2.t = u0.t + 0.5 * dt;
    detail::close_stage(u2, par, dom, pin);

    Tendencies t2 = eval_rhs(u2);
    apply(u2, t2, dt, s);
    for (size_t k = 0; k < s.rho.size(); ++k) s.rho[k] = (u0.rho[k] + 2.0 * s.rho[k]) / 3.0;
    for (int j = 0; j < nc; ++j)
        for (size_t k = 0; k < s.v[j].size(); ++k) s.v[j][k] = (u0.v[j][k] + 2.0 * s.v[j][k]) / 3.0;
    for (int k = 0; k < dom.nh(); ++k) s.h.values[k] = (u0.h.values[k] + 2.0 * s.h.values[k]) / 3.0;
    s.t = u0.t + dt;
    detail::close_stage(s, par, dom, pin);

    if (par.viscous()) {
        detail::implicit_half_step(s, par, 0.5 * dt, dom);
        detail::close_stage(s, par, dom, pin);
    }

    health_check(s, par, dom);
}

/// Fresh state from fields; asserts shapes and assembles the metric.
inline FlowState make_state(Field rho, std::vector<Field> v, Field h_values, double A,
                            const Domain& dom) {
    FlowState s;
    s.rho = std::move(rho);
    s.v = std::move(v);
    s.h = make_surface_height(dom, std::move(h_values));
    s.A = A;
    if (s.rho.size() != dom.volume_size() || static_cast<int>(s.v.size()) != dom.grid.dim_h() + 1)
        throw ContractError("make_state: field shapes do not match the grid");
    for (const auto& c : s.v)
        if (c.size() != dom.volume_size()) throw ContractError("make_state: velocity shape mismatch");
    rebuild_metric(s, dom);
    return s;
}

/// Inviscid reference run: start from a single-mode surface perturbation at
/// uniform density, integrate in Euler mode, and measure the oscillation
/// frequency of that surface mode from zero crossings of its cosine
/// coefficient. Theory (deep-water capillary wave): omega^2 = sigma k^3 / rho*.
struct CapillaryProbe {
    double omega = 0.0;
    double omega_theory = 0.0;
    int crossings = 0;
};

inline CapillaryProbe euler_reference_run(const Domain& dom, const PhysParams& par, int k_mode,
                                          double amp, double n_periods = 2.5, double cfl = 0.3) {
    if (par.viscous()) throw ContractError("euler_reference_run requires eps = 0");
    if (!(par.sigma > 0.0)) throw ContractError("euler_reference_run requires sigma > 0");
    const int nc = dom.grid.dim_h() + 1;
    const double rho_star = std::pow(par.p_e, 1.0 / par.gamma);
    const double kk = 2.0 * pi * k_mode / dom.grid.cfg.length;

    CapillaryProbe out;
    out.omega_theory = std::sqrt(par.sigma * kk * kk * kk / rho_star);
    const double t_end = n_periods * 2.0 * pi / out.omega_theory;

    Field h0(dom.nh());
    for (int i = 0; i < dom.nh(); ++i) h0[i] = amp * std::cos(kk * dom.grid.y_of(i));
    FlowState s = make_state(Field(dom.volume_size(), rho_star),
                             std::vector<Field>(nc, dom.zeros_volume()), h0, 1.0, dom);
    apply_dynamic_bc(s, par, dom);
    rebuild_metric(s, dom);

    StepperConfig sc;
    sc.cfl = cfl;
    sc.dt_max = 0.02 / out.omega_theory;
    sc.t_end = t_end;

    auto mode_cos = [&](const FlowState& st) {
        double acc = 0.0;
        for (int i = 0; i < dom.nh(); ++i) acc += st.h.values[i] * std::cos(kk * dom.grid.y_of(i));
        return acc * 2.0 / dom.nh();
    };

    std::vector<double> tc;  // interpolated zero-crossing times
    double prev = mode_cos(s), prev_t = s.t;
    while (s.t < t_end) {
        const double dt = std::min(cfl_dt(s, par, sc, dom), t_end - s.t + 1e-14);
        advance(s, par, sc, dt, dom);
        const double cur = mode_cos(s);
        if (prev * cur < 0.0) tc.push_back(prev_t + (s.t - prev_t) * prev / (prev - cur));
        prev = cur;
        prev_t = s.t;
    }
    out.crossings = static_cast<int>(tc.size());
    if (tc.size() >= 2) {
        // Mean spacing between consecutive zero crossings is half a period.
        const double half = (tc.back() - tc.front()) / static_cast<double>(tc.size() - 1);
        out.omega = pi / half;
    }
    return out;
}

}  // namespace fsns
