#pragma once

#include <string>

#include "fsns/dynamics.hpp"

namespace fsns {

namespace mmsdetail {

/// First-order forward-mode number in (y, z): value plus both derivatives.
struct Jet1 {
    double v = 0.0, y = 0.0, z = 0.0;
};
inline Jet1 operator+(Jet1 a, Jet1 b) { return {a.v + b.v, a.y + b.y, a.z + b.z}; }
inline Jet1 operator-(Jet1 a, Jet1 b) { return {a.v - b.v, a.y - b.y, a.z - b.z}; }
inline Jet1 operator*(Jet1 a, Jet1 b) {
    return {a.v * b.v, a.y * b.v + a.v * b.y, a.z * b.v + a.v * b.z};
}
inline Jet1 operator*(double c, Jet1 a) { return {c * a.v, c * a.y, c * a.z}; }
inline Jet1 operator/(Jet1 a, Jet1 b) {
    const double iv = 1.0 / b.v;
    const double q = a.v * iv;
    return {q, (a.y - q * b.y) * iv, (a.z - q * b.z) * iv};
}

/// Second-order spatial jet plus the plain time derivative of the value.
/// dy()/dz() expose the first derivatives as Jet1s (their own derivatives are
/// the second-order entries), which is exactly what nested d^phi needs.
struct Jet2 {
    double v = 0.0, t = 0.0, y = 0.0, z = 0.0, yy = 0.0, yz = 0.0, zz = 0.0;
    Jet1 val() const { return {v, y, z}; }
    Jet1 dy() const { return {y, yy, yz}; }
    Jet1 dz() const { return {z, yz, zz}; }
};

/// Separable field F(theta) G(z) with theta = k y - omega t; (F, Fp, Fpp) and
/// (G, Gp, Gpp) are the factors and their derivatives at the evaluation point.
inline Jet2 separable(double F, double Fp, double Fpp, double G, double Gp, double Gpp, double k,
                      double omega) {
    Jet2 j;
    j.v = F * G;
    j.t = -omega * Fp * G;
    j.y = k * Fp * G;
    j.z = F * Gp;
    j.yy = k * k * Fpp * G;
    j.yz = k * Fp * Gp;
    j.zz = F * Gpp;
    return j;
}

}  // namespace mmsdetail

/// Closed-form manufactured solution on the moving chart (d_h = 1): a
/// traveling surface wave h = ah cos(k y - omega t) with velocity and density
/// fields chosen so the kinematic boundary condition holds identically
/// (v3(y,0) = d_t h + v1(y,0) d_y h as functions, so h needs no source).
/// Source terms for rho and v are evaluated pointwise by forward-mode jets
/// through the same transformed operators the scheme discretizes.
struct ManufacturedSolution {
    std::string id = "moving_surface";
    double k = 1.0;      // integer multiple of 2 pi / L
    double omega = 1.3;
    double ah = 2e-3;    // surface amplitude
    double av = 2e-2;    // horizontal velocity amplitude
    double ar = 1e-2;    // density perturbation amplitude
    double rho0 = 1.0;
    double A = 1.0;      // chart slope (fixed; amplitudes keep J near A)
    double b1 = 0.3;     // shape parameter of the v1 profile

    static ManufacturedSolution moving_surface() { return {}; }
    static ManufacturedSolution equilibrium(double rho_star = 1.0) {
        ManufacturedSolution s;
        s.id = "equilibrium";
        s.ah = s.av = s.ar = 0.0;
        s.rho0 = rho_star;
        return s;
    }
    static ManufacturedSolution by_id(const std::string& name) {
        if (name == "moving_surface") return moving_surface();
        if (name == "equilibrium") return equilibrium();
        throw ContractError("unknown manufactured solution id '" + name +
                            "' (available: moving_surface, equilibrium)");
    }

    double h_val(double t, double y) const { return ah * std::cos(k * y - omega * t); }

    mmsdetail::Jet2 eta(double t, double y, double z) const {
        const double th = k * y - omega * t;
        const double K = 1.0 + k * k, E = std::exp(-z * z * K);
        return mmsdetail::separable(ah * std::cos(th), -ah * std::sin(th), -ah * std::cos(th), E,
                                    -2.0 * z * K * E, (4.0 * z * z * K - 2.0) * K * E, k, omega);
    }
    mmsdetail::Jet2 rho(double t, double y, double z) const {
        const double th = k * y - omega * t, G = std::exp(z);
        auto j = mmsdetail::separable(ar * std::cos(th), -ar * std::sin(th), -ar * std::cos(th), G,
                                      G, G, k, omega);
        j.v += rho0;
        return j;
    }
    mmsdetail::Jet2 v1(double t, double y, double z) const {
        const double th = k * y - omega * t, E = std::exp(z);
        const double G = E * (1.0 + b1 * z);          // G(0) = 1
        const double Gp = E * (1.0 + b1 * z + b1);
        const double Gpp = E * (1.0 + b1 * z + 2.0 * b1);
        return mmsdetail::separable(av * std::sin(th), av * std::cos(th), -av * std::sin(th), G, Gp,
                                    Gpp, k, omega);
    }
    mmsdetail::Jet2 v3(double t, double y, double z) const {
        const double th = k * y - omega * t;
        const double s = std::sin(th), c = std::cos(th);
        // Kinematic trace: v3(y, 0) = d_t h + v1(y, 0) d_y h.
        const double F = ah * omega * s - av * ah * k * s * s;
        const double Fp = ah * omega * c - av * ah * k * 2.0 * s * c;
        const double Fpp = -ah * omega * s - av * ah * k * 2.0 * (c * c - s * s);
        const double E = std::exp(z), q = 1.0 + z;
        const double G = E * q * q;                   // G(0) = 1
        const double Gp = E * (q * q + 2.0 * q);
        const double Gpp = E * (q * q + 4.0 * q + 2.0);
        return mmsdetail::separable(F, Fp, Fpp, G, Gp, Gpp, k, omega);
    }

    Field h_field(const Domain& dom, double t) const {
        Field h(dom.nh());
        for (int i = 0; i < dom.nh(); ++i) h[i] = h_val(t, dom.grid.y_of(i));
        return h;
    }

    FlowState state(const Domain& dom, double t) const {
        if (dom.grid.dim_h() != 1)
            throw ContractError("manufactured solutions are implemented for d_h = 1");
        const int nzv = dom.nz();
        Field r(dom.volume_size());
        std::vector<Field> v(2, dom.zeros_volume());
        for (int ih = 0; ih < dom.nh(); ++ih) {
            const double y = dom.grid.y_of(ih);
            for (int j = 0; j < nzv; ++j) {
                const double z = dom.grid.z[j];
                const size_t idx = static_cast<size_t>(ih) * nzv + j;
                r[idx] = rho(t, y, z).v;
                v[0][idx] = v1(t, y, z).v;
                v[1][idx] = v3(t, y, z).v;
            }
        }
        FlowState s = make_state(std::move(r), std::move(v), h_field(dom, t), A, dom);
        s.t = t;
        return s;
    }

    /// S = d_t q - RHS(q) for the manufactured fields, added onto tendencies.
    /// h needs no source: the kinematic identity holds exactly by design.
    void add_source(Tendencies& td, double t, const PhysParams& par, const Domain& dom) const {
        using namespace mmsdetail;
        const int nzv = dom.nz();
        for (int ih = 0; ih < dom.nh(); ++ih) {
            const double y = dom.grid.y_of(ih);
            for (int j = 0; j < nzv; ++j) {
                const double z = dom.grid.z[j];
                const size_t idx = static_cast<size_t>(ih) * nzv + j;
                const Jet2 et = eta(t, y, z), r = rho(t, y, z), u = v1(t, y, z), w = v3(t, y, z);
                Jet2 phi = et;
                phi.v += A * z;
                phi.z += A;
                const Jet1 phiy = phi.dy(), J = phi.dz();

                auto dphiy = [&](const Jet2& f) { return f.dy() - (phiy / J) * f.dz(); };
                auto dphiz = [&](const Jet2& f) { return f.dz() / J; };
                auto dphiy_s = [&](const Jet1& g) { return g.y - phiy.v / J.v * g.z; };
                auto dphiz_s = [&](const Jet1& g) { return g.z / J.v; };

                Jet1 E[2][2] = {{dphiy(u), dphiy(w)}, {dphiz(u), dphiz(w)}};
                const Jet1 divv = E[0][0] + E[1][1];
                const double Vz = (-u.v * phi.y + w.v - et.t) / J.v;

                td.drho[idx] += r.t + u.v * r.y + Vz * r.z + r.v * divv.v;

                const double pfac = par.gamma * std::pow(r.v, par.gamma - 1.0);
                const double gp[2] = {pfac * dphiy(r).v, pfac * dphiz(r).v};
                double visc[2] = {0.0, 0.0};
                if (par.viscous()) {
                    Jet1 S[2][2];
                    for (int a = 0; a < 2; ++a)
                        for (int b = 0; b < 2; ++b) S[a][b] = 0.5 * (E[a][b] + E[b][a]);
                    for (int b = 0; b < 2; ++b) {
                        const double divS = dphiy_s(S[0][b]) + dphiz_s(S[1][b]);
                        const double gd = (b == 0) ? dphiy_s(divv) : dphiz_s(divv);
                        visc[b] = par.eps / r.v * (2.0 * par.mu * divS + par.lambda * gd);
                    }
                }
                const Jet2* vel[2] = {&u, &w};
                for (int b = 0; b < 2; ++b) {
                    const Jet2& q = *vel[b];
                    td.dv[b][idx] += q.t + u.v * q.y + Vz * q.z + gp[b] / r.v - visc[b];
                }
            }
        }
    }

    /// Anchored-Dirichlet hook: pins rho and v on the top and bottom rows to
    /// the exact solution at the stage time. The Domain must outlive the hook.
    BoundaryPin make_pin(const Domain& dom) const {
        ManufacturedSolution sol = *this;
        const Domain* dp = &dom;
        return [sol, dp](FlowState& s, double t) {
            const int nzv = dp->nz();
            for (int ih = 0; ih < dp->nh(); ++ih) {
                const double y = dp->grid.y_of(ih);
                for (int row : {0, nzv - 1}) {
                    const double z = dp->grid.z[row];
                    const size_t idx = static_cast<size_t>(ih) * nzv + row;
                    s.rho[idx] = sol.rho(t, y, z).v;
                    s.v[0][idx] = sol.v1(t, y, z).v;
                    s.v[1][idx] = sol.v3(t, y, z).v;
                }
            }
        };
    }
};

struct MmsErrors {
    double rho = 0.0, v1 = 0.0, v3 = 0.0, h = 0.0;
    int nz = 0;
};

/// Integrate the forced system from the manufactured initial state to t_end
/// and report L2 errors against the exact solution. Boundary rows are pinned
/// (anchored-Dirichlet); h evolves freely so its error is measured honestly.
/// On the viscous path the time step is additionally capped at
/// visc_dt_coeff * dz_min^2: the Crank-Nicolson halves freeze the moving
/// Dirichlet rows for the solve, an O(dt^2) defect whose constant grows with
/// N_z, and the quadratic cap keeps it subordinate to the spatial truncation
/// so the fitted order reflects the discretization in dz.
inline MmsErrors mms_run(const ManufacturedSolution& sol, PhysParams par, const GridConfig& gc,
                         double t_end, double cfl = 0.35, double visc_dt_coeff = 2.0) {
    Domain dom(gc);
    par.bottom_bc = BottomBC::AnchoredDirichlet;
    FlowState s = sol.state(dom, 0.0);
    StepperConfig sc;
    sc.cfl = cfl;
    sc.dt_max = 1.0;  // let the CFL couple dt to the vertical spacing
    sc.t_end = t_end;
    double dz_min = std::numeric_limits<double>::infinity();
    for (int j = 1; j < dom.nz(); ++j)
        dz_min = std::min(dz_min, dom.grid.z[j] - dom.grid.z[j - 1]);
    const double dt_cap = par.viscous() ? visc_dt_coeff * dz_min * dz_min
                                        : std::numeric_limits<double>::infinity();
    auto pin = sol.make_pin(dom);
    auto rhs_fn = [&](const FlowState& st) {
        Tendencies td = rhs(st, par, dom);
        sol.add_source(td, st.t, par, dom);
        return td;
    };
    while (s.t < t_end - 1e-12) {
        const double dt = std::min({cfl_dt(s, par, sc, dom), dt_cap, t_end - s.t});
        advance(s, par, sc, dt, dom, pin, rhs_fn);
    }

    FlowState ex = sol.state(dom, s.t);
    auto l2 = [&](const Field& a, const Field& b) {
        Field d(a.size());
        for (size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
        return std::sqrt(dom.l2sq(d));
    };
    MmsErrors e;
    e.nz = gc.nz;
    e.rho = l2(s.rho, ex.rho);
    e.v1 = l2(s.v[0], ex.v[0]);
    e.v3 = l2(s.v[1], ex.v[1]);
    Field dh(dom.nh());
    for (int i = 0; i < dom.nh(); ++i) dh[i] = s.h.values[i] - ex.h.values[i];
    e.h = std::sqrt(dom.l2sq_surface(dh));
    return e;
}

/// Least-squares fit of err ~ C nz^(-p); returns the observed order p.
inline double fit_order(const std::vector<double>& nzs, const std::vector<double>& errs) {
    if (nzs.size() != errs.size() || nzs.size() < 2)
        throw ContractError("fit_order needs at least two matched samples");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(nzs.size());
    for (size_t i = 0; i < nzs.size(); ++i) {
        const double x = std::log(nzs[i]), y = std::log(std::max(errs[i], 1e-300));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return -(n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace fsns
