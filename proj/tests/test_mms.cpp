#include "fsns/mms.hpp"
#include "helpers.hpp"

using namespace fsns;
using namespace testutil;
using Catch::Approx;

namespace {

GridConfig grid_1d(int ny, int nz) {
    GridConfig gc;
    gc.dim_h = 1;
    gc.ny = ny;
    gc.nz = nz;
    gc.z_max = 3.0;
    gc.stretch = 1.0;
    return gc;
}

PhysParams mms_params(double eps) {
    PhysParams par;
    par.eps = eps;
    par.mu = 1.0;
    par.lambda = 0.4;
    par.sigma = 0.0;
    return par;
}

/// Sup over interior rows (boundary rows are pinned during evolution).
double interior_sup(const Field& f, const Domain& dom) {
    double s = 0.0;
    const int nz = dom.nz();
    for (int ih = 0; ih < dom.nh(); ++ih)
        for (int j = 1; j < nz - 1; ++j)
            s = std::max(s, std::abs(f[static_cast<size_t>(ih) * nz + j]));
    return s;
}

/// Sup residual of the forced semi-discrete tendencies against the analytic
/// time derivatives of the manufactured fields, per variable.
std::array<double, 4> semidiscrete_residual(const ManufacturedSolution& sol, const PhysParams& par,
                                            const GridConfig& gc, double t) {
    Domain dom(gc);
    FlowState s = sol.state(dom, t);
    Tendencies td = rhs(s, par, dom);
    sol.add_source(td, t, par, dom);

    Field er(dom.volume_size()), eu(dom.volume_size()), ew(dom.volume_size());
    for (int ih = 0; ih < dom.nh(); ++ih) {
        const double y = dom.grid.y_of(ih);
        for (int j = 0; j < dom.nz(); ++j) {
            const double z = dom.grid.z[j];
            const size_t idx = static_cast<size_t>(ih) * dom.nz() + j;
            er[idx] = td.drho[idx] - sol.rho(t, y, z).t;
            eu[idx] = td.dv[0][idx] - sol.v1(t, y, z).t;
            ew[idx] = td.dv[1][idx] - sol.v3(t, y, z).t;
        }
    }
    double eh = 0.0;
    for (int ih = 0; ih < dom.nh(); ++ih) {
        const double dth = sol.ah * sol.omega * std::sin(sol.k * dom.grid.y_of(ih) - sol.omega * t);
        eh = std::max(eh, std::abs(td.dh[ih] - dth));
    }
    return {interior_sup(er, dom), interior_sup(eu, dom), interior_sup(ew, dom), eh};
}

}  // namespace

TEST_CASE("kinematic identity is exact for the manufactured fields") {
    // v3 is built so the surface tendency equals d_t h as a function; the
    // discrete trace products are band-limited, so td.dh is exact too.
    auto sol = ManufacturedSolution::moving_surface();
    auto res = semidiscrete_residual(sol, mms_params(1e-2), grid_1d(16, 48), 0.37);
    CHECK(res[3] <= 1e-12);
}

TEST_CASE("equilibrium manufactured solution has zero source and zero error") {
    auto sol = ManufacturedSolution::equilibrium(1.2);
    const PhysParams par = mms_params(1e-2);
    const GridConfig gc = grid_1d(8, 32);

    Domain dom(gc);
    Tendencies td;
    td.drho = dom.zeros_volume();
    td.dv = {dom.zeros_volume(), dom.zeros_volume()};
    td.dh = dom.zeros_surface();
    sol.add_source(td, 0.5, par, dom);
    CHECK(interior_sup(td.drho, dom) <= 1e-13);
    CHECK(interior_sup(td.dv[0], dom) <= 1e-13);
    CHECK(interior_sup(td.dv[1], dom) <= 1e-13);

    MmsErrors e = mms_run(sol, par, gc, 0.2);
    CHECK(e.rho <= 1e-11);
    CHECK(e.v1 <= 1e-11);
    CHECK(e.v3 <= 1e-11);
    CHECK(e.h <= 1e-12);
}

TEST_CASE("solution lookup by id") {
    CHECK(ManufacturedSolution::by_id("moving_surface").ah > 0.0);
    CHECK(ManufacturedSolution::by_id("equilibrium").ah == 0.0);
    CHECK_THROWS_AS(ManufacturedSolution::by_id("nope"), ContractError);
}

TEST_CASE("semi-discrete residual converges under vertical refinement") {
    auto sol = ManufacturedSolution::moving_surface();
    const double t = 0.2;

    SECTION("viscous tendencies") {
        // rho carries the artificial damping on every path, so its sup
        // residual ratio under doubling is governed by the S^t S edge rows
        // (4x), while the velocity components stay at the smooth-field rate.
        const PhysParams par = mms_params(1e-2);
        auto coarse = semidiscrete_residual(sol, par, grid_1d(16, 48), t);
        auto fine = semidiscrete_residual(sol, par, grid_1d(16, 96), t);
        for (int q = 0; q < 3; ++q) {
            CHECK(coarse[q] <= 1e-5);
            CHECK(coarse[q] / fine[q] >= (q == 0 ? 3.5 : 5.0));
        }
    }
    SECTION("inviscid tendencies") {
        // The artificial damping's S^t S edge rows are O(dz^2) local, so the
        // sup residual ratio under doubling is 4, not the interior 8+.
        const PhysParams par = mms_params(0.0);
        auto coarse = semidiscrete_residual(sol, par, grid_1d(16, 48), t);
        auto fine = semidiscrete_residual(sol, par, grid_1d(16, 96), t);
        for (int q = 0; q < 3; ++q) {
            CHECK(coarse[q] <= 1e-5);
            CHECK(coarse[q] / fine[q] >= 3.5);
        }
    }
}

TEST_CASE("moving-surface convergence orders") {
    auto sol = ManufacturedSolution::moving_surface();
    const std::vector<int> nzs = {32, 48, 72};
    const double t_end = 0.25;

    auto orders = [&](double eps) {
        std::vector<double> ns, er, eu, ew, eh;
        for (int nz : nzs) {
            MmsErrors e = mms_run(sol, mms_params(eps), grid_1d(16, nz), t_end);
            ns.push_back(nz);
            er.push_back(e.rho);
            eu.push_back(e.v1);
            ew.push_back(e.v3);
            eh.push_back(e.h);
        }
        return std::array<double, 4>{fit_order(ns, er), fit_order(ns, eu), fit_order(ns, ew),
                                     fit_order(ns, eh)};
    };

    SECTION("viscous, eps = 1e-2") {
        auto p = orders(1e-2);
        for (int q = 0; q < 4; ++q) {
            INFO("variable " << q << " order " << p[q]);
            CHECK(p[q] >= 1.8);
        }
    }
    SECTION("inviscid, eps = 0") {
        auto p = orders(0.0);
        for (int q = 0; q < 4; ++q) {
            INFO("variable " << q << " order " << p[q]);
            CHECK(p[q] >= 1.8);
        }
    }
}

TEST_CASE("manufactured solutions reject unsupported horizontal dimension") {
    GridConfig gc = grid_1d(8, 16);
    gc.dim_h = 2;
    Domain dom(gc);
    CHECK_THROWS_AS(ManufacturedSolution::moving_surface().state(dom, 0.0), ContractError);
}
