#include "helpers.hpp"

using namespace fsns;
using namespace testutil;

namespace {

struct Setup {
    Domain dom;
    SurfaceHeight h0;
    Setup(int ny, int nz) : dom(make_domain_1d(ny, nz)), h0(make_surface_height(dom, dom.zeros_surface())) {}
};

}  // namespace

TEST_CASE("flat chart: commutators reduce to the Z3 degeneracy term") {
    // With h = 0 every C_i^alpha vanishes except when Z3 meets d_z: then
    // C = -[Z3, d_z]-type terms survive, [Z3, d_z]g = -(1/(1-z)^2) d_z g.
    Setup s(32, 256);
    auto m = assemble_chart(s.h0, s.h0, 1.0, s.dom);
    std::mt19937_64 rng(4);
    Field f = random_volume(s.dom, rng, 4);
    Field ft = random_volume(s.dom, rng, 4);
    TimeStack fs(f, ft);
    for (int i : {1, 3}) {
        for (MultiIndex a : {MultiIndex{0, 1, 0, 0}, MultiIndex{0, 0, 0, 1}, MultiIndex{1, 0, 0, 0},
                             MultiIndex{0, 1, 0, 1}}) {
            Field c = commutator_residual(fs, a, i, m, s.dom);
            if (i == 3 && a.a3 > 0) continue;  // checked analytically below
            REQUIRE(sup_norm(c) < 1e-7 * std::max(1.0, sup_norm(f)));
        }
    }
    // i = z, alpha = Z3: C = [Z3, d_z] f = -(1/(1-z)^2) d_z f.
    Field c = commutator_residual(fs, {0, 0, 0, 1}, 3, m, s.dom);
    Field fz = s.dom.dz(f);
    const int nz = s.dom.nz();
    double err = 0.0;
    for (int ih = 0; ih < s.dom.nh(); ++ih)
        for (int j = 0; j < nz; ++j) {
            const double z = s.dom.grid.z[j];
            const double want = -fz[static_cast<size_t>(ih) * nz + j] / ((1 - z) * (1 - z));
            err = std::max(err, std::abs(c[static_cast<size_t>(ih) * nz + j] - want));
        }
    REQUIRE(err < 1e-5 * std::max(1.0, sup_norm(fz)));
}

TEST_CASE("two-route agreement for |alpha| = 1 over curved charts") {
    Setup s(32, 128);
    std::mt19937_64 seeds(2024);
    int checked = 0;
    for (int trial = 0; trial < 10; ++trial) {
        auto surf = random_surface(seeds, 0.05, 3);
        auto h = make_surface_height(s.dom, surf.sample_h(s.dom));
        Field dh(s.dom.nh());
        for (int i = 0; i < s.dom.nh(); ++i) dh[i] = 0.03 * std::cos(2 * s.dom.grid.y_of(i));
        auto m = assemble_chart(h, make_surface_height(s.dom, dh), 1.0, s.dom);
        Field f = random_volume(s.dom, seeds, 3, 0.5);
        Field ft = random_volume(s.dom, seeds, 3, 0.5);
        TimeStack fs(f, ft);
        for (int zw : {0, 1, 3}) {
            MultiIndex a{zw == 0 ? 1 : 0, zw == 1 ? 1 : 0, 0, zw == 3 ? 1 : 0};
            for (int i : {0, 1, 3}) {
                if (i == 0 && zw == 0) continue;  // needs second time derivatives
                Field r1 = commutator_residual(fs, a, i, m, s.dom);
                Field r2 = commutator_expanded(fs, zw, i, m, s.dom);
                REQUIRE(max_abs_diff(r1, r2) < 1e-6);
                ++checked;
            }
        }
    }
    REQUIRE(checked == 10 * 8);
}

TEST_CASE("commutator scales linearly with surface amplitude") {
    Setup s(32, 96);
    std::mt19937_64 rng(55);
    ModeSurface surf;
    surf.modes = {{1, 0.01, 0.0}, {2, 0.0, 0.004}};
    auto scale_once = [&](double fac) {
        ModeSurface ss = surf;
        for (auto& mo : ss.modes) {
            mo.a *= fac;
            mo.b *= fac;
        }
        auto h = make_surface_height(s.dom, ss.sample_h(s.dom));
        auto m = assemble_chart(h, s.h0, 1.0, s.dom);
        TimeStack fs(m.eta);  // f = eta, i = z, |alpha| = 1
        Field c = commutator_residual(fs, {0, 0, 0, 1}, 3, m, s.dom);
        return std::sqrt(s.dom.l2sq(c));
    };
    const double c1 = scale_once(1.0);
    const double c2 = scale_once(2.0);
    // Leading term is C_{3,3} ~ (1/A)[Z3, d_z]eta, linear in the amplitude;
    // the bilinear pieces enter at O(h^2) and stay inside the 5% band.
    REQUIRE(c2 / c1 == Catch::Approx(2.0).epsilon(0.05));
}

TEST_CASE("expanded route rejects unsupported pairings") {
    Setup s(16, 24);
    auto m = assemble_chart(s.h0, s.h0, 1.0, s.dom);
    TimeStack f(s.dom.zeros_volume(), s.dom.zeros_volume());
    REQUIRE_THROWS_AS(commutator_expanded(f, 0, 0, m, s.dom), ContractError);
    REQUIRE_THROWS_AS(commutator_residual(f, {1, 0, 0, 0}, 0, m, s.dom), ContractError);
}
