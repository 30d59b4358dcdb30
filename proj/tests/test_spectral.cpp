#include "helpers.hpp"

using namespace fsns;
using namespace testutil;

TEST_CASE("forward/inverse round trip is lossless") {
    auto dom = make_domain_1d(32, 16);
    std::mt19937_64 rng(7);
    Field f = random_volume(dom, rng, 10);
    Field g = dom.spec.inverse(dom.spec.forward(f));
    REQUIRE(max_abs_diff(f, g) < 1e-13);
}

TEST_CASE("spectral derivative is exact on resolved modes") {
    auto dom = make_domain_1d(32, 12);
    const int nz = dom.nz();
    Field f(dom.volume_size()), want(dom.volume_size());
    for (int i = 0; i < dom.nh(); ++i) {
        const double y = dom.grid.y_of(i);
        for (int j = 0; j < nz; ++j) {
            f[static_cast<size_t>(i) * nz + j] = std::sin(3 * y) + 0.5 * std::cos(7 * y);
            want[static_cast<size_t>(i) * nz + j] = 3 * std::cos(3 * y) - 3.5 * std::sin(7 * y);
        }
    }
    REQUIRE(max_abs_diff(dom.spec.deriv(f, 0), want) < 1e-11);
}

TEST_CASE("double derivative equals -k^2 multiplication") {
    auto dom = make_domain_1d(64, 10);
    std::mt19937_64 rng(11);
    Field f = random_volume(dom, rng, 9);
    Field d2 = dom.spec.deriv(dom.spec.deriv(f, 0), 0);
    auto c = dom.spec.forward(f);
    for (int ic = 0; ic < dom.spec.columns(); ++ic)
        for (int iz = 0; iz < dom.nz(); ++iz)
            c[static_cast<size_t>(ic) * dom.nz() + iz] *= -dom.spec.xi_sq(ic);
    Field want = dom.spec.inverse(c);
    REQUIRE(max_abs_diff(d2, want) < 1e-11);
}

TEST_CASE("dealias removes modes above the 2/3 cutoff and keeps the rest") {
    auto dom = make_domain_1d(32, 10);
    const int nz = dom.nz();
    const int kmax = 32 / 3;  // = 10
    Field f(dom.volume_size());
    for (int i = 0; i < dom.nh(); ++i) {
        const double y = dom.grid.y_of(i);
        for (int j = 0; j < nz; ++j)
            f[static_cast<size_t>(i) * nz + j] = std::cos(kmax * y) + std::cos((kmax + 1) * y);
    }
    Field g = f;
    dom.spec.dealias(g);
    Field keep(dom.volume_size());
    for (int i = 0; i < dom.nh(); ++i)
        for (int j = 0; j < nz; ++j)
            keep[static_cast<size_t>(i) * nz + j] = std::cos(kmax * dom.grid.y_of(i));
    REQUIRE(max_abs_diff(g, keep) < 1e-12);
}

TEST_CASE("level transforms match volume transforms row-wise") {
    auto dom = make_domain_1d(32, 9);
    std::mt19937_64 rng(3);
    Field f = random_volume(dom, rng, 6);
    Field top = dom.trace_top(f);
    Field dtop = dom.spec.deriv_level(top, 0);
    Field dvol = dom.spec.deriv(f, 0);
    REQUIRE(max_abs_diff(dtop, dom.trace_top(dvol)) < 1e-11);
}

TEST_CASE("surface Sobolev norm matches Parseval on a single mode") {
    auto dom = make_domain_1d(32, 9);
    Field h(dom.nh());
    for (int i = 0; i < dom.nh(); ++i) h[i] = 0.3 * std::sin(2 * dom.grid.y_of(i));
    // |h|_s^2 = L * (1+k^2)^s * amp^2/2 for a single real mode.
    const double want = 2 * pi * std::pow(5.0, 1.5) * 0.09 / 2;
    REQUIRE(surface_sobolev_sq(h, 1.5, dom) == Catch::Approx(want).epsilon(1e-12));
    // s = 0 reduces to the plain L2 norm.
    REQUIRE(surface_sobolev_sq(h, 0.0, dom) == Catch::Approx(dom.l2sq_surface(h)).epsilon(1e-12));
}

TEST_CASE("2-D horizontal transforms and derivatives") {
    GridConfig cfg;
    cfg.dim_h = 2;
    cfg.ny = 16;
    cfg.nz = 10;
    Domain dom(cfg);
    const int nz = dom.nz();
    Field f(dom.volume_size()), w1(dom.volume_size()), w2(dom.volume_size());
    for (int i1 = 0; i1 < 16; ++i1)
        for (int i2 = 0; i2 < 16; ++i2) {
            const double y1 = dom.grid.y_of(i1), y2 = dom.grid.y_of(i2);
            for (int j = 0; j < nz; ++j) {
                const size_t k = (static_cast<size_t>(i1) * 16 + i2) * nz + j;
                f[k] = std::sin(2 * y1) * std::cos(3 * y2);
                w1[k] = 2 * std::cos(2 * y1) * std::cos(3 * y2);
                w2[k] = -3 * std::sin(2 * y1) * std::sin(3 * y2);
            }
        }
    REQUIRE(max_abs_diff(dom.spec.inverse(dom.spec.forward(f)), f) < 1e-13);
    REQUIRE(max_abs_diff(dom.spec.deriv(f, 0), w1) < 1e-11);
    REQUIRE(max_abs_diff(dom.spec.deriv(f, 1), w2) < 1e-11);
}
