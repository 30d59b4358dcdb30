#pragma once

#include <random>

#include "fsns/config.hpp"
#include "fsns/dynamics.hpp"
#include "fsns/geometry.hpp"

namespace fsns {

namespace presetdetail {

/// First horizontal coordinate of node ih (presets vary along y1 only, which
/// keeps them meaningful in both d_h = 1 and d_h = 2).
inline double y1_of(const Domain& dom, int ih) {
    const int ny = dom.grid.cfg.ny;
    return dom.grid.y_of(dom.grid.dim_h() == 1 ? ih : ih / ny);
}

}  // namespace presetdetail

/// Deterministic initial states for the run harness. All randomness comes
/// from the config seed through a fixed-width generator, so a config fully
/// determines the run.
inline FlowState build_initial_state(const RunConfig& c, const Domain& dom) {
    using presetdetail::y1_of;
    const double rho_e = std::pow(c.physics.p_e, 1.0 / c.physics.gamma);
    const int nz = dom.nz(), nh = dom.nh();
    const double L = dom.grid.cfg.length;
    const double k = 2.0 * pi * c.initial.mode / L;
    const double a = c.initial.amplitude;

    Field h = dom.zeros_surface();
    Field rho(dom.volume_size(), rho_e);
    std::vector<Field> v(static_cast<size_t>(dom.grid.dim_h()) + 1, dom.zeros_volume());

    if (c.initial.preset == "equilibrium") {
        // nothing else to do
    } else if (c.initial.preset == "capillary_wave") {
        for (int ih = 0; ih < nh; ++ih) h[ih] = a * std::cos(k * y1_of(dom, ih));
        // Stress balance at t = 0: surface pressure p_e - sigma H, relaxed
        // into the bulk along the extension profile of the surface mode.
        SurfaceHeight sh = make_surface_height(dom, h);
        Field H = mean_curvature(sh, dom);
        const double K = 1.0 + k * k;
        for (int ih = 0; ih < nh; ++ih) {
            const double ps = c.physics.p_e - c.physics.sigma * H[ih];
            for (int j = 0; j < nz; ++j) {
                const double z = dom.grid.z[j];
                const double E = std::exp(-z * z * K);
                const double p = c.physics.p_e + (ps - c.physics.p_e) * E;
                rho[static_cast<size_t>(ih) * nz + j] = std::pow(p, 1.0 / c.physics.gamma);
            }
        }
        h = sh.values;
    } else if (c.initial.preset == "shear_layer") {
        // Capillary ripple along y1 plus a transverse shear step: the last
        // velocity component runs at `speed` in a plateau under the free
        // surface and drops to rest across an erf transition of thickness
        // `width` centred at `depth`. The step diffuses at amplitude
        // `speed` forever, so its curvature sup decays exactly like
        // 1/(width^2 + 4 nu eps t): the uncapped sup grows like 1/eps
        // across a sweep while eps times the sup stays level. With d_h = 2
        // the step lives in v2 and the ripple varies along y1 only, so the
        // shear never enters div^phi v and the pressure stays a clean,
        // eps-uniform capillary signal. Both surface conditions hold at
        // t = 0 (the erf tail is negligible at z = 0 and the density comes
        // from the normal stress balance); an inconsistent start would
        // launch an impulsive acoustic front whose steepness grows as eps
        // shrinks and dominates the pressure diagnostics.
        for (int ih = 0; ih < nh; ++ih) h[ih] = a * std::cos(k * y1_of(dom, ih));
        SurfaceHeight sh = make_surface_height(dom, h);
        Field H = mean_curvature(sh, dom);
        const double K = 1.0 + k * k;
        Field& shear = v[v.size() - 2];  // v1 when d_h = 1, v2 when d_h = 2
        for (int ih = 0; ih < nh; ++ih) {
            const double ps = c.physics.p_e - c.physics.sigma * H[ih];
            for (int j = 0; j < nz; ++j) {
                const double z = dom.grid.z[j];
                const size_t idx = static_cast<size_t>(ih) * nz + j;
                const double p = c.physics.p_e + (ps - c.physics.p_e) * std::exp(-z * z * K);
                rho[idx] = std::pow(p, 1.0 / c.physics.gamma);
                shear[idx] = 0.5 * c.initial.speed *
                             (1.0 + std::erf((z + c.initial.depth) / c.initial.width));
            }
        }
        h = sh.values;
    } else if (c.initial.preset == "random_band") {
        std::mt19937_64 rng(c.initial.seed);
        std::uniform_real_distribution<double> U(-1.0, 1.0);
        for (int m = 1; m <= c.initial.kmax; ++m) {
            const double km = 2.0 * pi * m / L;
            const double ah = a * U(rng) / (m * m), ph = pi * U(rng);
            for (int ih = 0; ih < nh; ++ih) h[ih] += ah * std::cos(km * y1_of(dom, ih) + ph);
        }
        for (size_t comp = 0; comp < v.size() + 1; ++comp) {
            Field* tgt = comp < v.size() ? &v[comp] : &rho;
            const double scale = comp < v.size() ? a : 0.5 * a * rho_e;
            for (int m = 1; m <= c.initial.kmax; ++m) {
                const double km = 2.0 * pi * m / L;
                const double am = scale * U(rng) / (m * m), ph = pi * U(rng);
                const double decay = 0.5 + 0.5 * std::abs(U(rng));
                for (int ih = 0; ih < nh; ++ih) {
                    const double cy = std::cos(km * y1_of(dom, ih) + ph);
                    for (int j = 0; j < nz; ++j) {
                        const double z = dom.grid.z[j];
                        (*tgt)[static_cast<size_t>(ih) * nz + j] += am * cy * std::exp(decay * z);
                    }
                }
            }
        }
    } else if (c.initial.preset == "steep_surface") {
        // Deliberately steep: with the chart slope pinned at 1, the extension
        // gradient exceeds it and J crosses zero (health-abort exercise).
        for (int ih = 0; ih < nh; ++ih) h[ih] = a * std::cos(k * y1_of(dom, ih));
        return make_state(std::move(rho), std::move(v), std::move(h), 1.0, dom);
    } else {
        throw ConfigError("unknown preset: " + c.initial.preset);
    }

    const double A = choose_chart_slope(make_surface_height(dom, h), dom);
    return make_state(std::move(rho), std::move(v), std::move(h), A, dom);
}

}  // namespace fsns
