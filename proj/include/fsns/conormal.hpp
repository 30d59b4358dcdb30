#pragma once

#include "fsns/operators.hpp"

namespace fsns {

/// Powers of the fields (Z0, Z1, Z2, Z3) = (d_t, d_1, d_2, (z/(1-z)) d_z).
struct MultiIndex {
    int a0 = 0, a1 = 0, a2 = 0, a3 = 0;
    int order() const { return a0 + a1 + a2 + a3; }
    int spatial_order() const { return a1 + a2 + a3; }
};

/// Time-derivative stack: d[k] = d_t^k f. Entries come from the semi-discrete
/// right-hand side, never from differencing stored snapshots.
struct TimeStack {
    std::vector<Field> d;
    TimeStack() = default;
    explicit TimeStack(Field f0) { d.push_back(std::move(f0)); }
    TimeStack(Field f0, Field f1) {
        d.push_back(std::move(f0));
        d.push_back(std::move(f1));
    }
    int depth() const { return static_cast<int>(d.size()); }
    const Field& value() const { return d[0]; }
};

/// Z3 = (z/(1-z)) d_z; the weight vanishes at z = 0, so Z3 f is exactly zero
/// on the surface row.
inline Field z3_apply(const Field& f, const Domain& dom) {
    Field out = dom.dz(f);
    const int n_z = dom.nz();
    for (int ih = 0; ih < dom.nh(); ++ih)
        for (int j = 0; j < n_z; ++j) {
            const double z = dom.grid.z[j];
            out[static_cast<size_t>(ih) * n_z + j] *= z / (1.0 - z);
        }
    return out;
}

/// Z^alpha f, applying Z0 first (by consuming the stack), then Z1, Z2, Z3.
inline Field conormal_apply(const TimeStack& f, const MultiIndex& a, const Domain& dom) {
    if (a.a0 >= f.depth())
        throw ContractError("conormal_apply: time stack depth " + std::to_string(f.depth()) +
                            " insufficient for alpha0 = " + std::to_string(a.a0));
    if (a.a2 > 0 && dom.grid.dim_h() < 2) throw ContractError("Z2 requires dim_h = 2");
    Field g = f.d[a.a0];
    for (int k = 0; k < a.a1; ++k) g = dom.spec.deriv(g, 0);
    for (int k = 0; k < a.a2; ++k) g = dom.spec.deriv(g, 1);
    for (int k = 0; k < a.a3; ++k) g = z3_apply(g, dom);
    return g;
}

/// All multi-indices with |alpha| <= m, alpha0 <= t_cap (and alpha2 = 0 in
/// the 1-D horizontal configuration).
inline std::vector<MultiIndex> conormal_indices(int m, int t_cap, int dim_h) {
    std::vector<MultiIndex> out;
    for (int a0 = 0; a0 <= std::min(m, t_cap); ++a0)
        for (int a1 = 0; a0 + a1 <= m; ++a1)
            for (int a2 = 0; a0 + a1 + a2 <= m && (dim_h == 2 || a2 == 0); ++a2)
                for (int a3 = 0; a0 + a1 + a2 + a3 <= m; ++a3)
                    out.push_back({a0, a1, a2, a3});
    return out;
}

/// Conormal Sobolev norm squared: sum_{|alpha| <= m} ||Z^alpha f||^2.
/// weighted = true uses the measure dV_t = J dy dz.
inline double conormal_norm_sq(const TimeStack& f, int m, const ChartMetric& metric, bool weighted,
                               const Domain& dom, int t_cap = 0) {
    double acc = 0.0;
    for (const auto& a : conormal_indices(m, std::min(t_cap, f.depth() - 1), dom.grid.dim_h())) {
        Field g = conormal_apply(f, a, dom);
        acc += weighted ? dom.l2sq_weighted(g, metric.J) : dom.l2sq(g);
    }
    return acc;
}

inline double conormal_norm(const TimeStack& f, int m, const ChartMetric& metric, bool weighted,
                            const Domain& dom, int t_cap = 0) {
    return std::sqrt(conormal_norm_sq(f, m, metric, weighted, dom, t_cap));
}

/// Sup norm over all conormal derivatives up to order m (the H^{m,inf} norm).
inline double conormal_sup(const TimeStack& f, int m, const Domain& dom, int t_cap = 0) {
    double acc = 0.0;
    for (const auto& a : conormal_indices(m, std::min(t_cap, f.depth() - 1), dom.grid.dim_h()))
        acc = std::max(acc, sup_norm(conormal_apply(f, a, dom)));
    return acc;
}

/// Surface (z = 0) analogues on horizontal fields.
inline Field surface_conormal_apply(const TimeStack& f, const MultiIndex& a, const Domain& dom) {
    if (a.a3 != 0) throw ContractError("surface conormal: no Z3 on boundary fields");
    if (a.a0 >= f.depth()) throw ContractError("surface conormal: stack too shallow");
    Field g = f.d[a.a0];
    for (int k = 0; k < a.a1; ++k) g = dom.spec.deriv_level(g, 0);
    for (int k = 0; k < a.a2; ++k) g = dom.spec.deriv_level(g, 1);
    return g;
}

inline double surface_conormal_norm_sq(const TimeStack& f, int m, const Domain& dom, int t_cap = 0) {
    double acc = 0.0;
    for (const auto& a : conormal_indices(m, std::min(t_cap, f.depth() - 1), dom.grid.dim_h()))
        if (a.a3 == 0) acc += dom.l2sq_surface(surface_conormal_apply(f, a, dom));
    return acc;
}

/// Fractional Sobolev norm squared of a surface field, spectral convention
/// |g|_s^2 = L^dh * sum_xi (1 + |xi|^2)^s |c_xi|^2 with c the Fourier coefficients.
inline double surface_sobolev_sq(const Field& g, double s, const Domain& dom) {
    auto c = dom.spec.forward_level(g);
    const int ny = dom.grid.ny();
    const double scale = std::pow(dom.grid.length(), dom.grid.dim_h()) /
                         (static_cast<double>(dom.nh()) * dom.nh());
    double acc = 0.0;
    for (int ic = 0; ic < dom.spec.columns(); ++ic) {
        const int ik = (dom.grid.dim_h() == 1) ? ic : ic % (ny / 2 + 1);
        const double mult = (ik == 0 || ik == ny / 2) ? 1.0 : 2.0;
        acc += mult * std::pow(1.0 + dom.spec.xi_sq(ic), s) * std::norm(c[ic]);
    }
    return acc * scale;
}

}  // namespace fsns
