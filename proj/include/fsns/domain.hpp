#pragma once

#include <memory>

#include "fsns/spectral.hpp"

namespace fsns {

/// Scalar sample array on the volume grid (z-fastest layout, size nh*nz) or
/// on the surface grid (size nh). Shape is carried by the owning Domain.
using Field = std::vector<double>;

inline void require_finite(const Field& f, const std::string& name) {
    if (!all_finite(f)) throw HealthError("non-finite values in field '" + name + "'");
}

inline double sup_norm(const Field& f) {
    double m = 0.0;
    for (double x : f) m = std::max(m, std::abs(x));
    return m;
}

/// Grid plus its spectral transform machinery; the context handed to every
/// geometry/calculus/dynamics operation.
class Domain {
  public:
    GridSpec grid;
    Spectral spec;

    explicit Domain(const GridConfig& cfg) : grid(build_grid(cfg)), spec(grid) {}

    int nh() const { return grid.nh(); }
    int nz() const { return grid.nz(); }
    size_t volume_size() const { return static_cast<size_t>(grid.nh()) * grid.nz(); }

    Field zeros_volume() const { return Field(volume_size(), 0.0); }
    Field zeros_surface() const { return Field(nh(), 0.0); }

    /// 4th-order vertical derivative (one-sided at both ends).
    Field dz(const Field& f) const { return dz_with(grid.d1, f); }
    /// Vertical second derivative.
    Field dzz(const Field& f) const { return dz_with(grid.d2, f); }

    Field dz_with(const VertStencils& s, const Field& f) const {
        if (f.size() != volume_size()) throw ContractError("dz: volume size mismatch");
        Field out(f.size());
        const int n_z = nz();
        for (int ih = 0; ih < nh(); ++ih)
            s.apply(f.data() + static_cast<size_t>(ih) * n_z, out.data() + static_cast<size_t>(ih) * n_z,
                    n_z);
        return out;
    }

    /// Surface trace (z = 0 row) of a volume field.
    Field trace_top(const Field& f) const {
        Field out(nh());
        const int n_z = nz();
        for (int ih = 0; ih < nh(); ++ih) out[ih] = f[static_cast<size_t>(ih) * n_z + n_z - 1];
        return out;
    }

    Field trace_bottom(const Field& f) const {
        Field out(nh());
        const int n_z = nz();
        for (int ih = 0; ih < nh(); ++ih) out[ih] = f[static_cast<size_t>(ih) * n_z];
        return out;
    }

    /// Surface integral over one period cell.
    double integrate_surface(const Field& f) const {
        double acc = 0.0;
        for (double x : f) acc += x;
        return acc * grid.dy_cell();
    }

    /// Volume integral with optional weight field.
    double integrate(const Field& f) const { return grid.integrate(f); }
    double integrate_weighted(const Field& f, const Field& w) const {
        double acc = 0.0;
        const int n_z = nz();
        for (int ih = 0; ih < nh(); ++ih)
            for (int j = 0; j < n_z; ++j) {
                const size_t k = static_cast<size_t>(ih) * n_z + j;
                acc += grid.zw[j] * f[k] * w[k];
            }
        return acc * grid.dy_cell();
    }

    /// L2 norm squared, plain or weighted measure.
    double l2sq(const Field& f) const {
        double acc = 0.0;
        const int n_z = nz();
        for (int ih = 0; ih < nh(); ++ih)
            for (int j = 0; j < n_z; ++j) {
                const size_t k = static_cast<size_t>(ih) * n_z + j;
                acc += grid.zw[j] * f[k] * f[k];
            }
        return acc * grid.dy_cell();
    }
    double l2sq_weighted(const Field& f, const Field& jac) const {
        double acc = 0.0;
        const int n_z = nz();
        for (int ih = 0; ih < nh(); ++ih)
            for (int j = 0; j < n_z; ++j) {
                const size_t k = static_cast<size_t>(ih) * n_z + j;
                acc += grid.zw[j] * f[k] * f[k] * jac[k];
            }
        return acc * grid.dy_cell();
    }

    double l2sq_surface(const Field& f) const {
        double acc = 0.0;
        for (double x : f) acc += x * x;
        return acc * grid.dy_cell();
    }
};

/// Free-surface elevation sampled on the horizontal grid together with its
/// Fourier coefficients (FFTW convention, unnormalized).
struct SurfaceHeight {
    Field values;
    std::vector<std::complex<double>> spectral;
};

inline SurfaceHeight make_surface_height(const Domain& dom, Field values) {
    if (values.size() != static_cast<size_t>(dom.nh())) throw ContractError("surface height size mismatch");
    require_finite(values, "h");
    SurfaceHeight h;
    h.spectral = dom.spec.forward_level(values);
    h.values = std::move(values);
    return h;
}

}  // namespace fsns
