#pragma once

#include <complex>
#include <cstring>

#include <fftw3.h>

#include "fsns/grid.hpp"

namespace fsns {

/// Batched horizontal Fourier transforms for one grid. Real fields are laid
/// out z-fastest (index ih*nz + iz); transforms act per z-level on all levels
/// at once. Plans use FFTW_ESTIMATE so results are reproducible run to run.
///
/// Not thread-safe: each instance owns scratch buffers.
class Spectral {
  public:
    explicit Spectral(const GridSpec& grid) : g_(&grid) {
        const int ny = grid.ny(), nz = grid.nz(), dh = grid.dim_h();
        nh_ = grid.nh();
        nz_ = nz;
        ncol_ = (dh == 1) ? ny / 2 + 1 : ny * (ny / 2 + 1);

        rbuf_ = fftw_alloc_real(static_cast<size_t>(nh_) * nz);
        cbuf_ = fftw_alloc_complex(static_cast<size_t>(ncol_) * nz);
        rlev_ = fftw_alloc_real(nh_);
        clev_ = fftw_alloc_complex(ncol_);

        int n[2] = {ny, ny};
        const int rank = dh;
        fwd_ = fftw_plan_many_dft_r2c(rank, n, nz, rbuf_, nullptr, nz, 1, cbuf_, nullptr, nz, 1,
                                      FFTW_ESTIMATE);
        bwd_ = fftw_plan_many_dft_c2r(rank, n, nz, cbuf_, nullptr, nz, 1, rbuf_, nullptr, nz, 1,
                                      FFTW_ESTIMATE);
        fwd_lev_ = fftw_plan_many_dft_r2c(rank, n, 1, rlev_, nullptr, 1, 1, clev_, nullptr, 1, 1,
                                          FFTW_ESTIMATE);
        bwd_lev_ = fftw_plan_many_dft_c2r(rank, n, 1, clev_, nullptr, 1, 1, rlev_, nullptr, 1, 1,
                                          FFTW_ESTIMATE);

        // Per-column wavenumbers and dealias mask (2/3 rule per direction).
        xi1_.resize(ncol_);
        xi2_.assign(ncol_, 0.0);
        keep_.resize(ncol_);
        nyq1_.resize(ncol_);
        nyq2_.assign(ncol_, false);
        const double k0 = 2 * pi / grid.length();
        const int kmax = ny / 3;
        if (dh == 1) {
            for (int ik = 0; ik <= ny / 2; ++ik) {
                xi1_[ik] = k0 * ik;
                keep_[ik] = (ik <= kmax);
                nyq1_[ik] = (ik == ny / 2);
            }
        } else {
            for (int i1 = 0; i1 < ny; ++i1) {
                const int m1 = (i1 <= ny / 2) ? i1 : i1 - ny;
                for (int ik = 0; ik <= ny / 2; ++ik) {
                    const int ic = i1 * (ny / 2 + 1) + ik;
                    xi1_[ic] = k0 * m1;
                    xi2_[ic] = k0 * ik;
                    keep_[ic] = (std::abs(m1) <= kmax && ik <= kmax);
                    nyq1_[ic] = (i1 == ny / 2);
                    nyq2_[ic] = (ik == ny / 2);
                }
            }
        }
    }

    ~Spectral() {
        fftw_destroy_plan(fwd_);
        fftw_destroy_plan(bwd_);
        fftw_destroy_plan(fwd_lev_);
        fftw_destroy_plan(bwd_lev_);
        fftw_free(rbuf_);
        fftw_free(cbuf_);
        fftw_free(rlev_);
        fftw_free(clev_);
    }

    Spectral(const Spectral&) = delete;
    Spectral& operator=(const Spectral&) = delete;

    int columns() const { return ncol_; }
    double xi1(int ic) const { return xi1_[ic]; }
    double xi2(int ic) const { return xi2_[ic]; }
    double xi_sq(int ic) const { return xi1_[ic] * xi1_[ic] + xi2_[ic] * xi2_[ic]; }

    /// Volume field -> spectral coefficients (unnormalized FFTW convention).
    std::vector<std::complex<double>> forward(const std::vector<double>& f) const {
        check_volume(f);
        std::memcpy(rbuf_, f.data(), f.size() * sizeof(double));
        fftw_execute(fwd_);
        std::vector<std::complex<double>> out(static_cast<size_t>(ncol_) * nz_);
        std::memcpy(out.data(), cbuf_, out.size() * sizeof(fftw_complex));
        return out;
    }

    /// Spectral coefficients -> volume field, normalized by nh.
    std::vector<double> inverse(const std::vector<std::complex<double>>& c) const {
        if (c.size() != static_cast<size_t>(ncol_) * nz_) throw ContractError("spectral size mismatch");
        std::memcpy(cbuf_, c.data(), c.size() * sizeof(fftw_complex));
        fftw_execute(bwd_);
        std::vector<double> out(static_cast<size_t>(nh_) * nz_);
        const double s = 1.0 / nh_;
        for (size_t i = 0; i < out.size(); ++i) out[i] = rbuf_[i] * s;
        return out;
    }

    std::vector<std::complex<double>> forward_level(const std::vector<double>& f) const {
        if (f.size() != static_cast<size_t>(nh_)) throw ContractError("surface size mismatch");
        std::memcpy(rlev_, f.data(), f.size() * sizeof(double));
        fftw_execute(fwd_lev_);
        std::vector<std::complex<double>> out(ncol_);
        std::memcpy(out.data(), clev_, out.size() * sizeof(fftw_complex));
        return out;
    }

    std::vector<double> inverse_level(const std::vector<std::complex<double>>& c) const {
        if (c.size() != static_cast<size_t>(ncol_)) throw ContractError("spectral size mismatch");
        std::memcpy(clev_, c.data(), c.size() * sizeof(fftw_complex));
        fftw_execute(bwd_lev_);
        std::vector<double> out(nh_);
        const double s = 1.0 / nh_;
        for (int i = 0; i < nh_; ++i) out[i] = rlev_[i] * s;
        return out;
    }

    /// Spectral horizontal derivative, dir in {0, 1}. Nyquist modes in the
    /// differentiated direction are zeroed (odd derivative of a real field).
    std::vector<double> deriv(const std::vector<double>& f, int dir) const {
        check_dir(dir);
        auto c = forward(f);
        for (int ic = 0; ic < ncol_; ++ic) {
            const bool nyq = dir == 0 ? nyq1_[ic] : nyq2_[ic];
            const std::complex<double> fac =
                nyq ? 0.0 : std::complex<double>(0.0, dir == 0 ? xi1_[ic] : xi2_[ic]);
            for (int iz = 0; iz < nz_; ++iz) c[static_cast<size_t>(ic) * nz_ + iz] *= fac;
        }
        return inverse(c);
    }

    std::vector<double> deriv_level(const std::vector<double>& f, int dir) const {
        check_dir(dir);
        auto c = forward_level(f);
        for (int ic = 0; ic < ncol_; ++ic) {
            const bool nyq = dir == 0 ? nyq1_[ic] : nyq2_[ic];
            const std::complex<double> fac =
                nyq ? 0.0 : std::complex<double>(0.0, dir == 0 ? xi1_[ic] : xi2_[ic]);
            c[ic] *= fac;
        }
        return inverse_level(c);
    }

    /// 2/3-rule truncation in place.
    void dealias(std::vector<double>& f) const {
        auto c = forward(f);
        for (int ic = 0; ic < ncol_; ++ic)
            if (!keep_[ic])
                for (int iz = 0; iz < nz_; ++iz) c[static_cast<size_t>(ic) * nz_ + iz] = 0.0;
        f = inverse(c);
    }

    void dealias_level(std::vector<double>& f) const {
        auto c = forward_level(f);
        for (int ic = 0; ic < ncol_; ++ic)
            if (!keep_[ic]) c[ic] = 0.0;
        f = inverse_level(c);
    }

  private:
    void check_volume(const std::vector<double>& f) const {
        if (f.size() != static_cast<size_t>(nh_) * nz_) throw ContractError("volume size mismatch");
    }
    static void check_dir(int dir) {
        if (dir != 0 && dir != 1) throw ContractError("horizontal direction must be 0 or 1");
    }

    const GridSpec* g_;
    int nh_ = 0, nz_ = 0, ncol_ = 0;
    std::vector<double> xi1_, xi2_;
    std::vector<char> keep_;
    std::vector<char> nyq1_, nyq2_;
    double* rbuf_ = nullptr;
    fftw_complex* cbuf_ = nullptr;
    double* rlev_ = nullptr;
    fftw_complex* clev_ = nullptr;
    fftw_plan fwd_{}, bwd_{}, fwd_lev_{}, bwd_lev_{};
};

}  // namespace fsns
