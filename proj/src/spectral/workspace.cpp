#include "nsv/spectral/workspace.hpp"
#include "nsv/simd/kernels.hpp"

#include <fftw3.h>

#include <cmath>

namespace nsv::spectral {

struct Workspace::Plans {
    fftw_plan r2c = nullptr;
    fftw_plan c2r = nullptr;
    double* real_buf = nullptr;
    fftw_complex* cplx_buf = nullptr;
    ~Plans() {
        if (r2c) fftw_destroy_plan(r2c);
        if (c2r) fftw_destroy_plan(c2r);
        if (real_buf) fftw_free(real_buf);
        if (cplx_buf) fftw_free(cplx_buf);
    }
};

Workspace::Workspace(const Grid& g) : g_(g), p_(new Plans) {
    const int n = g_.n;
    p_->real_buf = fftw_alloc_real(g_.size());
    p_->cplx_buf = fftw_alloc_complex(g_.spec_size());
    // Planned on scratch, executed on caller arrays via the new-array API.
    // All field buffers are 64-byte aligned, at least as aligned as scratch.
    p_->r2c = fftw_plan_dft_r2c_2d(n, n, p_->real_buf, p_->cplx_buf, FFTW_ESTIMATE);
    p_->c2r = fftw_plan_dft_c2r_2d(n, n, p_->cplx_buf, p_->real_buf, FFTW_ESTIMATE);
    if (!p_->r2c || !p_->c2r) throw std::runtime_error("fftw planning failed");

    const std::size_t m = g_.spec_size();
    kx2_.resize(m);
    k2_.resize(m);
    inv_k2_.resize(m);
    mask23_.resize(m);
    const int cutoff = n / 3;  // keep modes with max(|j1|,|j2|) <= n/3
    for (int iy = 0; iy < n; ++iy) {
        const double ky = g_.wave(iy);
        const int my = std::abs(g_.mode(iy));
        for (int ix = 0; ix < g_.nkx(); ++ix) {
            const double kx = 2.0 * M_PI / g_.L * ix;
            const std::size_t i = static_cast<std::size_t>(iy) * g_.nkx() + ix;
            kx2_[i] = kx * kx;
            k2_[i] = kx * kx + ky * ky;
            inv_k2_[i] = k2_[i] > 0.0 ? 1.0 / k2_[i] : 0.0;
            mask23_[i] = (ix <= cutoff && my <= cutoff) ? 1.0 : 0.0;
        }
    }
}

Workspace::~Workspace() = default;

double Workspace::kx_of(int ikx) const { return 2.0 * M_PI / g_.L * ikx; }
double Workspace::ky_of(int iy) const { return g_.wave(iy); }

void Workspace::forward(const ScalarField& f, SpecField& out) {
    require_same(f.grid(), g_);
    require_same(out.grid(), g_);
    // r2c preserves input; buffers are compatible with the plan's alignment
    fftw_execute_dft_r2c(p_->r2c,
                         const_cast<double*>(f.data()),
                         reinterpret_cast<fftw_complex*>(out.raw()));
    const double norm = 1.0 / (static_cast<double>(g_.n) * g_.n);
    simd::scale(out.raw(), norm, out.raw(), 2 * g_.spec_size());
}

void Workspace::inverse(const SpecField& c, ScalarField& out) {
    require_same(c.grid(), g_);
    require_same(out.grid(), g_);
    // multidimensional c2r destroys its input: run from workspace scratch
    const std::size_t m = 2 * g_.spec_size();
    double* scratch = reinterpret_cast<double*>(p_->cplx_buf);
    for (std::size_t i = 0; i < m; ++i) scratch[i] = c.raw()[i];
    fftw_execute_dft_c2r(p_->c2r, p_->cplx_buf, out.data());
}

} // namespace nsv::spectral
