#pragma once
// FFTW plan holder plus precomputed mode tables for one grid. Not shareable
// across threads: plans are executed through the new-array interface with
// per-workspace scratch. FFTW_ESTIMATE keeps planning deterministic.

#include "nsv/spectral/field.hpp"

#include <memory>

namespace nsv::spectral {

class Workspace {
public:
    explicit Workspace(const Grid& g);
    ~Workspace();
    Workspace(const Workspace&) = delete;
    Workspace& operator=(const Workspace&) = delete;

    const Grid& grid() const { return g_; }

    // out = normalized coefficients of f
    void forward(const ScalarField& f, SpecField& out);
    // reconstructs f from coefficients; input preserved (internal copy, c2r destroys)
    void inverse(const SpecField& c, ScalarField& out);

    // per-mode tables over the r2c layout (size spec_size)
    const double* kx2() const { return kx2_.data(); }      // kx^2
    const double* k2() const { return k2_.data(); }        // |k|^2
    const double* inv_k2() const { return inv_k2_.data(); } // 1/|k|^2, zero mode -> 0
    const double* mask23() const { return mask23_.data(); } // 2/3-rule keep mask (0/1)
    double kx_of(int ikx) const;                            // physical wavenumber
    double ky_of(int iy) const;
    // odd-derivative safety: 0 at the Nyquist index, else 1
    double nyq_x(int ikx) const { return ikx == g_.n / 2 ? 0.0 : 1.0; }
    double nyq_y(int iy) const { return iy == g_.n / 2 ? 0.0 : 1.0; }

private:
    Grid g_;
    struct Plans;
    std::unique_ptr<Plans> p_;
    Buffer kx2_, k2_, inv_k2_, mask23_;
};

} // namespace nsv::spectral
