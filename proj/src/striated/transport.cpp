#include "nsv/striated/striated.hpp"

#include "nsv/simd/kernels.hpp"
#include "nsv/solver/muscl.hpp"

namespace nsv::striated {

namespace {

// L(X) = -div(u X) + (X.grad)u + X div u, the flux-form restatement of the
// advective transport-stretching law. The flux term reuses the limited
// finite-volume divergence; the sources are spectral in the frozen u.
struct StretchSource {
    spectral::GradTensor gt;
    ScalarField divu;

    StretchSource(Workspace& ws, const VectorField& u) : gt(u.grid()), divu(u.grid()) {
        spectral::SpecField c1 = spectral::fft(ws, u.x), c2 = spectral::fft(ws, u.y);
        spectral::grad_tensor(ws, c1, c2, gt);
        simd::axpby(divu.data(), 1.0, gt.dxux.data(), 1.0, gt.dyuy.data(), divu.size());
    }

    void rate(const VectorField& x, const VectorField& u, VectorField& out,
              ScalarField& scratch) const {
        const std::size_t n = out.x.size();
        solver::flux_divergence(x.x, u, scratch);
        // out.x = -div(u x1) + x.grad(u1) + x1 div u
        for (std::size_t i = 0; i < n; ++i)
            out.x[i] = -scratch[i] + x.x[i] * (gt.dxux[i] + divu[i]) + x.y[i] * gt.dyux[i];
        solver::flux_divergence(x.y, u, scratch);
        for (std::size_t i = 0; i < n; ++i)
            out.y[i] = -scratch[i] + x.x[i] * gt.dxuy[i] + x.y[i] * (gt.dyuy[i] + divu[i]);
    }
};

} // namespace

void transport_family(Workspace& ws, VectorFieldFamily& fam, const VectorField& u, double dt) {
    spectral::require_same(fam.grid(), u.grid());
    const StretchSource src(ws, u);
    const auto& g = fam.grid();
    VectorField k(g), s1(g), s2(g);
    ScalarField scratch(g);
    const std::size_t n = g.size();

    for (int m = 0; m < fam.size(); ++m) {
        VectorField& x = fam.member(m);
        src.rate(x, u, k, scratch);
        simd::axpby(s1.x.data(), 1.0, x.x.data(), dt, k.x.data(), n);
        simd::axpby(s1.y.data(), 1.0, x.y.data(), dt, k.y.data(), n);

        src.rate(s1, u, k, scratch);
        simd::axpby(s2.x.data(), 1.0, s1.x.data(), dt, k.x.data(), n);
        simd::axpby(s2.y.data(), 1.0, s1.y.data(), dt, k.y.data(), n);
        simd::axpby(s2.x.data(), 0.75, x.x.data(), 0.25, s2.x.data(), n);
        simd::axpby(s2.y.data(), 0.75, x.y.data(), 0.25, s2.y.data(), n);

        src.rate(s2, u, k, scratch);
        simd::axpby(s1.x.data(), 1.0, s2.x.data(), dt, k.x.data(), n);
        simd::axpby(s1.y.data(), 1.0, s2.y.data(), dt, k.y.data(), n);
        simd::axpby(x.x.data(), 1.0 / 3.0, x.x.data(), 2.0 / 3.0, s1.x.data(), n);
        simd::axpby(x.y.data(), 1.0 / 3.0, x.y.data(), 2.0 / 3.0, s1.y.data(), n);
    }
}

} // namespace nsv::striated
