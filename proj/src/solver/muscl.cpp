#include "nsv/solver/muscl.hpp"
#include "nsv/simd/kernels.hpp"

#include <stdexcept>
#include <vector>

namespace nsv::solver {

using spectral::ScalarField;
using spectral::VectorField;

void flux_divergence(const ScalarField& q, const VectorField& u, ScalarField& out) {
    spectral::require_same(q.grid(), u.grid());
    spectral::require_same(q.grid(), out.grid());
    if (q.data() == out.data()) throw std::invalid_argument("flux_divergence: out aliases input");
    const int n = q.grid().n;
    const double invh = 1.0 / q.grid().h();

    // x sweep: padded row gives the four shifted stencil views in one pass
    std::vector<double> row(n + 3), uf(n), fx(n);
    std::vector<double> fxall(q.size());
    for (int j = 0; j < n; ++j) {
        const double* qr = q.data() + static_cast<std::size_t>(j) * n;
        const double* ur = u.x.data() + static_cast<std::size_t>(j) * n;
        row[0] = qr[n - 1];
        for (int i = 0; i < n; ++i) row[i + 1] = qr[i];
        row[n + 1] = qr[0];
        row[n + 2] = qr[1];
        for (int i = 0; i < n; ++i) uf[i] = 0.5 * (ur[i] + ur[(i + 1) % n]);
        // face i+1/2 for i = 0..n-1
        simd::muscl_flux(fx.data(), &row[0], &row[1], &row[2], &row[3], uf.data(), n);
        double* dst = fxall.data() + static_cast<std::size_t>(j) * n;
        for (int i = 0; i < n; ++i) dst[i] = fx[i];
    }

    // y sweep: rows are contiguous, stencil views are row pointers
    std::vector<double> vf(n), fyrow(n);
    std::vector<double> fyall(q.size());
    for (int j = 0; j < n; ++j) {
        const int jp = (j + 1) % n;
        const int jm = (j + n - 1) % n, jq = (j + 2) % n;
        const double* rm = q.data() + static_cast<std::size_t>(jm) * n;
        const double* r0 = q.data() + static_cast<std::size_t>(j) * n;
        const double* rp = q.data() + static_cast<std::size_t>(jp) * n;
        const double* rq = q.data() + static_cast<std::size_t>(jq) * n;
        const double* v0 = u.y.data() + static_cast<std::size_t>(j) * n;
        const double* v1 = u.y.data() + static_cast<std::size_t>(jp) * n;
        simd::axpby(vf.data(), 0.5, v0, 0.5, v1, n);
        simd::muscl_flux(fyrow.data(), rm, r0, rp, rq, vf.data(), n);
        double* dst = fyall.data() + static_cast<std::size_t>(j) * n;
        for (int i = 0; i < n; ++i) dst[i] = fyrow[i];
    }

    for (int j = 0; j < n; ++j) {
        const int jm = (j + n - 1) % n;
        const double* fxr = fxall.data() + static_cast<std::size_t>(j) * n;
        const double* fy0 = fyall.data() + static_cast<std::size_t>(jm) * n;  // face j-1/2
        const double* fy1 = fyall.data() + static_cast<std::size_t>(j) * n;   // face j+1/2
        double* o = out.data() + static_cast<std::size_t>(j) * n;
        for (int i = 0; i < n; ++i) {
            const int im = (i + n - 1) % n;
            o[i] = invh * (fxr[i] - fxr[im] + fy1[i] - fy0[i]);
        }
    }
}

void fv_euler(const ScalarField& q, const VectorField& u, double dt, ScalarField& out) {
    flux_divergence(q, u, out);
    simd::axpby(out.data(), 1.0, q.data(), -dt, out.data(), out.size());
}

ScalarField advect_density(const ScalarField& rho, const VectorField& u, double dt) {
    const auto& g = rho.grid();
    ScalarField q1(g), q2(g), tmp(g);
    fv_euler(rho, u, dt, q1);
    fv_euler(q1, u, dt, tmp);
    simd::axpby(q2.data(), 0.75, rho.data(), 0.25, tmp.data(), q2.size());
    fv_euler(q2, u, dt, tmp);
    ScalarField out(g);
    simd::axpby(out.data(), 1.0 / 3.0, rho.data(), 2.0 / 3.0, tmp.data(), out.size());
    return out;
}

} // namespace nsv::solver
