#include "detail.hpp"

#include "nsv/simd/kernels.hpp"

namespace nsv::solver {

using namespace spectral;

namespace {

// l0 = mu*Lap(u) + (mu+lambda)*grad(div u), assembled per mode
void viscous_spec(Workspace& ws, const SpecField& u1h, const SpecField& u2h, double mu,
                  double lambda, SpecField& l1, SpecField& l2) {
    const Grid& g = ws.grid();
    const double* k2 = ws.k2();
    const int nkx = g.nkx();
    for (int iy = 0; iy < g.n; ++iy) {
        const double ky = ws.ky_of(iy) * ws.nyq_y(iy);
        for (int ikx = 0; ikx < nkx; ++ikx) {
            const double kx = ws.kx_of(ikx) * ws.nyq_x(ikx);
            const std::size_t m = u1h.midx(ikx, iy);
            const std::complex<double> a = u1h.at(m), b = u2h.at(m);
            // i*(k.u); the Nyquist columns of the odd factors are zeroed above
            const std::complex<double> idiv(-(kx * a.imag() + ky * b.imag()),
                                            kx * a.real() + ky * b.real());
            const std::complex<double> ikdx(0.0, kx), ikdy(0.0, ky);
            l1.set(m, -mu * k2[m] * a + (mu + lambda) * ikdx * idiv);
            l2.set(m, -mu * k2[m] * b + (mu + lambda) * ikdy * idiv);
        }
    }
}

} // namespace

namespace detail {

double mask_energy(Workspace& ws, SpecField& spec) {
    const Grid& g = spec.grid();
    const double* mask = ws.mask23();
    const int nkx = g.nkx();
    double removed = 0.0;
    for (int iy = 0; iy < g.n; ++iy) {
        for (int ikx = 0; ikx < nkx; ++ikx) {
            const std::size_t m = spec.midx(ikx, iy);
            if (mask[m] != 0.0) continue;
            const double colw = (ikx == 0 || ikx == g.n / 2) ? 1.0 : 2.0;
            const std::complex<double> c = spec.at(m);
            removed += colw * (c.real() * c.real() + c.imag() * c.imag());
            spec.set(m, {0.0, 0.0});
        }
    }
    return removed * g.L * g.L;
}

void nonlinear_tendency(Workspace& ws, TendencyScratch& s, const ScalarField& rho,
                        const VectorField& u, const SpecField& u1h, const SpecField& u2h,
                        const thermo::PressureLaw& law, double mu, double lambda, double beta,
                        double rho_floor, bool dealias, double* removed, SpecField& n1h,
                        SpecField& n2h) {
    const std::size_t n = rho.size();
    grad_tensor(ws, u1h, u2h, s.gt);
    simd::recip_clamped(s.w.data(), rho.data(), rho_floor, n);

    s.g = law.g_field(rho);
    ws.forward(s.g, s.gh);
    grad_from_spec(ws, s.gh, s.gg);

    viscous_spec(ws, u1h, u2h, mu, lambda, s.l0xh, s.l0yh);
    ws.inverse(s.l0xh, s.l0x);
    ws.inverse(s.l0yh, s.l0y);

    const ScalarField* du[2][2] = {{&s.gt.dxux, &s.gt.dyux}, {&s.gt.dxuy, &s.gt.dyuy}};
    const ScalarField* l0[2] = {&s.l0x, &s.l0y};
    const ScalarField* gg[2] = {&s.gg.x, &s.gg.y};
    SpecField* out[2] = {&n1h, &n2h};

    for (int c = 0; c < 2; ++c) {
        simd::mul(s.adv.data(), u.x.data(), du[c][0]->data(), n);
        simd::prod_axpz(s.adv.data(), 1.0, u.y.data(), du[c][1]->data(), s.adv.data(), n);
        ws.forward(s.adv, *out[c]);
        if (dealias) *removed += mask_energy(ws, *out[c]);

        // explicit real remainder: w*(l0 - grad G) - beta*l0
        simd::axpby(s.adv.data(), 1.0, l0[c]->data(), -1.0, gg[c]->data(), n);
        simd::mul(s.adv.data(), s.adv.data(), s.w.data(), n);
        simd::axpby(s.adv.data(), 1.0, s.adv.data(), -beta, l0[c]->data(), n);
        ws.forward(s.adv, s.tmp);
        simd::axpby(out[c]->raw(), 1.0, s.tmp.raw(), -1.0, out[c]->raw(), 2 * s.tmp.modes());
        // real-space products would otherwise reseed the non-invertible
        // Nyquist lines with truncation dust; they sit inside the 2/3 band
        zero_nyquist_spec(*out[c]);
    }
}

} // namespace detail

VectorField momentum_rhs(Workspace& ws, const ScalarField& rho, const VectorField& u,
                         const thermo::PressureLaw& law, double mu, double lambda) {
    require_same(rho.grid(), u.grid());
    require_same(rho.grid(), ws.grid());
    const Grid& g = rho.grid();
    SpecField u1h = fft(ws, u.x), u2h = fft(ws, u.y);
    SpecField l1(g), l2(g);
    viscous_spec(ws, u1h, u2h, mu, lambda, l1, l2);
    VectorField out(g);
    ws.inverse(l1, out.x);
    ws.inverse(l2, out.y);

    ScalarField gfield = law.g_field(rho);
    VectorField gg(g);
    grad(ws, gfield, gg);
    simd::axpby(out.x.data(), 1.0, out.x.data(), -1.0, gg.x.data(), out.x.size());
    simd::axpby(out.y.data(), 1.0, out.y.data(), -1.0, gg.y.data(), out.y.size());
    return out;
}

VectorField material_derivative(Workspace& ws, const ScalarField& rho, const VectorField& u,
                                const thermo::PressureLaw& law, double mu, double lambda,
                                double rho_floor, long* vacuum_cells) {
    VectorField a = momentum_rhs(ws, rho, u, law, mu, lambda);
    const std::size_t n = rho.size();
    long flagged = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (rho[i] < rho_floor) {
            a.x[i] = 0.0;
            a.y[i] = 0.0;
            ++flagged;
        } else {
            a.x[i] /= rho[i];
            a.y[i] /= rho[i];
        }
    }
    if (vacuum_cells) *vacuum_cells = flagged;
    return a;
}

} // namespace nsv::solver
