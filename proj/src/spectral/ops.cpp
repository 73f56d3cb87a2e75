#include "nsv/spectral/ops.hpp"
#include "nsv/simd/kernels.hpp"

#include <cmath>
#include <stdexcept>

namespace nsv::spectral {

namespace {

// out = i*kx * in (zero at the x-Nyquist column)
void apply_ddx(Workspace& ws, const SpecField& in, SpecField& out) {
    const Grid& g = in.grid();
    const int nkx = g.nkx();
    for (int iy = 0; iy < g.n; ++iy) {
        for (int ix = 0; ix < nkx; ++ix) {
            const std::size_t m = static_cast<std::size_t>(iy) * nkx + ix;
            const double kx = ws.kx_of(ix) * ws.nyq_x(ix);
            const double re = in.raw()[2 * m], im = in.raw()[2 * m + 1];
            out.raw()[2 * m] = -kx * im;
            out.raw()[2 * m + 1] = kx * re;
        }
    }
}

void apply_ddy(Workspace& ws, const SpecField& in, SpecField& out) {
    const Grid& g = in.grid();
    const int nkx = g.nkx();
    for (int iy = 0; iy < g.n; ++iy) {
        const double ky = ws.ky_of(iy) * ws.nyq_y(iy);
        for (int ix = 0; ix < nkx; ++ix) {
            const std::size_t m = static_cast<std::size_t>(iy) * nkx + ix;
            const double re = in.raw()[2 * m], im = in.raw()[2 * m + 1];
            out.raw()[2 * m] = -ky * im;
            out.raw()[2 * m + 1] = ky * re;
        }
    }
}

// r2c column weight for Parseval sums: interior columns represent two modes
double col_weight(const Grid& g, int ix) {
    return (ix == 0 || ix == g.n / 2) ? 1.0 : 2.0;
}

} // namespace

SpecField fft(Workspace& ws, const ScalarField& f) {
    SpecField c(f.grid());
    ws.forward(f, c);
    return c;
}

ScalarField ifft(Workspace& ws, const SpecField& c) {
    ScalarField f(c.grid());
    ws.inverse(c, f);
    return f;
}

void grad(Workspace& ws, const ScalarField& f, VectorField& out) {
    SpecField c = fft(ws, f);
    grad_from_spec(ws, c, out);
}

void grad_from_spec(Workspace& ws, const SpecField& c, VectorField& out) {
    SpecField t(c.grid());
    apply_ddx(ws, c, t);
    ws.inverse(t, out.x);
    apply_ddy(ws, c, t);
    ws.inverse(t, out.y);
}

ScalarField div_from_spec(Workspace& ws, const SpecField& u1, const SpecField& u2) {
    const Grid& g = u1.grid();
    SpecField t(g), t2(g);
    apply_ddx(ws, u1, t);
    apply_ddy(ws, u2, t2);
    simd::axpby(t.raw(), 1.0, t.raw(), 1.0, t2.raw(), 2 * g.spec_size());
    return ifft(ws, t);
}

ScalarField div(Workspace& ws, const VectorField& u) {
    SpecField c1 = fft(ws, u.x), c2 = fft(ws, u.y);
    return div_from_spec(ws, c1, c2);
}

ScalarField rot_from_spec(Workspace& ws, const SpecField& u1, const SpecField& u2) {
    const Grid& g = u1.grid();
    SpecField t(g), t2(g);
    apply_ddx(ws, u2, t);
    apply_ddy(ws, u1, t2);
    simd::axpby(t.raw(), 1.0, t.raw(), -1.0, t2.raw(), 2 * g.spec_size());
    return ifft(ws, t);
}

ScalarField rot(Workspace& ws, const VectorField& u) {
    SpecField c1 = fft(ws, u.x), c2 = fft(ws, u.y);
    return rot_from_spec(ws, c1, c2);
}

ScalarField laplacian(Workspace& ws, const ScalarField& f) {
    SpecField c = fft(ws, f);
    const std::size_t m = c.modes();
    for (std::size_t i = 0; i < m; ++i) {
        c.raw()[2 * i] *= -ws.k2()[i];
        c.raw()[2 * i + 1] *= -ws.k2()[i];
    }
    return ifft(ws, c);
}

VectorField perp_grad(Workspace& ws, const ScalarField& f) {
    VectorField gradf(f.grid());
    grad(ws, f, gradf);
    VectorField out(f.grid());
    // (d2 f, -d1 f)
    out.x = gradf.y;
    simd::scale(out.y.data(), -1.0, gradf.x.data(), gradf.x.size());
    return out;
}

void grad_tensor(Workspace& ws, const SpecField& u1, const SpecField& u2, GradTensor& out) {
    SpecField t(u1.grid());
    apply_ddx(ws, u1, t);
    ws.inverse(t, out.dxux);
    apply_ddy(ws, u1, t);
    ws.inverse(t, out.dyux);
    apply_ddx(ws, u2, t);
    ws.inverse(t, out.dxuy);
    apply_ddy(ws, u2, t);
    ws.inverse(t, out.dyuy);
}

void inverse_neg_laplacian_spec(Workspace& ws, SpecField& c) {
    simd::cmul_real(c.raw(), ws.inv_k2(), c.modes());
}

ScalarField inverse_neg_laplacian(Workspace& ws, const ScalarField& f) {
    SpecField c = fft(ws, f);
    inverse_neg_laplacian_spec(ws, c);
    return ifft(ws, c);
}

void riesz_spec(Workspace& ws, int j, int k, SpecField& c) {
    if (j < 1 || j > 2 || k < 1 || k > 2)
        throw std::invalid_argument("riesz: component indices must be 1 or 2");
    const Grid& g = c.grid();
    const int nkx = g.nkx();
    for (int iy = 0; iy < g.n; ++iy) {
        const double ky = ws.ky_of(iy);
        for (int ix = 0; ix < nkx; ++ix) {
            const std::size_t m = static_cast<std::size_t>(iy) * nkx + ix;
            const double kx = ws.kx_of(ix);
            const double kj = (j == 1) ? kx : ky;
            const double kk = (k == 1) ? kx : ky;
            const double mult = kj * kk * ws.inv_k2()[m];  // +kj*kk/|k|^2, 0 at k=0
            c.raw()[2 * m] *= mult;
            c.raw()[2 * m + 1] *= mult;
        }
    }
}

ScalarField riesz(Workspace& ws, int j, int k, const ScalarField& f) {
    SpecField c = fft(ws, f);
    riesz_spec(ws, j, k, c);
    return ifft(ws, c);
}

void hodge(Workspace& ws, const VectorField& u, VectorField& grad_part, VectorField& sol_part) {
    const Grid& g = u.grid();
    SpecField c1 = fft(ws, u.x), c2 = fft(ws, u.y);
    SpecField g1(g), g2(g);
    const int nkx = g.nkx();
    for (int iy = 0; iy < g.n; ++iy) {
        const double ky = ws.ky_of(iy) * ws.nyq_y(iy);
        for (int ix = 0; ix < nkx; ++ix) {
            const std::size_t m = static_cast<std::size_t>(iy) * nkx + ix;
            const double kx = ws.kx_of(ix) * ws.nyq_x(ix);
            // wavenumbers follow the odd-derivative convention so the split is
            // exact under the discrete div and rot; zero mode and the pure
            // Nyquist corner stay with the solenoidal part
            const double kk = kx * kx + ky * ky;
            const double w = kk > 0.0 ? 1.0 / kk : 0.0;
            const double dre = (kx * c1.raw()[2 * m] + ky * c2.raw()[2 * m]) * w;
            const double dim = (kx * c1.raw()[2 * m + 1] + ky * c2.raw()[2 * m + 1]) * w;
            g1.raw()[2 * m] = kx * dre;
            g1.raw()[2 * m + 1] = kx * dim;
            g2.raw()[2 * m] = ky * dre;
            g2.raw()[2 * m + 1] = ky * dim;
            c1.raw()[2 * m] -= g1.raw()[2 * m];
            c1.raw()[2 * m + 1] -= g1.raw()[2 * m + 1];
            c2.raw()[2 * m] -= g2.raw()[2 * m];
            c2.raw()[2 * m + 1] -= g2.raw()[2 * m + 1];
        }
    }
    ws.inverse(g1, grad_part.x);
    ws.inverse(g2, grad_part.y);
    ws.inverse(c1, sol_part.x);
    ws.inverse(c2, sol_part.y);
}

void project_solenoidal(Workspace& ws, VectorField& u) {
    VectorField gp(u.grid()), sp(u.grid());
    hodge(ws, u, gp, sp);
    u = sp;
}

void dealias_spec(Workspace& ws, SpecField& c) {
    simd::cmul_real(c.raw(), ws.mask23(), c.modes());
}

void dealias(Workspace& ws, ScalarField& f) {
    SpecField c = fft(ws, f);
    dealias_spec(ws, c);
    ws.inverse(c, f);
}

void zero_nyquist_spec(SpecField& c) {
    const Grid& g = c.grid();
    const int ny = g.n / 2;
    for (int iy = 0; iy < g.n; ++iy) c.set(c.midx(ny, iy), {0.0, 0.0});
    for (int ikx = 0; ikx < g.nkx(); ++ikx) c.set(c.midx(ikx, ny), {0.0, 0.0});
}

double parseval_l2_sq(Workspace& ws, const SpecField& c) {
    const Grid& g = c.grid();
    const int nkx = g.nkx();
    double s = 0.0;
    for (int iy = 0; iy < g.n; ++iy) {
        for (int ix = 0; ix < nkx; ++ix) {
            const std::size_t m = static_cast<std::size_t>(iy) * nkx + ix;
            const double re = c.raw()[2 * m], im = c.raw()[2 * m + 1];
            s += col_weight(g, ix) * (re * re + im * im);
        }
    }
    return g.L * g.L * s;
}

double norm_hminus1(Workspace& ws, const ScalarField& f) {
    SpecField c = fft(ws, f);
    const Grid& g = f.grid();
    const int nkx = g.nkx();
    double s = 0.0;
    for (int iy = 0; iy < g.n; ++iy) {
        for (int ix = 0; ix < nkx; ++ix) {
            const std::size_t m = static_cast<std::size_t>(iy) * nkx + ix;
            const double re = c.raw()[2 * m], im = c.raw()[2 * m + 1];
            s += col_weight(g, ix) * (re * re + im * im) * ws.inv_k2()[m];
        }
    }
    return std::sqrt(g.L * g.L * s);
}

double norm_hminus1_vec(Workspace& ws, const VectorField& u) {
    const double a = norm_hminus1(ws, u.x), b = norm_hminus1(ws, u.y);
    return std::sqrt(a * a + b * b);
}

double top_third_fraction(Workspace& ws, const ScalarField& f) {
    SpecField c = fft(ws, f);
    const Grid& g = f.grid();
    const int nkx = g.nkx();
    double total = 0.0, top = 0.0;
    for (int iy = 0; iy < g.n; ++iy) {
        for (int ix = 0; ix < nkx; ++ix) {
            const std::size_t m = static_cast<std::size_t>(iy) * nkx + ix;
            const double re = c.raw()[2 * m], im = c.raw()[2 * m + 1];
            const double e = col_weight(g, ix) * (re * re + im * im);
            total += e;
            if (ws.mask23()[m] == 0.0) top += e;
        }
    }
    return total > 0.0 ? top / total : 0.0;
}

} // namespace nsv::spectral
