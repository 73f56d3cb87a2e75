#include "nsv/patch/patch.hpp"

#include <cmath>
#include <stdexcept>

namespace nsv::patch {

namespace {

// quintic smoothstep: C2 at both ends, S(0) = 0, S(1) = 1
double smooth5(double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    return ((6.0 * x - 15.0) * x + 10.0) * x * x * x;
}

double smooth5_deriv(double x) {
    if (x <= 0.0 || x >= 1.0) return 0.0;
    return ((30.0 * x - 60.0) * x + 30.0) * x * x;
}

} // namespace

ScalarField build_patch_density(const PatchSpec& spec, const Grid& g) {
    if (spec.alpha < 0.0) throw std::invalid_argument("patch: alpha must be >= 0");
    if (!(spec.rho_tilde > 0.0)) throw std::invalid_argument("patch: rho_tilde must be > 0");
    const double w = spec.edge_width > 0.0 ? spec.edge_width : 3.0 * g.h();
    const MarkerCurve c = sample_markers(spec, g);
    const SignedDistance sd = signed_distance(c, g, w);
    ScalarField rho(g);
    for (std::size_t i = 0; i < rho.size(); ++i)
        rho[i] = spec.rho_tilde + (spec.alpha - spec.rho_tilde) * smooth5(sd.d[i] / w + 0.5);
    return rho;
}

striated::VectorFieldFamily build_tangential_family(const PatchSpec& spec, const Grid& g,
                                                    double p) {
    const double c = spec.chi_radius;
    if (!(c > 2.0 * g.h()))
        throw std::invalid_argument("patch: chi_radius must exceed 2h to be resolvable");
    const MarkerCurve curve = sample_markers(spec, g);
    const SignedDistance sd = signed_distance(curve, g, 2.0 * c + g.h());

    VectorField x1(g), x2(g);
    for (int iy = 0; iy < g.n; ++iy) {
        for (int ix = 0; ix < g.n; ++ix) {
            const std::size_t id = g.idx(ix, iy);
            const double d = sd.d[id];
            const double ad = std::fabs(d);

            // member 1: unit tangent through |d| <= 1.2c, tapered out by 2c
            const double tau = ad <= 1.2 * c ? 1.0 : smooth5((2.0 * c - ad) / (0.8 * c));
            x1.x[id] = tau * sd.tangent.x[id];
            x1.y[id] = tau * sd.tangent.y[id];

            // member 2: rotated gradient of chi * x-coordinate; chi vanishes
            // near the interface and saturates at 1 where member 1 tapers
            const double arg = (ad - 0.6 * c) / (0.6 * c);
            const double chi = smooth5(arg);
            const double dchi = smooth5_deriv(arg) / (0.6 * c);
            const double sgn = d >= 0.0 ? 1.0 : -1.0;
            const double cx = dchi * sgn * sd.grad_d.x[id];
            const double cy = dchi * sgn * sd.grad_d.y[id];
            const double xc = g.x(ix);
            x2.x[id] = xc * cy;
            x2.y[id] = -chi - xc * cx;
        }
    }
    std::vector<VectorField> members;
    members.push_back(std::move(x1));
    members.push_back(std::move(x2));
    return striated::VectorFieldFamily(std::move(members), p);
}

} // namespace nsv::patch
