#pragma once
// Density-patch construction and Lagrangian interface tracking: a closed
// trigonometric-polynomial boundary curve, marker sampling, exact polyline
// signed distance, the C2 density ramp, the two-member tangential family,
// marker advection under the flow, and interface regularity metrics.

#include "nsv/spectral/ops.hpp"
#include "nsv/striated/striated.hpp"

#include <vector>

namespace nsv::patch {

using spectral::Grid;
using spectral::ScalarField;
using spectral::VectorField;

struct PatchSpec {
    struct Harmonic {
        int k = 1;
        double cos_amp = 0.0;
        double sin_amp = 0.0;
    };
    double cx = 0.0, cy = 0.0;            // constant terms of the curve series
    std::vector<Harmonic> x_modes, y_modes;
    double alpha = 2.0;                   // interior density (0 allowed: vacuum patch)
    double rho_tilde = 1.0;
    double edge_width = 0.0;              // mollification width; <= 0 means 3h
    double chi_radius = 0.35;             // taper/cutoff scale of the family

    static PatchSpec disc(double cx, double cy, double r);
    static PatchSpec ellipse(double cx, double cy, double rx, double ry);

    void eval(double theta, double& x, double& y) const;
    void eval_deriv(double theta, double& dx, double& dy) const;
};

// Ordered closed marker chain; counterclockwise (interior on the left).
struct MarkerCurve {
    std::vector<double> x, y;
    int size() const { return static_cast<int>(x.size()); }
};

// Uniform-in-arclength sampling, n_markers >= 256 (raised to meet spacing).
MarkerCurve sample_markers(const PatchSpec& spec, const Grid& g, int n_markers = 0);

// Exact polyline distance with inside/outside from scanline parity. d > 0
// inside. Nodes farther than band get d = +-(band + h) and zero direction
// vectors; within band, grad_d is the unit inward-pointing distance gradient
// and tangent the curve tangent at the nearest point.
struct SignedDistance {
    ScalarField d;
    VectorField grad_d;
    VectorField tangent;
};
SignedDistance signed_distance(const MarkerCurve& c, const Grid& g, double band);

// rho = rho_tilde + (alpha - rho_tilde) * ramp(d / w), quintic C2 ramp,
// exactly alpha where d >= w/2 and rho_tilde where d <= -w/2.
ScalarField build_patch_density(const PatchSpec& spec, const Grid& g);

// m = 2 family: X1 = T'(d) * curve tangent (unit strength through
// |d| <= 1.2*chi_radius, tapered to zero by 2*chi_radius), X2 = the rotated
// gradient of chi(x)*x1 with chi ramping 0 -> 1 over [0.6, 1.2]*chi_radius.
// Their supports overlap so I(family) stays near 1.
striated::VectorFieldFamily build_tangential_family(const PatchSpec& spec, const Grid& g,
                                                    double p = 4.0);

// Periodic Catmull-Rom interpolation of a grid field at a physical point.
double interp_bicubic(const ScalarField& f, double x, double y);

// One RK3 pass per marker through the frozen velocity (bicubic samples),
// then spacing-triggered arclength resampling. Throws if a marker leaves the
// [L/8, 7L/8] safety margin.
struct AdvectReport {
    bool resampled = false;
    int n_markers = 0;
};
AdvectReport advect_markers(MarkerCurve& c, const VectorField& u, double dt);

struct RegularityReport {
    double w2p_seminorm = 0.0;   // (integral |gamma''|^p ds)^(1/p), arclength param
    double arclength = 0.0;
    double curvature_max = 0.0;
    bool self_intersecting = false;
};
RegularityReport interface_regularity(const MarkerCurve& c, double p);

// max over markers of |X1.n| / |X1|, n the spline normal of the curve
double tangency_error(const MarkerCurve& c, const VectorField& x1);

} // namespace nsv::patch
