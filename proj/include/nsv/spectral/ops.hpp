#pragma once
// Spectral derivative/inversion primitives and grid-sum norms. Norm semantics:
// Lq(f) = (h^2 sum |f|^q)^(1/q), Linf = grid max. Zero mode of (-Delta)^{-1}
// and the Riesz multipliers is defined as 0. perp_grad(f) = (d2 f, -d1 f).

#include "nsv/spectral/field.hpp"
#include "nsv/spectral/workspace.hpp"

namespace nsv::spectral {

// --- pointwise helpers / reductions (no transforms) ---
double mean(const ScalarField& f);
double mass(const ScalarField& f);                 // h^2 sum f
double norm_l2(const ScalarField& f);
double norm_lp(const ScalarField& f, double p);    // p >= 1, finite
double norm_linf(const ScalarField& f);
double min_value(const ScalarField& f);
double max_value(const ScalarField& f);

// --- transforms ---
SpecField fft(Workspace& ws, const ScalarField& f);
ScalarField ifft(Workspace& ws, const SpecField& c);

// --- derivatives ---
void grad(Workspace& ws, const ScalarField& f, VectorField& out);
void grad_from_spec(Workspace& ws, const SpecField& c, VectorField& out);
ScalarField div(Workspace& ws, const VectorField& u);
ScalarField div_from_spec(Workspace& ws, const SpecField& u1, const SpecField& u2);
ScalarField rot(Workspace& ws, const VectorField& u);   // d1 u2 - d2 u1
ScalarField rot_from_spec(Workspace& ws, const SpecField& u1, const SpecField& u2);
ScalarField laplacian(Workspace& ws, const ScalarField& f);
VectorField perp_grad(Workspace& ws, const ScalarField& f);

struct GradTensor {
    ScalarField dxux, dyux, dxuy, dyuy;
    explicit GradTensor(const Grid& g) : dxux(g), dyux(g), dxuy(g), dyuy(g) {}
};
void grad_tensor(Workspace& ws, const SpecField& u1, const SpecField& u2, GradTensor& out);

// --- inversions / projections ---
ScalarField inverse_neg_laplacian(Workspace& ws, const ScalarField& f);
void inverse_neg_laplacian_spec(Workspace& ws, SpecField& c);      // in place
ScalarField riesz(Workspace& ws, int j, int k, const ScalarField& f);
void riesz_spec(Workspace& ws, int j, int k, SpecField& c);        // in place
void hodge(Workspace& ws, const VectorField& u, VectorField& grad_part, VectorField& sol_part);
void project_solenoidal(Workspace& ws, VectorField& u);            // keeps the mean
void dealias(Workspace& ws, ScalarField& f);
void dealias_spec(Workspace& ws, SpecField& c);
// zero the ikx = n/2 column and iy = n/2 row, where the odd-derivative
// convention makes first derivatives non-invertible
void zero_nyquist_spec(SpecField& c);

// --- spectral measurements ---
double parseval_l2_sq(Workspace& ws, const SpecField& c);          // equals h^2 sum f^2
double norm_hminus1(Workspace& ws, const ScalarField& f);          // zero mode dropped
double norm_hminus1_vec(Workspace& ws, const VectorField& u);
// fraction of the L2 energy carried by modes with max(|j1|,|j2|) > n/3
double top_third_fraction(Workspace& ws, const ScalarField& f);

} // namespace nsv::spectral
