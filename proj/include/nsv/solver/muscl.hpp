#pragma once
// Conservative finite-volume transport: second-order MUSCL reconstruction
// with minmod limiting, unsplit flux-form update on the periodic grid. Face
// velocities are arithmetic means of the adjacent node values. Mass is
// conserved to round-off by construction.

#include "nsv/spectral/field.hpp"

namespace nsv::solver {

// out = div(q u) assembled from the limited face fluxes. out may not alias q.
// Grid sum of the result telescopes to zero exactly.
void flux_divergence(const spectral::ScalarField& q, const spectral::VectorField& u,
                     spectral::ScalarField& out);

// One forward-Euler update: out = q - dt*div(flux(q, u)). out may not alias q.
void fv_euler(const spectral::ScalarField& q, const spectral::VectorField& u, double dt,
              spectral::ScalarField& out);

// Full SSP-RK3 (Shu-Osher) transport step under a frozen velocity field.
spectral::ScalarField advect_density(const spectral::ScalarField& rho,
                                     const spectral::VectorField& u, double dt);

} // namespace nsv::solver
