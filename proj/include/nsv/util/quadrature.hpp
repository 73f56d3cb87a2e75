#pragma once
// Adaptive Gauss-Kronrod (G7,K15) quadrature with bisection refinement.

#include <functional>

namespace nsv::util {

struct QuadResult {
    double value = 0.0;
    double error = 0.0;   // accumulated local error estimates
    int max_depth = 0;
};

// Integrates f over [a, b] (a < b or a > b both allowed) to relative
// tolerance rel_tol (floored by abs_tol on near-zero integrals).
QuadResult integrate_gk(const std::function<double(double)>& f, double a, double b,
                        double rel_tol = 1e-10, double abs_tol = 1e-14, int max_depth = 30);

} // namespace nsv::util
