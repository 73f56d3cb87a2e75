#include "nsv/util/quadrature.hpp"

#include <cmath>

namespace nsv::util {

namespace {

// QUADPACK G7-K15 abscissae/weights on [-1, 1]; nodes listed for x >= 0.
const double XGK[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};
const double WGK[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};
const double WG[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

struct Panel {
    double k15, g7;
};

Panel gk15(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    const double fc = f(c);
    double k = WGK[7] * fc, g = WG[3] * fc;
    for (int j = 0; j < 7; ++j) {
        const double x = h * XGK[j];
        const double s = f(c - x) + f(c + x);
        k += WGK[j] * s;
        if (j % 2 == 1) g += WG[j / 2] * s;  // Gauss nodes are the odd Kronrod nodes
    }
    return {k * h, g * h};
}

void refine(const std::function<double(double)>& f, double a, double b, double rel_tol,
            double abs_tol, int depth, int max_depth, QuadResult& out) {
    Panel p = gk15(f, a, b);
    const double err = std::fabs(p.k15 - p.g7);
    if (depth >= max_depth || err <= rel_tol * std::fabs(p.k15) + abs_tol) {
        out.value += p.k15;
        out.error += err;
        if (depth > out.max_depth) out.max_depth = depth;
        return;
    }
    const double c = 0.5 * (a + b);
    refine(f, a, c, rel_tol, abs_tol, depth + 1, max_depth, out);
    refine(f, c, b, rel_tol, abs_tol, depth + 1, max_depth, out);
}

} // namespace

QuadResult integrate_gk(const std::function<double(double)>& f, double a, double b,
                        double rel_tol, double abs_tol, int max_depth) {
    if (a == b) return {};
    QuadResult out;
    if (a < b) {
        refine(f, a, b, rel_tol, abs_tol, 0, max_depth, out);
    } else {
        refine(f, b, a, rel_tol, abs_tol, 0, max_depth, out);
        out.value = -out.value;
    }
    return out;
}

} // namespace nsv::util
