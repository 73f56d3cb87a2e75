#include "nsv/patch/patch.hpp"

#include "nsv/util/spline.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace nsv::patch {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct CurveSplines {
    util::PeriodicCubicSpline sx, sy;
    int n = 0;
};

// splines in marker-index parameter, period n
CurveSplines index_splines(const MarkerCurve& c) {
    const int n = c.size();
    std::vector<double> t(n);
    for (int i = 0; i < n; ++i) t[i] = i;
    CurveSplines s;
    s.sx = util::PeriodicCubicSpline(t, c.x, double(n));
    s.sy = util::PeriodicCubicSpline(t, c.y, double(n));
    s.n = n;
    return s;
}

double signed_area(const MarkerCurve& c) {
    double a = 0.0;
    const int n = c.size();
    for (int i = 0; i < n; ++i) {
        const int j = (i + 1) % n;
        a += c.x[i] * c.y[j] - c.x[j] * c.y[i];
    }
    return 0.5 * a;
}

double seg_point_dist2(double px, double py, double ax, double ay, double bx, double by,
                       double& t_out) {
    const double dx = bx - ax, dy = by - ay;
    const double len2 = dx * dx + dy * dy;
    double t = len2 > 0.0 ? ((px - ax) * dx + (py - ay) * dy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    const double qx = ax + t * dx - px, qy = ay + t * dy - py;
    t_out = t;
    return qx * qx + qy * qy;
}

int orient(double ax, double ay, double bx, double by, double cx, double cy) {
    const double v = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax);
    return (v > 0.0) - (v < 0.0);
}

bool segments_cross(double ax, double ay, double bx, double by, double cx, double cy, double dx,
                    double dy) {
    const int o1 = orient(ax, ay, bx, by, cx, cy), o2 = orient(ax, ay, bx, by, dx, dy);
    const int o3 = orient(cx, cy, dx, dy, ax, ay), o4 = orient(cx, cy, dx, dy, bx, by);
    return o1 != o2 && o3 != o4 && o1 != 0 && o2 != 0 && o3 != 0 && o4 != 0;
}

// uniform bucket grid over segments for neighborhood queries
struct SegmentHash {
    double cell = 0.0;
    int m = 0;
    double span = 0.0;
    std::vector<std::vector<int>> buckets;

    SegmentHash(const MarkerCurve& c, double cell_size, double box) : cell(cell_size), span(box) {
        m = std::max(1, int(box / cell));
        cell = box / m;
        buckets.resize(static_cast<std::size_t>(m) * m);
        const int n = c.size();
        for (int i = 0; i < n; ++i) {
            const int j = (i + 1) % n;
            const double lo_x = std::min(c.x[i], c.x[j]), hi_x = std::max(c.x[i], c.x[j]);
            const double lo_y = std::min(c.y[i], c.y[j]), hi_y = std::max(c.y[i], c.y[j]);
            for (int by = idx(lo_y); by <= idx(hi_y); ++by)
                for (int bx = idx(lo_x); bx <= idx(hi_x); ++bx)
                    buckets[key(bx, by)].push_back(i);
        }
    }
    int idx(double v) const { return std::clamp(int(v / cell), 0, m - 1); }
    std::size_t key(int bx, int by) const {
        return static_cast<std::size_t>((by % m + m) % m) * m + ((bx % m + m) % m);
    }
    // candidate segments within one ring of the point's bucket
    void gather(double x, double y, std::vector<int>& out) const {
        out.clear();
        const int bx = idx(x), by = idx(y);
        for (int dy = -1; dy <= 1; ++dy)
            for (int dx = -1; dx <= 1; ++dx)
                for (int s : buckets[key(bx + dx, by + dy)]) out.push_back(s);
    }
};

bool curve_self_intersects(const MarkerCurve& c, double box) {
    const int n = c.size();
    double max_len = 1e-12;
    for (int i = 0; i < n; ++i) {
        const int j = (i + 1) % n;
        max_len = std::max(max_len, std::hypot(c.x[j] - c.x[i], c.y[j] - c.y[i]));
    }
    SegmentHash hash(c, std::max(2.0 * max_len, box / 512.0), box);
    std::vector<int> cand;
    for (int i = 0; i < n; ++i) {
        const int j = (i + 1) % n;
        hash.gather(0.5 * (c.x[i] + c.x[j]), 0.5 * (c.y[i] + c.y[j]), cand);
        for (int k : cand) {
            if (k == i) continue;
            const int kj = (k + 1) % n;
            if (kj == i || j == k) continue;   // adjacent segments share a vertex
            if (segments_cross(c.x[i], c.y[i], c.x[j], c.y[j], c.x[k], c.y[k], c.x[kj],
                               c.y[kj]))
                return true;
        }
    }
    return false;
}

void require_clearance(const MarkerCurve& c, double L) {
    for (int i = 0; i < c.size(); ++i)
        if (c.x[i] < L / 4 || c.x[i] > 3 * L / 4 || c.y[i] < L / 4 || c.y[i] > 3 * L / 4)
            throw std::invalid_argument("patch curve too close to the box wall at marker " +
                                        std::to_string(i));
}

MarkerCurve resample_uniform(const MarkerCurve& c, int n_new) {
    const int n = c.size();
    std::vector<double> s(n + 1, 0.0);
    for (int i = 0; i < n; ++i) {
        const int j = (i + 1) % n;
        s[i + 1] = s[i] + std::hypot(c.x[j] - c.x[i], c.y[j] - c.y[i]);
    }
    const double total = s[n];
    std::vector<double> knots(s.begin(), s.end() - 1);
    util::PeriodicCubicSpline sx(knots, c.x, total), sy(knots, c.y, total);
    MarkerCurve out;
    out.x.resize(n_new);
    out.y.resize(n_new);
    for (int k = 0; k < n_new; ++k) {
        const double sk = total * k / n_new;
        out.x[k] = sx.eval(sk);
        out.y[k] = sy.eval(sk);
    }
    return out;
}

} // namespace

PatchSpec PatchSpec::disc(double cx, double cy, double r) {
    PatchSpec s;
    s.cx = cx;
    s.cy = cy;
    s.x_modes = {{1, r, 0.0}};
    s.y_modes = {{1, 0.0, r}};
    return s;
}

PatchSpec PatchSpec::ellipse(double cx, double cy, double rx, double ry) {
    PatchSpec s;
    s.cx = cx;
    s.cy = cy;
    s.x_modes = {{1, rx, 0.0}};
    s.y_modes = {{1, 0.0, ry}};
    return s;
}

void PatchSpec::eval(double theta, double& x, double& y) const {
    x = cx;
    y = cy;
    for (const auto& hm : x_modes)
        x += hm.cos_amp * std::cos(hm.k * theta) + hm.sin_amp * std::sin(hm.k * theta);
    for (const auto& hm : y_modes)
        y += hm.cos_amp * std::cos(hm.k * theta) + hm.sin_amp * std::sin(hm.k * theta);
}

void PatchSpec::eval_deriv(double theta, double& dx, double& dy) const {
    dx = 0.0;
    dy = 0.0;
    for (const auto& hm : x_modes)
        dx += hm.k * (-hm.cos_amp * std::sin(hm.k * theta) + hm.sin_amp * std::cos(hm.k * theta));
    for (const auto& hm : y_modes)
        dy += hm.k * (-hm.cos_amp * std::sin(hm.k * theta) + hm.sin_amp * std::cos(hm.k * theta));
}

MarkerCurve sample_markers(const PatchSpec& spec, const Grid& g, int n_markers) {
    // dense chord-length table, then uniform-in-arclength emission
    const int dense = 8192;
    std::vector<double> th(dense + 1), s(dense + 1, 0.0);
    double px = 0.0, py = 0.0;
    spec.eval(0.0, px, py);
    for (int i = 1; i <= dense; ++i) {
        th[i] = 2.0 * kPi * i / dense;
        double x, y;
        spec.eval(th[i], x, y);
        s[i] = s[i - 1] + std::hypot(x - px, y - py);
        px = x;
        py = y;
    }
    const double arclen = s[dense];
    if (!(arclen > 0.0)) throw std::invalid_argument("patch curve has zero length");

    int n = n_markers > 0 ? n_markers : int(std::lround(arclen / g.h()));
    n = std::max(n, 256);

    MarkerCurve c;
    c.x.resize(n);
    c.y.resize(n);
    int j = 0;
    for (int k = 0; k < n; ++k) {
        const double target = arclen * k / n;
        while (j < dense - 1 && s[j + 1] < target) ++j;
        const double f = (target - s[j]) / std::max(s[j + 1] - s[j], 1e-300);
        const double theta = th[j] + f * (th[j + 1] - th[j]);
        spec.eval(theta, c.x[k], c.y[k]);
    }
    if (signed_area(c) < 0.0) {
        std::reverse(c.x.begin() + 1, c.x.end());
        std::reverse(c.y.begin() + 1, c.y.end());
    }
    require_clearance(c, g.L);
    if (curve_self_intersects(c, g.L))
        throw std::invalid_argument("patch curve is not simple at marker resolution");
    return c;
}

SignedDistance signed_distance(const MarkerCurve& c, const Grid& g, double band) {
    if (c.size() < 3) throw std::invalid_argument("signed_distance: need a closed curve");
    if (!(band > 0.0)) throw std::invalid_argument("signed_distance: band must be positive");
    SignedDistance out{ScalarField(g), VectorField(g), VectorField(g)};
    const int n = g.n;
    const double h = g.h();
    const int nm = c.size();

    // inside/outside by horizontal-ray crossing parity, one sweep per row
    std::vector<char> inside(g.size(), 0);
    std::vector<double> crossings;
    for (int iy = 0; iy < n; ++iy) {
        const double y = iy * h;
        crossings.clear();
        for (int i = 0; i < nm; ++i) {
            const int j = (i + 1) % nm;
            const bool above_i = c.y[i] > y, above_j = c.y[j] > y;
            if (above_i == above_j) continue;
            crossings.push_back(c.x[i] + (y - c.y[i]) / (c.y[j] - c.y[i]) * (c.x[j] - c.x[i]));
        }
        std::sort(crossings.begin(), crossings.end());
        std::size_t ci = 0;
        bool parity = false;
        for (int ix = 0; ix < n; ++ix) {
            const double x = ix * h;
            while (ci < crossings.size() && crossings[ci] < x) {
                parity = !parity;
                ++ci;
            }
            inside[g.idx(ix, iy)] = parity ? 1 : 0;
        }
    }

    const CurveSplines spl = index_splines(c);
    SegmentHash hash(c, band, g.L);
    std::vector<int> cand;
    const double far = band + h;
    for (int iy = 0; iy < n; ++iy) {
        const double y = iy * h;
        for (int ix = 0; ix < n; ++ix) {
            const double x = ix * h;
            const std::size_t id = g.idx(ix, iy);
            const double sgn = inside[id] ? 1.0 : -1.0;
            hash.gather(x, y, cand);
            double best = band * band;
            int best_seg = -1;
            double best_t = 0.0;
            for (int si : cand) {
                const int sj = (si + 1) % nm;
                double t;
                const double d2 = seg_point_dist2(x, y, c.x[si], c.y[si], c.x[sj], c.y[sj], t);
                if (d2 < best) {
                    best = d2;
                    best_seg = si;
                    best_t = t;
                }
            }
            if (best_seg < 0) {
                out.d[id] = sgn * far;
                continue;
            }
            out.d[id] = sgn * std::sqrt(best);
            const double tau = best_seg + best_t;
            double tx = spl.sx.deriv(tau), ty = spl.sy.deriv(tau);
            const double tl = std::hypot(tx, ty);
            if (tl > 0.0) {
                tx /= tl;
                ty /= tl;
            }
            out.tangent.x[id] = tx;
            out.tangent.y[id] = ty;
            // counterclockwise curve: interior on the left, so the inward
            // normal (the direction of increasing d) is the left normal
            out.grad_d.x[id] = -ty;
            out.grad_d.y[id] = tx;
        }
    }
    return out;
}

double interp_bicubic(const ScalarField& f, double x, double y) {
    const Grid& g = f.grid();
    const double h = g.h();
    double gx = x / h, gy = y / h;
    gx -= std::floor(gx / g.n) * g.n;
    gy -= std::floor(gy / g.n) * g.n;
    const int ix = int(std::floor(gx)), iy = int(std::floor(gy));
    const double ux = gx - ix, uy = gy - iy;

    auto wgt = [](double u, double w[4]) {
        w[0] = ((-0.5 * u + 1.0) * u - 0.5) * u;
        w[1] = (1.5 * u - 2.5) * u * u + 1.0;
        w[2] = ((-1.5 * u + 2.0) * u + 0.5) * u;
        w[3] = (0.5 * u - 0.5) * u * u;
    };
    double wx[4], wy[4];
    wgt(ux, wx);
    wgt(uy, wy);
    double v = 0.0;
    for (int j = 0; j < 4; ++j) {
        const int yy = (iy + j - 1 + g.n) % g.n;
        double row = 0.0;
        for (int i = 0; i < 4; ++i) {
            const int xx = (ix + i - 1 + g.n) % g.n;
            row += wx[i] * f(xx, yy);
        }
        v += wy[j] * row;
    }
    return v;
}

AdvectReport advect_markers(MarkerCurve& c, const VectorField& u, double dt) {
    const Grid& g = u.grid();
    const int n = c.size();
    auto vel = [&](double x, double y, double& vx, double& vy) {
        vx = interp_bicubic(u.x, x, y);
        vy = interp_bicubic(u.y, x, y);
    };
    for (int i = 0; i < n; ++i) {
        double k1x, k1y, k2x, k2y, k3x, k3y;
        const double x = c.x[i], y = c.y[i];
        vel(x, y, k1x, k1y);
        vel(x + 0.5 * dt * k1x, y + 0.5 * dt * k1y, k2x, k2y);
        vel(x + dt * (2.0 * k2x - k1x), y + dt * (2.0 * k2y - k1y), k3x, k3y);
        c.x[i] = x + dt / 6.0 * (k1x + 4.0 * k2x + k3x);
        c.y[i] = y + dt / 6.0 * (k1y + 4.0 * k2y + k3y);
        if (c.x[i] < g.L / 8 || c.x[i] > 7 * g.L / 8 || c.y[i] < g.L / 8 || c.y[i] > 7 * g.L / 8)
            throw std::runtime_error("marker " + std::to_string(i) + " left the box margin");
    }

    AdvectReport rep;
    rep.n_markers = n;
    const double h = g.h();
    double lo = 1e300, hi = 0.0, arclen = 0.0;
    for (int i = 0; i < n; ++i) {
        const int j = (i + 1) % n;
        const double d = std::hypot(c.x[j] - c.x[i], c.y[j] - c.y[i]);
        lo = std::min(lo, d);
        hi = std::max(hi, d);
        arclen += d;
    }
    if (lo < 0.25 * h || hi > 4.0 * h) {
        const int n_new = std::max(int(std::lround(arclen / h)), 256);
        c = resample_uniform(c, n_new);
        rep.resampled = true;
        rep.n_markers = n_new;
    }
    return rep;
}

RegularityReport interface_regularity(const MarkerCurve& c, double p) {
    if (!(p >= 1.0)) throw std::invalid_argument("interface_regularity: p must be >= 1");
    const int n = c.size();
    std::vector<double> s(n, 0.0);
    for (int i = 1; i < n; ++i)
        s[i] = s[i - 1] + std::hypot(c.x[i] - c.x[i - 1], c.y[i] - c.y[i - 1]);
    const double total =
        s[n - 1] + std::hypot(c.x[0] - c.x[n - 1], c.y[0] - c.y[n - 1]);
    util::PeriodicCubicSpline sx(s, c.x, total), sy(s, c.y, total);

    RegularityReport rep;
    const int dense = 8 * n;
    double acc = 0.0, accp = 0.0;
    for (int k = 0; k < dense; ++k) {
        const double t = total * k / dense;
        const double xp = sx.deriv(t), yp = sy.deriv(t);
        const double xpp = sx.second(t), ypp = sy.second(t);
        const double speed = std::hypot(xp, yp);
        const double kappa = std::fabs(xp * ypp - yp * xpp) / std::max(speed * speed * speed,
                                                                       1e-300);
        rep.curvature_max = std::max(rep.curvature_max, kappa);
        acc += speed;
        accp += std::pow(kappa, p) * speed;
    }
    const double dsp = total / dense;
    rep.arclength = acc * dsp;
    rep.w2p_seminorm = std::pow(accp * dsp, 1.0 / p);

    // bounding box spans the buckets; pad so boundary markers stay interior
    double hi = 0.0;
    for (int i = 0; i < n; ++i) hi = std::max({hi, c.x[i], c.y[i]});
    rep.self_intersecting = curve_self_intersects(c, 2.0 * hi + 1.0);
    return rep;
}

double tangency_error(const MarkerCurve& c, const VectorField& x1) {
    const CurveSplines spl = index_splines(c);
    double worst = 0.0;
    for (int i = 0; i < c.size(); ++i) {
        double tx = spl.sx.deriv(i), ty = spl.sy.deriv(i);
        const double tl = std::hypot(tx, ty);
        if (tl == 0.0) continue;
        tx /= tl;
        ty /= tl;
        const double vx = interp_bicubic(x1.x, c.x[i], c.y[i]);
        const double vy = interp_bicubic(x1.y, c.x[i], c.y[i]);
        const double vn = std::fabs(vx * (-ty) + vy * tx);
        const double vm = std::hypot(vx, vy);
        if (vm > 1e-12) worst = std::max(worst, vn / vm);
    }
    return worst;
}

} // namespace nsv::patch
