#include "nsv/util/spline.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nsv::util {

namespace {

std::vector<double> solve_tridiagonal(std::vector<double> a, std::vector<double> b,
                                      std::vector<double> c, std::vector<double> d) {
    const std::size_t n = b.size();
    for (std::size_t i = 1; i < n; ++i) {
        const double w = a[i] / b[i - 1];
        b[i] -= w * c[i - 1];
        d[i] -= w * d[i - 1];
    }
    std::vector<double> x(n);
    x[n - 1] = d[n - 1] / b[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) x[i] = (d[i] - c[i] * x[i + 1]) / b[i];
    return x;
}

} // namespace

std::vector<double> solve_cyclic_tridiagonal(const std::vector<double>& a,
                                             const std::vector<double>& b,
                                             const std::vector<double>& c,
                                             std::vector<double> d) {
    const std::size_t n = b.size();
    if (n < 3) throw std::invalid_argument("cyclic tridiagonal: need n >= 3");
    // Sherman-Morrison: remove corner couplings a[0] (to x_{n-1}) and c[n-1] (to x_0)
    const double alpha = a[0], beta = c[n - 1];
    const double gamma = -b[0];
    std::vector<double> bb = b;
    bb[0] -= gamma;
    bb[n - 1] -= alpha * beta / gamma;
    std::vector<double> u(n, 0.0);
    u[0] = gamma;
    u[n - 1] = beta;
    std::vector<double> aa = a, cc = c;
    aa[0] = 0.0;
    cc[n - 1] = 0.0;
    std::vector<double> x = solve_tridiagonal(aa, bb, cc, d);
    std::vector<double> z = solve_tridiagonal(aa, bb, cc, u);
    const double fact = (x[0] + alpha * x[n - 1] / gamma) /
                        (1.0 + z[0] + alpha * z[n - 1] / gamma);
    for (std::size_t i = 0; i < n; ++i) x[i] -= fact * z[i];
    return x;
}

CubicSpline CubicSpline::natural(std::vector<double> x, std::vector<double> y) {
    const std::size_t n = x.size();
    if (n < 3 || y.size() != n) throw std::invalid_argument("spline: need >= 3 knots");
    for (std::size_t i = 1; i < n; ++i)
        if (!(x[i] > x[i - 1])) throw std::invalid_argument("spline: knots must increase");

    // second derivatives from the standard C2 interpolation system
    std::vector<double> a(n, 0.0), b(n, 0.0), c(n, 0.0), d(n, 0.0);
    b[0] = b[n - 1] = 1.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double hl = x[i] - x[i - 1], hr = x[i + 1] - x[i];
        a[i] = hl / 6.0;
        b[i] = (hl + hr) / 3.0;
        c[i] = hr / 6.0;
        d[i] = (y[i + 1] - y[i]) / hr - (y[i] - y[i - 1]) / hl;
    }
    CubicSpline s;
    s.m_ = solve_tridiagonal(a, b, c, d);
    s.x_ = std::move(x);
    s.y_ = std::move(y);
    return s;
}

std::size_t CubicSpline::locate(double x) const {
    if (x <= x_.front()) return 0;
    if (x >= x_.back()) return x_.size() - 2;
    auto it = std::upper_bound(x_.begin(), x_.end(), x);
    return static_cast<std::size_t>(it - x_.begin()) - 1;
}

double CubicSpline::eval(double x) const {
    const std::size_t i = locate(x);
    const double h = x_[i + 1] - x_[i];
    const double A = (x_[i + 1] - x) / h, B = (x - x_[i]) / h;
    return A * y_[i] + B * y_[i + 1] +
           ((A * A * A - A) * m_[i] + (B * B * B - B) * m_[i + 1]) * h * h / 6.0;
}

double CubicSpline::deriv(double x) const {
    const std::size_t i = locate(x);
    const double h = x_[i + 1] - x_[i];
    const double A = (x_[i + 1] - x) / h, B = (x - x_[i]) / h;
    return (y_[i + 1] - y_[i]) / h +
           ((3.0 * B * B - 1.0) * m_[i + 1] - (3.0 * A * A - 1.0) * m_[i]) * h / 6.0;
}

double CubicSpline::second(double x) const {
    const std::size_t i = locate(x);
    const double h = x_[i + 1] - x_[i];
    const double A = (x_[i + 1] - x) / h, B = (x - x_[i]) / h;
    return A * m_[i] + B * m_[i + 1];
}

PeriodicCubicSpline::PeriodicCubicSpline(std::vector<double> t, std::vector<double> y,
                                         double period) {
    const std::size_t n = t.size();
    if (n < 3 || y.size() != n) throw std::invalid_argument("periodic spline: need >= 3 knots");
    if (!(period > 0.0)) throw std::invalid_argument("periodic spline: period must be positive");
    for (std::size_t i = 1; i < n; ++i)
        if (!(t[i] > t[i - 1])) throw std::invalid_argument("periodic spline: knots must increase");
    if (!(t[n - 1] - t[0] < period))
        throw std::invalid_argument("periodic spline: knot span exceeds period");

    auto hseg = [&](std::size_t i) {  // segment i -> i+1 (wrapping)
        return i + 1 < n ? t[i + 1] - t[i] : period - t[n - 1] + t[0];
    };
    std::vector<double> a(n), b(n), c(n), d(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double hl = hseg((i + n - 1) % n), hr = hseg(i);
        const double yl = y[(i + n - 1) % n], yr = y[(i + 1) % n];
        a[i] = hl / 6.0;
        b[i] = (hl + hr) / 3.0;
        c[i] = hr / 6.0;
        d[i] = (yr - y[i]) / hr - (y[i] - yl) / hl;
    }
    m_ = solve_cyclic_tridiagonal(a, b, c, d);
    t_ = std::move(t);
    y_ = std::move(y);
    period_ = period;
}

std::size_t PeriodicCubicSpline::locate(double t) const {
    t = t - std::floor((t - t_[0]) / period_) * period_;  // into [t0, t0+T)
    auto it = std::upper_bound(t_.begin(), t_.end(), t);
    return static_cast<std::size_t>(it - t_.begin()) - 1;  // last segment wraps
}

double PeriodicCubicSpline::eval(double t) const {
    const std::size_t n = t_.size();
    t = t - std::floor((t - t_[0]) / period_) * period_;
    const std::size_t i = locate(t);
    const std::size_t j = (i + 1) % n;
    const double h = i + 1 < n ? t_[i + 1] - t_[i] : period_ - t_[n - 1] + t_[0];
    const double A = i + 1 < n ? (t_[i + 1] - t) / h : (t_[0] + period_ - t) / h;
    const double B = 1.0 - A;
    return A * y_[i] + B * y_[j] +
           ((A * A * A - A) * m_[i] + (B * B * B - B) * m_[j]) * h * h / 6.0;
}

double PeriodicCubicSpline::deriv(double t) const {
    const std::size_t n = t_.size();
    t = t - std::floor((t - t_[0]) / period_) * period_;
    const std::size_t i = locate(t);
    const std::size_t j = (i + 1) % n;
    const double h = i + 1 < n ? t_[i + 1] - t_[i] : period_ - t_[n - 1] + t_[0];
    const double A = i + 1 < n ? (t_[i + 1] - t) / h : (t_[0] + period_ - t) / h;
    const double B = 1.0 - A;
    return (y_[j] - y_[i]) / h +
           ((3.0 * B * B - 1.0) * m_[j] - (3.0 * A * A - 1.0) * m_[i]) * h / 6.0;
}

double PeriodicCubicSpline::second(double t) const {
    const std::size_t n = t_.size();
    t = t - std::floor((t - t_[0]) / period_) * period_;
    const std::size_t i = locate(t);
    const std::size_t j = (i + 1) % n;
    const double h = i + 1 < n ? t_[i + 1] - t_[i] : period_ - t_[n - 1] + t_[0];
    const double A = i + 1 < n ? (t_[i + 1] - t) / h : (t_[0] + period_ - t) / h;
    return A * m_[i] + (1.0 - A) * m_[j];
}

} // namespace nsv::util
