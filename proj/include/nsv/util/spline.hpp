#pragma once
// Cubic spline interpolants. Natural variant for tabulated functions on a
// line, periodic variant for closed curves parametrized by chord length.

#include <cstddef>
#include <vector>

namespace nsv::util {

class CubicSpline {
public:
    CubicSpline() = default;
    // natural boundary (zero second derivative); x strictly increasing
    static CubicSpline natural(std::vector<double> x, std::vector<double> y);

    double eval(double x) const;
    double deriv(double x) const;
    double second(double x) const;
    double x_min() const { return x_.front(); }
    double x_max() const { return x_.back(); }

private:
    std::vector<double> x_, y_, m_;  // m_ = second derivatives at knots
    std::size_t locate(double x) const;
};

// Closed curve through knots at parameter values t_0 < ... < t_{N-1} with
// period T: value wraps, derivative continuous across the seam.
class PeriodicCubicSpline {
public:
    PeriodicCubicSpline() = default;
    PeriodicCubicSpline(std::vector<double> t, std::vector<double> y, double period);

    double eval(double t) const;
    double deriv(double t) const;
    double second(double t) const;
    double period() const { return period_; }

private:
    std::vector<double> t_, y_, m_;
    double period_ = 0.0;
    std::size_t locate(double t) const;
};

// Solves a*x_{i-1} + b*x_i + c*x_{i+1} = d cyclically (Sherman-Morrison).
std::vector<double> solve_cyclic_tridiagonal(const std::vector<double>& a,
                                             const std::vector<double>& b,
                                             const std::vector<double>& c,
                                             std::vector<double> d);

} // namespace nsv::util
