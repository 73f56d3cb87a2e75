#pragma once
// Barotropic pressure closure P(rho), either a*rho^gamma or a C2 monotone
// tabulated law. Evaluations clamp rho into the operating range [0, rho_max]
// and count clamps rather than failing mid-run.

#include "nsv/spectral/field.hpp"
#include "nsv/util/spline.hpp"

#include <memory>
#include <vector>

namespace nsv::thermo {

class PressureLaw {
public:
    static PressureLaw gamma_law(double a, double gamma, double rho_tilde, double rho_max);
    // knots strictly increasing in rho; P' > 0 validated by dense sampling
    static PressureLaw tabulated(std::vector<double> rho_knots, std::vector<double> p_knots,
                                 double rho_tilde, double rho_max);

    double p(double rho) const;
    double dp(double rho) const;
    double g(double rho) const { return p(rho) - p_tilde_; }

    double rho_tilde() const { return rho_tilde_; }
    double p_tilde() const { return p_tilde_; }
    double rho_max() const { return rho_max_; }
    long clamp_count() const { return clamps_; }
    void reset_clamp_count() const { clamps_ = 0; }

    // G = P(rho) - P(rho_tilde) sampled on the grid
    spectral::ScalarField g_field(const spectral::ScalarField& rho) const;
    spectral::ScalarField dp_field(const spectral::ScalarField& rho) const;
    // c* = sqrt(max P'(rho)) over the grid
    double sound_speed_max(const spectral::ScalarField& rho) const;

private:
    PressureLaw() = default;
    double clamp(double rho) const;

    bool is_gamma_ = true;
    double a_ = 1.0, gamma_ = 2.0;
    util::CubicSpline table_;
    double rho_tilde_ = 1.0, p_tilde_ = 1.0, rho_max_ = 4.0;
    mutable long clamps_ = 0;
};

} // namespace nsv::thermo
