#include "nsv/thermo/pressure_law.hpp"

#include <cmath>
#include <stdexcept>

namespace nsv::thermo {

PressureLaw PressureLaw::gamma_law(double a, double gamma, double rho_tilde, double rho_max) {
    if (!(a > 0.0)) throw std::invalid_argument("pressure law: a must be positive");
    if (!(gamma >= 1.0)) throw std::invalid_argument("pressure law: gamma must be >= 1");
    if (!(rho_tilde > 0.0)) throw std::invalid_argument("pressure law: rho_tilde must be positive");
    if (!(rho_max > rho_tilde)) throw std::invalid_argument("pressure law: rho_max must exceed rho_tilde");
    PressureLaw law;
    law.is_gamma_ = true;
    law.a_ = a;
    law.gamma_ = gamma;
    law.rho_tilde_ = rho_tilde;
    law.rho_max_ = rho_max;
    law.p_tilde_ = a * std::pow(rho_tilde, gamma);
    return law;
}

PressureLaw PressureLaw::tabulated(std::vector<double> rho_knots, std::vector<double> p_knots,
                                   double rho_tilde, double rho_max) {
    if (rho_knots.size() < 4 || rho_knots.size() != p_knots.size())
        throw std::invalid_argument("pressure law: need >= 4 matching knots");
    if (!(rho_tilde > 0.0)) throw std::invalid_argument("pressure law: rho_tilde must be positive");
    if (rho_knots.front() > 0.0 || rho_knots.back() < rho_max)
        throw std::invalid_argument("pressure law: knots must cover [0, rho_max]");
    PressureLaw law;
    law.is_gamma_ = false;
    law.table_ = util::CubicSpline::natural(std::move(rho_knots), std::move(p_knots));
    law.rho_tilde_ = rho_tilde;
    law.rho_max_ = rho_max;
    law.p_tilde_ = law.table_.eval(rho_tilde);
    // monotonicity is a property of the data AND the interpolant; sample it
    for (int i = 0; i <= 1000; ++i) {
        const double r = law.table_.x_min() +
                         (law.table_.x_max() - law.table_.x_min()) * i / 1000.0;
        if (!(law.table_.deriv(r) > 0.0))
            throw std::invalid_argument("pressure law: tabulated P is not strictly increasing");
    }
    return law;
}

double PressureLaw::clamp(double rho) const {
    if (rho < 0.0) {
        ++clamps_;
        return 0.0;
    }
    if (rho > rho_max_) {
        ++clamps_;
        return rho_max_;
    }
    return rho;
}

double PressureLaw::p(double rho) const {
    const double r = clamp(rho);
    return is_gamma_ ? a_ * std::pow(r, gamma_) : table_.eval(r);
}

double PressureLaw::dp(double rho) const {
    const double r = clamp(rho);
    return is_gamma_ ? a_ * gamma_ * std::pow(r, gamma_ - 1.0) : table_.deriv(r);
}

spectral::ScalarField PressureLaw::g_field(const spectral::ScalarField& rho) const {
    spectral::ScalarField out(rho.grid());
    for (std::size_t i = 0; i < rho.size(); ++i) {
        if (rho[i] < -1e-12)
            throw std::invalid_argument("g_field: negative density " + std::to_string(rho[i]));
        out[i] = p(rho[i]) - p_tilde_;
    }
    return out;
}

spectral::ScalarField PressureLaw::dp_field(const spectral::ScalarField& rho) const {
    spectral::ScalarField out(rho.grid());
    for (std::size_t i = 0; i < rho.size(); ++i) out[i] = dp(rho[i]);
    return out;
}

double PressureLaw::sound_speed_max(const spectral::ScalarField& rho) const {
    double m = 0.0;
    for (std::size_t i = 0; i < rho.size(); ++i) m = std::max(m, dp(rho[i]));
    return std::sqrt(m);
}

} // namespace nsv::thermo
