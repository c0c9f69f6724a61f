#include "sebm/osgood.hpp"

#include <stdexcept>

namespace sebm {

void ScalarIvp::validate() const {
    if (v0 < 0.0) throw std::invalid_argument("ScalarIvp: v0 < 0");
    if (alpha <= 0.0) throw std::invalid_argument("ScalarIvp: alpha <= 0");
    if (horizon <= 0.0) throw std::invalid_argument("ScalarIvp: horizon <= 0");
    if (!modulus) throw std::invalid_argument("ScalarIvp: missing modulus");
}

ScalarSeries solve_scalar(const ScalarIvp& ivp, int steps) {
    ivp.validate();
    if (steps < 1) throw std::invalid_argument("solve_scalar: steps < 1");
    ScalarSeries series;
    series.times.resize(steps + 1);
    series.values.resize(steps + 1);
    const double dt = ivp.horizon / steps;
    for (int k = 0; k <= steps; ++k) {
        const double t = k * dt;
        series.times[k] = t;
        series.values[k] =
            ivp.v0 == 0.0 ? 0.0 : psi_inverse(ivp.modulus, ivp.v0, ivp.alpha * t);
    }
    return series;
}

double growth_bound(double v0, double alpha, double t, const Modulus& modulus) {
    if (v0 <= 0.0) throw std::domain_error("growth_bound: requires v0 > 0");
    return psi_inverse(modulus, v0, alpha * t);
}

} // namespace sebm
