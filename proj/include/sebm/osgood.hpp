#pragma once

#include "sebm/coalbedo.hpp"

#include <vector>

// Scalar Osgood integral equation v(t) = v0 + alpha * int_0^t theta(v(s)) ds.
// For v0 > 0 the solution is Psi_inverse(alpha t); for v0 = 0 the unique
// nonnegative solution is the null function, returned by an explicit
// branch (never by integration, which cannot see that 0 is non-escapable).

namespace sebm {

struct ScalarIvp {
    double v0 = 0.0;     // >= 0
    double alpha = 1.0;  // > 0
    double horizon = 1.0; // T > 0
    Modulus modulus;

    void validate() const;
};

struct ScalarSeries {
    std::vector<double> times;
    std::vector<double> values;
};

// Solution sampled on steps+1 uniform grid points of [0, T].
ScalarSeries solve_scalar(const ScalarIvp& ivp, int steps);

// Sharp bound Psi_inverse_{v0}(alpha t) dominating any nonnegative v
// satisfying the integral inequality with data (v0, alpha).
double growth_bound(double v0, double alpha, double t, const Modulus& modulus);

} // namespace sebm
