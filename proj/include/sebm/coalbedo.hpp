#pragma once

#include <functional>
#include <vector>

// Hybrid co-albedo profile: continuous like Sellers, with an infinite
// one-sided derivative at the ice knee like Budyko's jump. The modulus of
// continuity theta(u) ~ u ln(1/u) is non-Lipschitz but satisfies the
// Osgood condition, which is what the whole solver hinges on.

namespace sebm {

// Nonnegative, nondecreasing, concave modulus with theta(0) = 0.
using Modulus = std::function<double(double)>;

struct CoalbedoProfile {
    double beta_ice;      // 0 < beta_ice < beta_water
    double beta_water;    // < 1
    double ramp_width;    // delta, 0 < delta <= 1/e
    double critical_temp; // u_c, degrees C

    CoalbedoProfile(double beta_i, double beta_w, double delta,
                    double u_c = -10.0);

    // Modulus of continuity. The raw formula K u ln u is increasing only
    // on (0, 1/e); past that point we continue with the constant
    // theta(1/e), which keeps theta nondecreasing and concave on [0,inf)
    // and preserves |beta(u)-beta(v)| <= theta(|u-v|).
    double theta(double u) const;

    // Centered profile: beta_ice below 0, ramp theta(u) + beta_ice on
    // [0, delta], beta_water above delta. The physical co-albedo is
    // beta(u - critical_temp).
    double beta(double u) const;

    Modulus theta_modulus() const;

    // Integral of 1/theta from u_lo up to 1/e, one value per grid point.
    // Divergence as u_lo -> 0 (like ln ln(1/u_lo)) is the Osgood
    // condition in numerical form.
    std::vector<double> osgood_divergence_check(
        const std::vector<double>& u_lo_grid) const;
};

// Psi_{v0}(v) = integral of 1/modulus from v0 to v, by adaptive
// quadrature. Requires v0 > 0 and v >= v0.
double psi(const Modulus& modulus, double v0, double v);

// Solve Psi_{v0}(v) = y for v >= v0 by bracketed bisection; the bracket
// top grows geometrically until Psi exceeds y.
double psi_inverse(const Modulus& modulus, double v0, double y);

} // namespace sebm
