#include "sebm/coalbedo.hpp"

#include <cmath>
#include <stdexcept>

namespace sebm {

namespace {

constexpr double kInvE = 0.36787944117144233; // 1/e

double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double fa, double fm, double fb, double whole,
                        double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol) {
    if (b <= a) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 48);
}

} // namespace

CoalbedoProfile::CoalbedoProfile(double beta_i, double beta_w, double delta,
                                 double u_c)
    : beta_ice(beta_i), beta_water(beta_w), ramp_width(delta),
      critical_temp(u_c) {
    if (!(beta_i > 0.0 && beta_i < beta_w && beta_w < 1.0))
        throw std::invalid_argument(
            "CoalbedoProfile: requires 0 < beta_ice < beta_water < 1");
    if (!(delta > 0.0 && delta <= kInvE))
        throw std::invalid_argument(
            "CoalbedoProfile: requires 0 < ramp width delta <= 1/e");
}

double CoalbedoProfile::theta(double u) const {
    if (u < 0.0) throw std::domain_error("theta: negative argument");
    if (u == 0.0) return 0.0;
    const double scale = (beta_water - beta_ice) / (ramp_width * std::log(ramp_width));
    if (u > kInvE) return scale * (kInvE * std::log(kInvE));
    return scale * u * std::log(u);
}

double CoalbedoProfile::beta(double u) const {
    if (u <= 0.0) return beta_ice;
    if (u >= ramp_width) return beta_water;
    return theta(u) + beta_ice;
}

Modulus CoalbedoProfile::theta_modulus() const {
    return [p = *this](double u) { return p.theta(u); };
}

std::vector<double> CoalbedoProfile::osgood_divergence_check(
    const std::vector<double>& u_lo_grid) const {
    const Modulus m = theta_modulus();
    std::vector<double> values;
    values.reserve(u_lo_grid.size());
    for (double u_lo : u_lo_grid) values.push_back(psi(m, u_lo, kInvE));
    return values;
}

double psi(const Modulus& modulus, double v0, double v) {
    if (v0 <= 0.0)
        throw std::domain_error("psi: requires v0 > 0");
    if (v < v0) throw std::domain_error("psi: requires v >= v0");
    if (v == v0) return 0.0;
    auto integrand = [&](double s) { return 1.0 / modulus(s); };
    // The constant continuation of the hybrid modulus starts at 1/e;
    // split there so the kink sits on a panel boundary.
    if (v0 < kInvE && v > kInvE)
        return integrate(integrand, v0, kInvE, 5e-13) +
               integrate(integrand, kInvE, v, 5e-13);
    return integrate(integrand, v0, v, 1e-12);
}

double psi_inverse(const Modulus& modulus, double v0, double y) {
    if (v0 <= 0.0) throw std::domain_error("psi_inverse: requires v0 > 0");
    if (y < 0.0) throw std::domain_error("psi_inverse: requires y >= 0");
    if (y == 0.0) return v0;
    // Grow the bracket one octave at a time, accumulating Psi over the
    // octaves already passed so each integral spans at most one octave.
    double lo = v0, acc = 0.0;
    double hi = v0 * 2.0 + 1e-300;
    double seg = psi(modulus, lo, hi);
    while (acc + seg < y) {
        acc += seg;
        lo = hi;
        hi *= 2.0;
        if (!std::isfinite(hi))
            throw std::runtime_error("psi_inverse: bracket growth failed");
        seg = psi(modulus, lo, hi);
    }
    // Bisection within [lo, hi]; Psi is strictly increasing.
    const double base = lo;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double r = acc + psi(modulus, base, mid) - y;
        if (std::abs(r) < 1e-12) return mid;
        (r < 0.0 ? lo : hi) = mid;
        if (hi - lo < 1e-15 * (1.0 + hi)) break;
    }
    return 0.5 * (lo + hi);
}

} // namespace sebm
