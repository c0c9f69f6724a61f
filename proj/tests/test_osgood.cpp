#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sebm/osgood.hpp"

#include <cmath>

using namespace sebm;

namespace {

// v' = alpha * theta(v) on the u ln(1/u) branch has the closed form
// v(t) = exp(ln(v0) * exp(-alpha Kp t)) while v stays below 1/e.
double closed_form(double v0, double alpha, double kp, double t) {
    return std::exp(std::log(v0) * std::exp(-alpha * kp * t));
}

const CoalbedoProfile kProfile{0.3, 0.7, 0.25};
const double kKp = 0.4 / std::abs(0.25 * std::log(0.25));

} // namespace

TEST_CASE("validation") {
    ScalarIvp bad{-1.0, 1.0, 1.0, kProfile.theta_modulus()};
    CHECK_THROWS(bad.validate());
    bad = {0.1, 0.0, 1.0, kProfile.theta_modulus()};
    CHECK_THROWS(bad.validate());
    bad = {0.1, 1.0, 1.0, nullptr};
    CHECK_THROWS(bad.validate());
    ScalarIvp good{0.1, 1.0, 1.0, kProfile.theta_modulus()};
    CHECK_NOTHROW(good.validate());
    CHECK_THROWS(solve_scalar(good, 0));
}

TEST_CASE("solve_scalar matches the closed form to rel 1e-6") {
    ScalarIvp ivp{0.01, 1.0, 1.0, kProfile.theta_modulus()};
    const ScalarSeries s = solve_scalar(ivp, 100);
    REQUIRE(s.times.size() == 101);
    CHECK(s.values.front() == doctest::Approx(0.01).epsilon(1e-12));
    // Frozen spot value at T = 1.
    CHECK(s.values.back() == doctest::Approx(0.2340738536799438).epsilon(1e-8));
    for (std::size_t k = 0; k < s.times.size(); ++k) {
        const double exact = closed_form(0.01, 1.0, kKp, s.times[k]);
        REQUIRE(exact < 0.3679); // stays on the log-log branch
        CHECK(s.values[k] == doctest::Approx(exact).epsilon(1e-6));
    }
}

TEST_CASE("v0 = 0 returns the null function, not a numerical escape") {
    ScalarIvp ivp{0.0, 50.0, 4.0, kProfile.theta_modulus()};
    const ScalarSeries s = solve_scalar(ivp, 64);
    for (double v : s.values) CHECK(v == 0.0);
}

TEST_CASE("growth bound dominates an RK4 sub-solution") {
    // u' = q * alpha * theta(u) with q < 1 must stay below the bound for
    // data (v0, alpha); q = 1 must match it to integrator accuracy.
    const Modulus m = kProfile.theta_modulus();
    const double v0 = 0.02, alpha = 2.0, T = 1.0;
    for (double q : {0.5, 1.0}) {
        double u = v0;
        const int n = 4000;
        const double h = T / n;
        for (int k = 0; k < n; ++k) {
            const auto f = [&](double w) { return q * alpha * m(w); };
            const double k1 = f(u);
            const double k2 = f(u + 0.5 * h * k1);
            const double k3 = f(u + 0.5 * h * k2);
            const double k4 = f(u + h * k3);
            u += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
            const double bound = growth_bound(v0, alpha, (k + 1) * h, m);
            CHECK(u <= bound * (1.0 + 1e-7));
        }
        if (q == 1.0)
            CHECK(u == doctest::Approx(growth_bound(v0, alpha, T, m))
                           .epsilon(1e-6));
    }
    CHECK_THROWS(growth_bound(0.0, 1.0, 1.0, m));
}
