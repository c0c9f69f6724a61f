#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sebm/coalbedo.hpp"

#include <cmath>
#include <random>

using namespace sebm;

namespace {
constexpr double kInvE = 0.36787944117144233;
}

TEST_CASE("profile validation") {
    CHECK_THROWS(CoalbedoProfile(0.0, 0.7, 0.25));   // beta_ice > 0
    CHECK_THROWS(CoalbedoProfile(0.7, 0.3, 0.25));   // ordering
    CHECK_THROWS(CoalbedoProfile(0.3, 1.0, 0.25));   // beta_water < 1
    CHECK_THROWS(CoalbedoProfile(0.3, 0.7, 0.0));    // delta > 0
    CHECK_THROWS(CoalbedoProfile(0.3, 0.7, 0.4));    // delta <= 1/e
    CHECK_NOTHROW(CoalbedoProfile(0.3, 0.7, kInvE)); // boundary allowed
}

TEST_CASE("modulus and profile point values") {
    // Frozen: theta(u) = (bw-bi) u ln u / (delta ln delta) at u = 0.05,
    // delta = 0.1 -> 0.4 * (0.05 ln 0.05)/(0.1 ln 0.1).
    const CoalbedoProfile p(0.3, 0.7, 0.1);
    CHECK(p.theta(0.0) == 0.0);
    CHECK(p.theta(0.05) == doctest::Approx(0.26020599913279624).epsilon(1e-14));
    CHECK(p.beta(0.05) == doctest::Approx(0.5602059991327962).epsilon(1e-14));
    CHECK(p.beta(-3.0) == 0.3);
    CHECK(p.beta(0.1) == doctest::Approx(0.7).epsilon(1e-14));
    CHECK(p.beta(25.0) == 0.7);
    // Constant continuation past the knee keeps theta nondecreasing.
    CHECK(p.theta(kInvE) == doctest::Approx(0.6390720452256375).epsilon(1e-14));
    CHECK(p.theta(5.0) == p.theta(kInvE));
    CHECK(p.theta(1.0) >= p.theta(0.9999 * kInvE));
}

TEST_CASE("theta is a modulus for beta: 1e5 random pairs") {
    const CoalbedoProfile p(0.22, 0.84, 0.31);
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> wide(-2.0, 3.0);
    for (int i = 0; i < 100000; ++i) {
        const double u = wide(rng), v = wide(rng);
        CHECK(std::abs(p.beta(u) - p.beta(v)) <=
              p.theta(std::abs(u - v)) + 1e-12);
    }
}

TEST_CASE("theta: nondecreasing, sub-additive, midpoint concave") {
    const CoalbedoProfile p(0.3, 0.7, 0.25);
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> pos(0.0, 1.0);
    for (int i = 0; i < 100000; ++i) {
        const double a = pos(rng), b = pos(rng);
        CHECK(p.theta(a + b) <= p.theta(a) + p.theta(b) + 1e-14);
        CHECK(p.theta(0.5 * (a + b)) >=
              0.5 * (p.theta(a) + p.theta(b)) - 1e-14);
        if (a <= b) CHECK(p.theta(a) <= p.theta(b) + 1e-15);
        else CHECK(p.theta(b) <= p.theta(a) + 1e-15);
    }
}

TEST_CASE("Psi against the closed form on the log-log branch") {
    // For v <= 1/e: Psi_{v0}(v) = ln(ln(1/v0)/ln(1/v)) / Kp with
    // Kp = (bw-bi)/|delta ln delta|.
    const CoalbedoProfile p(0.3, 0.7, 0.25);
    const Modulus m = p.theta_modulus();
    const double kp = 0.4 / std::abs(0.25 * std::log(0.25));
    CHECK(kp == doctest::Approx(1.1541560327111708).epsilon(1e-14));
    CHECK(psi(m, 0.01, 0.1) ==
          doctest::Approx(0.6005662673977517).epsilon(1e-10));
    // Linear continuation past the knee: constant theta(1/e).
    const double past = psi(m, 0.01, kInvE) + 1.0 / p.theta(kInvE);
    CHECK(psi(m, 0.01, kInvE + 1.0) == doctest::Approx(past).epsilon(1e-10));
}

TEST_CASE("Psi inverse round trips, including far past the knee") {
    const CoalbedoProfile p(0.3, 0.7, 0.25);
    const Modulus m = p.theta_modulus();
    for (double v : {0.02, 0.2, 0.36, 1.0, 4.0, 1e3, 1e8}) {
        const double y = psi(m, 0.01, v);
        CHECK(psi_inverse(m, 0.01, y) == doctest::Approx(v).epsilon(1e-9));
    }
    CHECK(psi_inverse(m, 0.01, 0.0) == doctest::Approx(0.01).epsilon(1e-12));
}

TEST_CASE("Osgood divergence: the Psi integral blows up as u_lo -> 0") {
    const CoalbedoProfile p(0.3, 0.7, 0.25);
    const std::vector<double> grid{1e-2, 1e-4, 1e-8, 1e-16, 1e-32};
    const auto values = p.osgood_divergence_check(grid);
    REQUIRE(values.size() == grid.size());
    // Grows like ln ln(1/u_lo): strictly increasing, unbounded in practice.
    for (std::size_t i = 1; i < values.size(); ++i)
        CHECK(values[i] > values[i - 1] + 0.1);
    CHECK(values.back() > values.front() + 2.0);
}
