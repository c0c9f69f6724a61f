// Acceptance gate: one pass/fail line per criterion, nonzero exit if any
// fail. Statistical criteria use fixed seeds and the stated tolerances.

#include "sebm/harness.hpp"
#include "sebm/osgood.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace sebm;

namespace {

int failures = 0;

void report(int number, const char* title, bool ok, const std::string& detail) {
    std::printf("%s  %2d. %s (%s)\n", ok ? "PASS" : "FAIL", number, title,
                detail.c_str());
    if (!ok) ++failures;
}

// Shared model for the dynamics-facing criteria: centered profile
// (critical temperature 0), P2 insolation, affine emission.
ModelConfig centered_config() {
    ModelConfig c;
    c.insolation = [](double x) {
        return 1.0 - 0.482 * 0.5 * (3.0 * x * x - 1.0);
    };
    c.profile = CoalbedoProfile(0.3, 0.7, 0.25, 0.0);
    c.emission = EmissionLaw::affine(0.5, 1.5);
    c.Q = 1.0;
    c.mu = 1.0;
    return c;
}

void criterion_1() {
    const int modes = 32;
    const QuadratureRule rule = gauss_nodes(64);
    double worst_gram = 0.0;
    std::vector<std::vector<double>> basis(modes,
                                           std::vector<double>(rule.order()));
    for (int n = 0; n < modes; ++n)
        for (int j = 0; j < rule.order(); ++j)
            basis[n][j] = eval_basis(n, rule.nodes[j]);
    for (int m = 0; m < modes; ++m)
        for (int n = 0; n < modes; ++n) {
            const double g = inner_product(basis[m], basis[n], rule);
            worst_gram = std::max(worst_gram, std::abs(g - (m == n ? 1.0 : 0.0)));
        }

    // Rayleigh quotient of A_mu in weak form with finite-difference
    // derivatives: (int (1-x^2) e_n'^2 + mu int e_n^2) / int e_n^2.
    const double mu = 1.0, h = 2e-6;
    double worst_rayleigh = 0.0;
    for (int n = 0; n <= 16; ++n) {
        double num = 0.0, den = 0.0;
        for (int j = 0; j < rule.order(); ++j) {
            const double x = rule.nodes[j];
            const double d =
                (eval_basis(n, x + h) - eval_basis(n, x - h)) / (2.0 * h);
            const double e = eval_basis(n, x);
            num += rule.weights[j] * ((1.0 - x * x) * d * d + mu * e * e);
            den += rule.weights[j] * e * e;
        }
        const double lambda = n * (n + 1.0) + mu;
        worst_rayleigh =
            std::max(worst_rayleigh, std::abs(num / den - lambda) / lambda);
    }

    std::ostringstream detail;
    detail << "max Gram defect " << worst_gram << ", max Rayleigh rel err "
           << worst_rayleigh;
    report(1, "Legendre eigenstructure", worst_gram < 1e-10 && worst_rayleigh < 1e-6,
           detail.str());
}

void criterion_2() {
    double worst = 0.0;
    for (int n : {10, 100, 1000}) {
        double sum = 0.0;
        for (int k = 1; k <= n; ++k) sum += 1.0 / (k * (k + 1.0));
        worst = std::max(worst, std::abs(sum - (1.0 - 1.0 / (n + 1.0))));
    }
    const TraceQ tq = trace_q(1.0, 32);
    const double total = tq.partial + tq.tail_bound;
    std::ostringstream detail;
    detail << "telescoping defect " << worst << ", partial+tail " << total;
    report(2, "trace identities", worst < 1e-14 && total < 2.0, detail.str());
}

void criterion_3() {
    const double mu = 1.0;
    const int modes = 32, samples = 10000;
    const double trace = trace_q(mu, modes).partial;
    bool ok = true;
    std::ostringstream detail;
    std::uint64_t seed = 2024; // separate stream per horizon
    for (double t : {0.5, 1.0}) {
        const Estimate est = isometry_estimate(samples, t, mu, modes, seed++);
        const double gap = std::abs(est.mean - t * trace);
        ok = ok && gap < 5.0 * est.stderr_;
        detail << "t=" << t << ": |gap|/stderr " << gap / est.stderr_ << "  ";
    }
    report(3, "Wiener isometry", ok, detail.str());
}

void criterion_4() {
    const CoalbedoProfile p(0.3, 0.7, 0.25);
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> wide(-2.0, 3.0);
    std::uniform_real_distribution<double> pos(0.0, 1.5);
    double worst_mod = -1.0, worst_sub = -1.0, worst_conc = -1.0;
    for (int i = 0; i < 100000; ++i) {
        const double u = wide(rng), v = wide(rng);
        worst_mod = std::max(worst_mod, std::abs(p.beta(u) - p.beta(v)) -
                                            p.theta(std::abs(u - v)));
        const double a = pos(rng), b = pos(rng);
        worst_sub = std::max(worst_sub, p.theta(a + b) - p.theta(a) - p.theta(b));
        worst_conc = std::max(worst_conc, 0.5 * (p.theta(a) + p.theta(b)) -
                                              p.theta(0.5 * (a + b)));
    }
    std::ostringstream detail;
    detail << "modulus defect " << worst_mod << ", subadditivity " << worst_sub
           << ", concavity " << worst_conc;
    report(4, "co-albedo modulus properties",
           worst_mod <= 1e-12 && worst_sub <= 1e-12 && worst_conc <= 1e-12,
           detail.str());
}

void criterion_5() {
    const CoalbedoProfile p(0.3, 0.7, 0.25);
    const double kp = 0.4 / std::abs(0.25 * std::log(0.25));
    ScalarIvp ivp{0.01, 1.0, 1.0, p.theta_modulus()};
    const ScalarSeries s = solve_scalar(ivp, 100);
    double worst = 0.0;
    for (std::size_t k = 0; k < s.times.size(); ++k) {
        const double exact =
            std::exp(std::log(0.01) * std::exp(-kp * s.times[k]));
        worst = std::max(worst, std::abs(s.values[k] - exact) / exact);
    }
    ScalarIvp null_ivp{0.0, 1.0, 1.0, p.theta_modulus()};
    const ScalarSeries z = solve_scalar(null_ivp, 100);
    bool null_ok = true;
    for (double v : z.values) null_ok = null_ok && v == 0.0;
    std::ostringstream detail;
    detail << "max rel err " << worst << ", null branch "
           << (null_ok ? "exact" : "violated");
    report(5, "Osgood scalar oracle", worst < 1e-6 && null_ok, detail.str());
}

SpectralField initial_from(const Simulator& sim,
                           const std::function<double(double)>& u0) {
    const auto& nodes = sim.transform().rule().nodes;
    std::vector<double> samples(nodes.size());
    for (std::size_t j = 0; j < nodes.size(); ++j) samples[j] = u0(nodes[j]);
    return sim.initial_state(samples);
}

void criterion_6() {
    // (a) eps = 0 through the stochastic pipeline is bit-exact against the
    // bare stepper.
    ModelConfig c = centered_config();
    c.eps = 0.0;
    c.modes = 16;
    c.dt = 1.0 / 128.0;
    c.horizon = 1.0;
    c.ensemble = 1;
    const auto u0 = [](double x) { return 0.3 - 0.4 * x * x; };
    bool bit_exact = true;
    {
        const Simulator sim(c);
        const SpectralField x0 = initial_from(sim, u0);
        const auto noise = make_ensemble_noise(c);
        const Trajectory via_noise = run_path(sim, x0, noise[0]);
        State st{x0, 0.0};
        for (int k = 0; k < c.steps(); ++k) {
            st = sim.step(st, nullptr);
            bit_exact =
                bit_exact && st.x.coeffs == via_noise.states[k + 1].coeffs;
        }
    }

    // (b) first order in dt: terminal error vs a reference 4x finer than
    // the finest grid under test halves when dt halves.
    const auto terminal = [&](double dt) {
        ModelConfig cc = c;
        cc.dt = dt;
        const Simulator sim(cc);
        SpectralField x0 = initial_from(sim, u0);
        State st{x0, 0.0};
        for (int k = 0; k < cc.steps(); ++k) st = sim.step(st, nullptr);
        return st.x;
    };
    const SpectralField ref = terminal(1.0 / 512.0);
    const double e_coarse = (terminal(1.0 / 64.0) - ref).norm();
    const double e_fine = (terminal(1.0 / 128.0) - ref).norm();
    const double ratio = e_coarse / e_fine;
    std::ostringstream detail;
    detail << (bit_exact ? "bit-exact" : "pipeline mismatch")
           << ", error ratio per halving " << ratio;
    report(6, "deterministic limit and first-order convergence",
           bit_exact && ratio > 1.7 && ratio < 2.3, detail.str());
}

void criterion_7() {
    ModelConfig c = centered_config();
    c.eps = 0.0;
    c.modes = 16;
    c.dt = 1.0 / 256.0;
    c.horizon = 1.0;
    c.ensemble = 1;
    const Simulator sim(c);
    const double K = supersolution_K(sim, 0.0);
    const SpectralField x0 = sim.constant_field(K);
    NoisePath dummy;
    dummy.steps = c.steps();
    dummy.dt = c.dt;
    const Trajectory traj = run_path(sim, x0, dummy);
    double worst = -1e300;
    for (const auto& state : traj.states) {
        const auto u = sim.transform().to_physical(state);
        for (double v : u) worst = std::max(worst, v - K);
    }
    std::ostringstream detail;
    detail << "K " << K << ", max excursion above K " << worst;
    report(7, "constant supersolution bound", worst <= 1e-6, detail.str());
}

void criterion_8() {
    ModelConfig c = centered_config();
    c.eps = 0.08;
    c.modes = 16;
    c.dt = 1.0 / 256.0;
    c.horizon = 1.0;
    c.ensemble = 64;
    c.seed = 11;
    const Simulator sim(c);
    const SpectralField x0 =
        initial_from(sim, [](double x) { return 0.3 - 0.4 * x * x; });
    const PicardResult result = solve_picard(sim, x0, 1e-3, 25);
    const auto& d = result.diagnostics;
    std::ostringstream detail;
    detail << d.iterations << " iterations, last distance "
           << (d.distances.empty() ? 0.0 : d.distances.back()) << ", residual "
           << d.residual << ", majorant margin " << d.worst_majorant_margin;
    report(8, "Picard convergence at desk scale",
           d.converged && d.iterations <= 25 && d.residual < 2e-3 &&
               d.worst_majorant_margin <= 0.0,
           detail.str());
}

void criterion_9() {
    ModelConfig c = centered_config();
    c.eps = 0.05;
    c.modes = 16;
    c.dt = 1.0 / 256.0;
    c.horizon = 1.0;
    c.ensemble = 32;
    c.seed = 5;
    const Simulator sim(c);
    const int nn = sim.transform().rule().order();
    std::vector<double> lo(nn), hi(nn);
    for (int j = 0; j < nn; ++j) {
        const double x = sim.transform().rule().nodes[j];
        lo[j] = 0.2 - 0.4 * x * x;
        hi[j] = lo[j] + 1.0;
    }
    const ComparisonReport report_cmp = comparison_experiment(sim, lo, hi);
    std::ostringstream detail;
    detail << "max positive-part violation " << report_cmp.max_violation;
    report(9, "pathwise comparison under shared noise",
           report_cmp.max_violation <= 1e-6, detail.str());
}

void criterion_10() {
    ModelConfig c = centered_config();
    c.eps = 0.05;
    c.modes = 16;
    c.dt = 1.0 / 256.0;
    c.horizon = 1.0;
    c.ensemble = 32;
    c.seed = 8;
    const Simulator sim(c);
    std::vector<double> u0(sim.transform().rule().order());
    for (std::size_t j = 0; j < u0.size(); ++j) {
        const double x = sim.transform().rule().nodes[j];
        u0[j] = 0.2 - 0.4 * x * x;
    }
    const auto table =
        continuous_dependence(sim, u0, {1.0, 0.5, 0.25, 0.125});
    bool monotone = true;
    std::ostringstream detail;
    for (std::size_t i = 0; i + 1 < table.size(); ++i)
        monotone = monotone &&
                   table[i + 1].distance <=
                       table[i].distance +
                           2.0 * (table[i].stderr_ + table[i + 1].stderr_);
    const bool vanishing = table.back().distance < 0.5 * table.front().distance;
    for (const auto& row : table)
        detail << "gap " << row.gap << " -> " << row.distance << "  ";
    report(10, "continuous dependence on initial data", monotone && vanishing,
           detail.str());
}

void criterion_11() {
    ModelConfig c = centered_config();
    c.eps = 0.0;
    c.modes = 8;
    c.dt = 1.0 / 128.0;
    c.horizon = 0.5;
    c.ensemble = 1;
    c.seed = 13;
    const Simulator sim(c);
    const SpectralField x0 = sim.constant_field(0.3);

    const auto rows = doss_sussman_check(0.5, c, x0, 3);
    bool shrinking = true;
    std::ostringstream detail;
    detail << "gaps";
    for (std::size_t l = 0; l < rows.size(); ++l) {
        detail << " " << rows[l].max_difference;
        if (l > 0)
            shrinking =
                shrinking && rows[l].max_difference < rows[l - 1].max_difference;
    }
    const auto zero_rows = doss_sussman_check(0.0, c, x0, 1);
    detail << ", a=0 gap " << zero_rows[0].max_difference;
    report(11, "Doss-Sussman linear-noise cross-check",
           shrinking && zero_rows[0].max_difference < 1e-10, detail.str());
}

} // namespace

int main() {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10();
    criterion_11();
    if (failures > 0) {
        std::printf("%d criterion(s) failed\n", failures);
        return 1;
    }
    std::printf("all 11 criteria passed\n");
    return 0;
}
