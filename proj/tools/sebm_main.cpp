// Command-line front end: ensemble simulation, Picard fixed-point solves,
// invariant verification, scalar growth-bound tables, and ice-cap
// post-processing.

#include "sebm/harness.hpp"
#include "sebm/osgood.hpp"
#include "sebm/parallel.hpp"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitVerification = 4;

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw sebm::ConfigError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

sebm::RunSpec load_spec(const std::string& config_path, std::uint64_t seed,
                        bool seed_set) {
    sebm::RunSpec spec = sebm::parse_run_spec(
        config_path.empty() ? "{}" : read_file(config_path));
    if (seed_set) spec.model.seed = seed;
    return spec;
}

int run_simulate(const sebm::RunSpec& spec, const std::string& out_dir) {
    const auto t0 = std::chrono::steady_clock::now();
    const sebm::EnsembleResult result = sebm::run_ensemble(spec);
    const double sim_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    const sebm::RunManifest manifest =
        sebm::persist_run(out_dir, spec, result, {{"simulate", sim_seconds}});
    std::cout << "paths " << result.completed_paths << "/"
              << spec.model.ensemble << ", B_T fluctuation "
              << result.fluctuation.mean << " (stderr "
              << result.fluctuation.stderr_ << "), outputs in " << out_dir
              << " (" << manifest.files.size() << " files)\n";
    if (!result.complete) {
        std::cerr << "numerical failure: " << result.error
                  << " (partial results persisted)\n";
        return kExitNumerical;
    }
    return kExitOk;
}

int run_picard(const sebm::RunSpec& spec, const std::string& out_dir,
               double tol, int max_iter) {
    const sebm::Simulator sim(spec.model);
    const auto& nodes = sim.transform().rule().nodes;
    std::vector<double> u0(nodes.size());
    for (std::size_t j = 0; j < nodes.size(); ++j)
        u0[j] = spec.initial(nodes[j]);
    const sebm::SpectralField x0 = sim.initial_state(u0);

    const sebm::PicardResult result = sebm::solve_picard(sim, x0, tol, max_iter);
    const auto& d = result.diagnostics;

    std::filesystem::create_directories(out_dir);
    sebm::save_ensemble(std::filesystem::path(out_dir) / "trajectories.bin",
                        result.solution);
    {
        std::ofstream csv(std::filesystem::path(out_dir) / "distances.csv");
        csv << "iteration,distance\n";
        csv.precision(17);
        for (std::size_t n = 0; n < d.distances.size(); ++n)
            csv << n + 1 << ',' << d.distances[n] << '\n';
    }
    {
        std::ofstream csv(std::filesystem::path(out_dir) / "majorant.csv");
        csv << "t,bt_squared,stderr,majorant\n";
        csv.precision(17);
        for (std::size_t k = 0; k < d.majorant.size(); ++k)
            csv << k * spec.model.dt << ',' << d.bt_squared[k].mean << ','
                << d.bt_squared[k].stderr_ << ',' << d.majorant[k] << '\n';
    }

    std::cout << "picard: " << d.iterations << " iterations, "
              << (d.converged ? "converged" : "NOT converged") << ", residual "
              << d.residual << ", v0 " << d.v0 << ", alpha " << d.alpha
              << ", worst majorant margin " << d.worst_majorant_margin << '\n';
    if (!d.converged) {
        std::cerr << "numerical failure: fixed-point iteration did not reach tol "
                  << tol << " within " << max_iter << " iterations\n";
        return kExitNumerical;
    }
    return kExitOk;
}

bool check(const char* name, bool ok) {
    std::cout << (ok ? "  ok    " : "  FAIL  ") << name << '\n';
    return ok;
}

int run_verify(const sebm::RunSpec& spec) {
    bool all = true;

    { // Orthonormality of the truncated basis under the paired rule.
        const sebm::SpectralTransform t(32, 64);
        double worst = 0.0;
        for (int m = 0; m < 32; ++m) {
            std::vector<double> em(t.rule().order());
            for (int j = 0; j < t.rule().order(); ++j)
                em[j] = sebm::eval_basis(m, t.rule().nodes[j]);
            const sebm::SpectralField coeffs = t.to_spectral(em);
            for (int n = 0; n < 32; ++n)
                worst = std::max(worst, std::abs(coeffs.coeffs[n] -
                                                 (m == n ? 1.0 : 0.0)));
        }
        all &= check("basis Gram matrix is identity (1e-10)", worst < 1e-10);
    }
    { // Telescoping trace identity and the closed-form bound.
        double worst = 0.0;
        for (int n : {10, 100, 1000}) {
            double sum = 0.0;
            for (int k = 1; k <= n; ++k) sum += 1.0 / (k * (k + 1.0));
            worst = std::max(worst, std::abs(sum - (1.0 - 1.0 / (n + 1.0))));
        }
        const sebm::TraceQ tq = sebm::trace_q(1.0, 32);
        all &= check("partial trace telescopes (1e-14)", worst < 1e-14);
        all &= check("trace bound 1/mu + 1", tq.partial + tq.tail_bound < 2.0);
    }
    { // Modulus of continuity controls the profile increments.
        const auto& prof = spec.model.profile;
        std::mt19937_64 rng(7);
        std::uniform_real_distribution<double> span(-1.0, 2.0);
        double worst = -1.0;
        for (int i = 0; i < 10000; ++i) {
            const double u = span(rng), v = span(rng);
            worst = std::max(worst, std::abs(prof.beta(u) - prof.beta(v)) -
                                        prof.theta(std::abs(u - v)));
        }
        all &= check("co-albedo modulus bound (1e-12)", worst <= 1e-12);
    }
    { // Psi / Psi-inverse round trip and the null branch.
        const sebm::Modulus m = spec.model.profile.theta_modulus();
        const double y = sebm::psi(m, 0.01, 0.2);
        const double back = sebm::psi_inverse(m, 0.01, y);
        all &= check("Psi inverse round trip (1e-9)",
                     std::abs(back - 0.2) < 1e-9);
        sebm::ScalarIvp ivp{0.0, 1.0, 1.0, m};
        const sebm::ScalarSeries s = sebm::solve_scalar(ivp, 16);
        bool null_ok = true;
        for (double v : s.values) null_ok &= v == 0.0;
        all &= check("v0 = 0 gives the null solution", null_ok);
    }
    { // Determinism: identical seeds give identical increments.
        sebm::NoiseConfig nc;
        nc.mu = spec.model.mu;
        nc.modes = 8;
        nc.dt = 1.0 / 64.0;
        nc.steps = 64;
        nc.master_seed = spec.model.seed;
        const sebm::NoisePath a = sebm::make_noise_path(nc, 3);
        const sebm::NoisePath b = sebm::make_noise_path(nc, 3);
        all &= check("noise regeneration is bit-identical",
                     a.increments == b.increments);
    }
    { // eps = 0 stochastic pipeline equals the deterministic stepper.
        sebm::ModelConfig c = spec.model;
        c.eps = 0.0;
        c.linear_noise_a.reset();
        c.modes = 16;
        c.ensemble = 1;
        c.dt = 1.0 / 64.0;
        c.horizon = 0.5;
        const sebm::Simulator sim(c);
        const sebm::SpectralField x0 = sim.constant_field(1.0);
        const auto noise = sebm::make_ensemble_noise(c);
        const sebm::Trajectory noisy = sebm::run_path(sim, x0, noise[0]);
        sebm::State st{x0, 0.0};
        bool equal = true;
        for (int k = 0; k < c.steps(); ++k) {
            st = sim.step(st, nullptr);
            equal &= st.x.coeffs == noisy.states[k + 1].coeffs;
        }
        all &= check("eps = 0 pipeline is bit-exact deterministic", equal);
    }

    if (!all) {
        std::cerr << "verification failed\n";
        return kExitVerification;
    }
    return kExitOk;
}

int run_oracle(const sebm::RunSpec& spec, const std::string& out_path,
               double v0, double alpha, double horizon, int steps) {
    sebm::ScalarIvp ivp{v0, alpha, horizon, spec.model.profile.theta_modulus()};
    const sebm::ScalarSeries series = sebm::solve_scalar(ivp, steps);
    std::ofstream file;
    std::ostream* out = &std::cout;
    if (!out_path.empty()) {
        file.open(out_path);
        if (!file) throw std::runtime_error("cannot write " + out_path);
        out = &file;
    }
    out->precision(17);
    *out << "t,v,bound\n";
    for (std::size_t k = 0; k < series.times.size(); ++k) {
        const double bound =
            v0 == 0.0 ? 0.0
                      : sebm::growth_bound(v0, alpha, series.times[k],
                                           ivp.modulus);
        *out << series.times[k] << ',' << series.values[k] << ',' << bound
             << '\n';
    }
    return kExitOk;
}

int run_icecaps(const std::string& run_dir) {
    const std::filesystem::path dir(run_dir);
    const sebm::TrajectoryEnsemble ens =
        sebm::load_ensemble(dir / "trajectories.bin");
    sebm::write_ice_series(dir, ens);
    std::cout << "wrote " << (dir / "icefraction.csv").string() << " and "
              << (dir / "icelines.csv").string() << '\n';
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectral simulator and constructive mild-solution solver "
                 "for a stochastic diffusive energy balance model"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "run_out";
    std::uint64_t seed = 0;
    int threads = 0;
    auto* seed_opt = app.add_option("--seed", seed, "override the master seed");
    app.add_option("--config", config_path, "JSON config file");
    app.add_option("--threads", threads, "worker threads (0 = hardware)");
    app.add_option("--out", out_dir, "output directory");

    auto* simulate = app.add_subcommand("simulate", "run a noise ensemble");
    auto* picard = app.add_subcommand("picard", "Picard fixed-point solve");
    double tol = 1e-3;
    int max_iter = 25;
    picard->add_option("--tol", tol, "B_T distance tolerance");
    picard->add_option("--max-iter", max_iter, "iteration cap");
    auto* verify =
        app.add_subcommand("verify", "run the invariant suite (exit 4 on failure)");
    auto* oracle =
        app.add_subcommand("oracle", "scalar Osgood solution and growth bound");
    double v0 = 0.1, alpha = 1.0, horizon = 1.0;
    int steps = 100;
    std::string oracle_out;
    oracle->add_option("--v0", v0, "initial value (>= 0)");
    oracle->add_option("--alpha", alpha, "forcing coefficient (> 0)");
    oracle->add_option("--horizon", horizon, "time horizon");
    oracle->add_option("--steps", steps, "grid intervals");
    oracle->add_option("--table", oracle_out, "CSV output path (default stdout)");
    auto* icecaps =
        app.add_subcommand("icecaps", "ice-cap series from a run directory");
    std::string run_dir;
    icecaps->add_option("--run", run_dir, "run directory with trajectories.bin")
        ->required();

    CLI11_PARSE(app, argc, argv);
    if (threads > 0) sebm::set_thread_count(threads);

    try {
        const bool needs_spec = !icecaps->parsed();
        sebm::RunSpec spec;
        if (needs_spec) spec = load_spec(config_path, seed, seed_opt->count() > 0);
        if (simulate->parsed()) return run_simulate(spec, out_dir);
        if (picard->parsed()) return run_picard(spec, out_dir, tol, max_iter);
        if (verify->parsed()) return run_verify(spec);
        if (oracle->parsed())
            return run_oracle(spec, oracle_out, v0, alpha, horizon, steps);
        if (icecaps->parsed()) return run_icecaps(run_dir);
    } catch (const sebm::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const sebm::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumerical;
    }
    return kExitOk;
}
