#pragma once

#include "sebm/dynamics.hpp"
#include "sebm/noise.hpp"

#include <vector>

// Constructive fixed-point machinery: the Duhamel operator G over frozen
// noise paths, Picard successive approximations, B_T-norm estimation, the
// Osgood majorant check, and the dependence / comparison / Doss-Sussman
// experiments. The discrete G with left-point quadrature makes the
// exponential Euler trajectory an exact fixed point, so the iteration and
// the direct stepper agree at convergence.

namespace sebm {

struct Trajectory {
    double dt = 0.0;
    std::vector<SpectralField> states; // steps + 1 entries, index = time step
};

struct TrajectoryEnsemble {
    double dt = 0.0;
    int steps = 0;
    std::vector<Trajectory> paths;
};

// Direct exponential Euler run over one stored noise path.
Trajectory run_path(const Simulator& sim, const SpectralField& x0,
                    const NoisePath& noise);

// Noise paths 0..M-1 for the config's discretization.
std::vector<NoisePath> make_ensemble_noise(const ModelConfig& config);

// Zeroth Picard iterate: (X_0)_t = S^mu_t x0 on every path.
TrajectoryEnsemble free_evolution(const Simulator& sim, const SpectralField& x0,
                                  int paths);

// One application of the discrete Duhamel operator: semigroup free term
// plus left-point quadrature of the drift convolution plus the discrete
// stochastic convolution over the SAME stored increments.
TrajectoryEnsemble apply_G(const Simulator& sim, const SpectralField& x0,
                           const TrajectoryEnsemble& x,
                           const std::vector<NoisePath>& noise);

// B_T distance estimate: per path sup over grid times of the squared
// H-norm of the difference, averaged over paths. mean = sqrt of the
// average; stderr_ is the Monte Carlo error propagated to the root.
Estimate bt_norm(const TrajectoryEnsemble& a, const TrajectoryEnsemble& b);

// Per-grid-time squared B_t estimates E[sup_{s<=t_k} ||X_s||^2] with
// standard errors (running sup per path).
std::vector<Estimate> bt_profile(const TrajectoryEnsemble& x);

struct PicardDiagnostics {
    std::vector<double> distances;   // d_n between consecutive iterates
    double residual = 0.0;           // ||X - G X||_{B_T} after the loop
    int iterations = 0;
    bool converged = false;
    double v0 = 0.0;                 // majorant data
    double alpha = 0.0;
    double c_T = 0.0;                // maximal-inequality constant used
    std::vector<double> majorant;    // v(t_k) on the grid
    std::vector<Estimate> bt_squared; // final iterate
    // max over iterations and grid times of
    // bt_squared - majorant - 3 stderr; <= 0 means the majorant dominated
    // every iterate.
    double worst_majorant_margin = 0.0;
};

struct PicardResult {
    TrajectoryEnsemble solution;
    std::vector<NoisePath> noise;
    PicardDiagnostics diagnostics;
};

PicardResult solve_picard(const Simulator& sim, const SpectralField& x0,
                          double tol, int max_iter);

struct DependenceRow {
    double gap = 0.0;
    double distance = 0.0;
    double stderr_ = 0.0;
};

// Runs u0 and u0 + gap (constant shifts) on shared noise for each gap and
// reports B_T distances between the two direct solutions.
std::vector<DependenceRow> continuous_dependence(
    const Simulator& sim, std::span<const double> u0_samples,
    const std::vector<double>& gaps);

struct ComparisonReport {
    double max_violation = 0.0; // max over (path, time, node) of (u - u_hat)_+
};

// Requires u0 <= u0_hat at every quadrature node; shared noise.
ComparisonReport comparison_experiment(const Simulator& sim,
                                       std::span<const double> u0_samples,
                                       std::span<const double> u0_hat_samples);

struct DossSussmanRow {
    double dt = 0.0;
    double max_difference = 0.0; // sup over grid times of the H-norm gap
};

// Linear-noise single-mode cross-check: direct SPDE solve vs the
// transformed random PDE X = exp(a W) Y on identical Brownian paths,
// across `levels` halvings of the base dt.
std::vector<DossSussmanRow> doss_sussman_check(double a, ModelConfig config,
                                               const SpectralField& x0,
                                               int levels);

} // namespace sebm
