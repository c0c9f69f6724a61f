#pragma once

#include "sebm/legendre.hpp"

#include <cstdint>
#include <string>
#include <vector>

// Truncated Q_mu-Wiener noise: independent Brownian modes weighted by
// 1/sqrt(mu_n + mu). Increments come from a counter-based generator keyed
// on (master seed, path, mode, step), so every sample is reproducible
// bit-exactly regardless of thread scheduling or evaluation order.

namespace sebm {

struct NoiseConfig {
    double mu = 1.0;          // spectral shift, > 0
    int modes = 32;           // truncation N
    double dt = 1.0 / 256.0;  // > 0
    int steps = 256;
    std::uint64_t master_seed = 0;

    void validate() const;
};

// Stored Brownian increments, [mode][step], each N(0, dt).
struct NoisePath {
    int modes = 0;
    int steps = 0;
    double dt = 0.0;
    std::uint64_t master_seed = 0;
    std::uint64_t path_index = 0;
    std::vector<double> increments; // modes * steps, mode-major

    double increment(int mode, int step) const {
        return increments[static_cast<std::size_t>(mode) * steps + step];
    }
    double& increment(int mode, int step) {
        return increments[static_cast<std::size_t>(mode) * steps + step];
    }
};

// Standard normal at counter position (seed, path, mode, step); the
// deterministic primitive everything else is built on. Box-Muller over
// splitmix64-mixed counters.
double gauss_sample(std::uint64_t master_seed, std::uint64_t path,
                    std::uint64_t mode, std::uint64_t step);

NoisePath make_noise_path(const NoiseConfig& config, std::uint64_t path_index);

// Partial trace sum_{n<N} 1/(n(n+1)+mu) and the telescoping tail bound
// 1/N for the neglected modes.
struct TraceQ {
    double partial = 0.0;
    double tail_bound = 0.0;
};
TraceQ trace_q(double mu, int modes);

// Spectral increment of W at step k: coefficient dB^n_k / sqrt(mu_n + mu).
SpectralField sample_increment(const NoisePath& path, int step, double mu);

struct Estimate {
    double mean = 0.0;
    double stderr_ = 0.0;
};

// Monte Carlo check of E||W_t||^2 = t Trace Q_mu over `samples` paths.
Estimate isometry_estimate(int samples, double t, double mu, int modes,
                           std::uint64_t seed);

// Flat little-endian binary layout with a small header; lets Picard
// iterations and the Doss-Sussman cross-check reuse identical noise.
void save_noise_path(const NoisePath& path, const std::string& filename);
NoisePath load_noise_path(const std::string& filename);

} // namespace sebm
