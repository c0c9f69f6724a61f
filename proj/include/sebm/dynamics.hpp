#pragma once

#include "sebm/coalbedo.hpp"
#include "sebm/legendre.hpp"
#include "sebm/noise.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

// Model right-hand side and the exponential Euler stepper for the shifted
// state X = u - u_c:
//
//   dX + A_mu X dt = F(X) dt + B(X) dW,
//   F(X) = mu (X - u_c) - g_hat(X - u_c) + Q S(x) r(X),
//   B(X) = eps Q S(x) r(X),
//
// with r the centered co-albedo profile by default (a config switch
// selects the bare modulus theta instead). Nonlinearities are evaluated
// pseudo-spectrally at 2N Gauss nodes and projected back to N modes; the
// semigroup acts exactly in spectral space.

namespace sebm {

enum class ReactionKind { Beta, Theta };

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Monotone emission law. Affine by default (Budyko type, Lipschitz
// constant = slope); a general increasing g can be supplied together with
// its derivative and is Lipschitz-truncated outside [-K, K].
struct EmissionLaw {
    std::function<double(double)> g;
    std::function<double(double)> gprime;
    double lipschitz = 0.0; // valid bound on |g'| over the range in use

    static EmissionLaw affine(double offset, double slope);
    double operator()(double u) const { return g(u); }
    double inverse(double y) const; // bisection; g must be increasing
};

// Affine continuation of g outside [-K, K] with the boundary slopes;
// equal to g inside, globally Lipschitz outside.
EmissionLaw truncate_g(const EmissionLaw& law, double K);

struct ModelConfig {
    double Q = 1.0;                                  // solar constant, > 0
    std::function<double(double)> insolation;        // S(x), bounded positive
    EmissionLaw emission = EmissionLaw::affine(0.0, 1.0);
    double eps = 0.0;                                // noise amplitude, >= 0
    double mu = 1.0;                                 // spectral shift, > 0
    CoalbedoProfile profile{0.3, 0.7, 0.25, -10.0};
    int modes = 32;                                  // truncation N
    double dt = 1.0 / 256.0;
    double horizon = 1.0;                            // T
    int ensemble = 1;                                // M paths
    std::uint64_t seed = 0;
    ReactionKind reaction = ReactionKind::Beta;
    // Linear-noise test mode: B(X) = a X with noise restricted to mode 0,
    // used only by the Doss-Sussman cross-check.
    std::optional<double> linear_noise_a;

    int steps() const;
    void validate() const;
    NoiseConfig noise_config() const;
};

// Parse from a JSON document; throws ConfigError naming the failed
// constraint. See README for the schema.
ModelConfig parse_config(const std::string& json_text);

struct State {
    SpectralField x;
    double t = 0.0;
};

class Simulator {
  public:
    explicit Simulator(const ModelConfig& config);

    const ModelConfig& config() const { return config_; }
    const SpectralTransform& transform() const { return transform_; }
    double insolation_min() const { return s_min_; }  // S_0 over the nodes
    double insolation_max() const { return s_max_; }  // S_1 over the nodes

    SpectralField drift(const SpectralField& x) const;
    SpectralField diffusion(const SpectralField& x,
                            const SpectralField& noise_increment) const;

    // One exponential Euler step; pass nullptr for a deterministic step.
    State step(const State& state, const SpectralField* noise_increment) const;

    // Project physical samples / constants into the state truncation.
    SpectralField project(std::span<const double> samples) const;
    SpectralField constant_field(double value) const;

    // Shifted state for a physical initial temperature field u0.
    SpectralField initial_state(std::span<const double> u0_samples) const;

  private:
    ModelConfig config_;
    SpectralTransform transform_;
    std::vector<double> s_samples_;
    double s_min_ = 0.0, s_max_ = 0.0;
    double shift_ = 0.0; // -u_c, the explicit bookkeeping of the change of unknown
    double reaction_at(double x) const;
};

// K = max(u0_sup, g^{-1}(Q S_1 beta_w)); with eps = 0 trajectories started
// at u0 <= K stay below K.
double supersolution_K(const Simulator& sim, double u0_sup);

} // namespace sebm
