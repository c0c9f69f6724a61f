#include "sebm/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

namespace sebm {

EmissionLaw EmissionLaw::affine(double offset, double slope) {
    EmissionLaw law;
    law.g = [offset, slope](double u) { return offset + slope * u; };
    law.gprime = [slope](double) { return slope; };
    law.lipschitz = slope;
    return law;
}

double EmissionLaw::inverse(double y) const {
    double lo = 0.0, hi = 0.0;
    double width = 1.0;
    while (g(hi) < y) { hi += width; width *= 2.0; }
    width = 1.0;
    while (g(lo) > y) { lo -= width; width *= 2.0; }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (g(mid) < y) lo = mid; else hi = mid;
        if (hi - lo < 1e-14 * (1.0 + std::abs(hi))) break;
    }
    return 0.5 * (lo + hi);
}

EmissionLaw truncate_g(const EmissionLaw& law, double K) {
    if (K <= 0.0) throw std::invalid_argument("truncate_g: K <= 0");
    const double g_lo = law.g(-K), g_hi = law.g(K);
    const double s_lo = law.gprime(-K), s_hi = law.gprime(K);
    EmissionLaw out;
    out.g = [=, g = law.g](double u) {
        if (u < -K) return g_lo + s_lo * (u + K);
        if (u > K) return g_hi + s_hi * (u - K);
        return g(u);
    };
    out.gprime = [=, gp = law.gprime](double u) {
        if (u < -K) return s_lo;
        if (u > K) return s_hi;
        return gp(u);
    };
    out.lipschitz = std::max({law.lipschitz, std::abs(s_lo), std::abs(s_hi)});
    return out;
}

int ModelConfig::steps() const {
    return static_cast<int>(std::lround(horizon / dt));
}

void ModelConfig::validate() const {
    if (Q <= 0.0) throw ConfigError("config: Q must be > 0");
    if (!insolation) throw ConfigError("config: missing insolation function");
    if (eps < 0.0) throw ConfigError("config: eps must be >= 0");
    if (mu <= 0.0) throw ConfigError("config: mu must be > 0");
    if (modes < 1) throw ConfigError("config: modes must be >= 1");
    if (dt <= 0.0) throw ConfigError("config: dt must be > 0");
    if (horizon <= 0.0) throw ConfigError("config: horizon must be > 0");
    if (ensemble < 1) throw ConfigError("config: ensemble must be >= 1");
    if (std::abs(steps() * dt - horizon) > 1e-9 * horizon)
        throw ConfigError("config: horizon must be an integer multiple of dt");
}

NoiseConfig ModelConfig::noise_config() const {
    NoiseConfig nc;
    nc.mu = mu;
    nc.modes = modes;
    nc.dt = dt;
    nc.steps = steps();
    nc.master_seed = seed;
    return nc;
}

ModelConfig parse_config(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    ModelConfig c;
    try {
        if (j.contains("Q")) c.Q = j.at("Q").get<double>();
        if (j.contains("eps")) c.eps = j.at("eps").get<double>();
        if (j.contains("mu")) c.mu = j.at("mu").get<double>();
        if (j.contains("modes")) c.modes = j.at("modes").get<int>();
        if (j.contains("dt")) c.dt = j.at("dt").get<double>();
        if (j.contains("horizon")) c.horizon = j.at("horizon").get<double>();
        if (j.contains("ensemble")) c.ensemble = j.at("ensemble").get<int>();
        if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();

        double beta_i = 0.3, beta_w = 0.7, delta = 0.25, u_c = -10.0;
        if (j.contains("coalbedo")) {
            const auto& cb = j.at("coalbedo");
            beta_i = cb.value("beta_ice", beta_i);
            beta_w = cb.value("beta_water", beta_w);
            delta = cb.value("delta", delta);
            u_c = cb.value("critical_temp", u_c);
        }
        try {
            c.profile = CoalbedoProfile(beta_i, beta_w, delta, u_c);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("config: ") + e.what());
        }

        if (j.contains("emission")) {
            const auto& em = j.at("emission");
            const double offset = em.value("offset", 0.0);
            const double slope = em.value("slope", 1.0);
            if (slope <= 0.0)
                throw ConfigError("config: emission slope must be > 0");
            c.emission = EmissionLaw::affine(offset, slope);
        }

        std::string s_type = "p2";
        double s2 = -0.482, s_value = 1.0;
        if (j.contains("insolation")) {
            const auto& ins = j.at("insolation");
            s_type = ins.value("type", s_type);
            s2 = ins.value("s2", s2);
            s_value = ins.value("value", s_value);
        }
        if (s_type == "constant") {
            if (s_value <= 0.0)
                throw ConfigError("config: insolation value must be > 0");
            c.insolation = [s_value](double) { return s_value; };
        } else if (s_type == "p2") {
            if (std::abs(s2) >= 1.0)
                throw ConfigError("config: insolation |s2| must be < 1 to keep S > 0");
            c.insolation = [s2](double x) {
                return 1.0 + s2 * 0.5 * (3.0 * x * x - 1.0);
            };
        } else {
            throw ConfigError("config: unknown insolation type '" + s_type + "'");
        }

        if (j.contains("reaction")) {
            const std::string r = j.at("reaction").get<std::string>();
            if (r == "beta") c.reaction = ReactionKind::Beta;
            else if (r == "theta") c.reaction = ReactionKind::Theta;
            else throw ConfigError("config: reaction must be 'beta' or 'theta'");
        }
        if (j.contains("linear_noise_a"))
            c.linear_noise_a = j.at("linear_noise_a").get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    c.validate();
    return c;
}

Simulator::Simulator(const ModelConfig& config)
    : config_(config), transform_(config.modes, 2 * config.modes) {
    config_.validate();
    const auto& nodes = transform_.rule().nodes;
    s_samples_.resize(nodes.size());
    for (std::size_t j = 0; j < nodes.size(); ++j)
        s_samples_[j] = config_.insolation(nodes[j]);
    s_min_ = *std::min_element(s_samples_.begin(), s_samples_.end());
    s_max_ = *std::max_element(s_samples_.begin(), s_samples_.end());
    if (s_min_ <= 0.0)
        throw ConfigError("config: insolation must be positive at every node");
    shift_ = -config_.profile.critical_temp;
}

double Simulator::reaction_at(double x) const {
    if (config_.reaction == ReactionKind::Beta) return config_.profile.beta(x);
    return config_.profile.theta(std::max(x, 0.0));
}

SpectralField Simulator::drift(const SpectralField& x) const {
    const auto samples = transform_.to_physical(x);
    std::vector<double> f(samples.size());
    for (std::size_t j = 0; j < samples.size(); ++j) {
        const double u = samples[j] + shift_;
        f[j] = config_.mu * u - config_.emission(u) +
               config_.Q * s_samples_[j] * reaction_at(samples[j]);
    }
    return transform_.to_spectral(f);
}

SpectralField Simulator::diffusion(const SpectralField& x,
                                   const SpectralField& noise_increment) const {
    const auto samples = transform_.to_physical(x);
    const auto w = transform_.to_physical(noise_increment);
    std::vector<double> f(samples.size());
    if (config_.linear_noise_a) {
        const double a = *config_.linear_noise_a;
        for (std::size_t j = 0; j < samples.size(); ++j)
            f[j] = a * samples[j] * w[j];
    } else {
        for (std::size_t j = 0; j < samples.size(); ++j)
            f[j] = config_.eps * config_.Q * s_samples_[j] *
                   reaction_at(samples[j]) * w[j];
    }
    return transform_.to_spectral(f);
}

State Simulator::step(const State& state, const SpectralField* noise_increment) const {
    SpectralField y = state.x + config_.dt * drift(state.x);
    const bool noisy =
        noise_increment != nullptr &&
        (config_.eps > 0.0 || config_.linear_noise_a.has_value());
    if (noisy) y += diffusion(state.x, *noise_increment);
    State next;
    next.x = semigroup_apply(y, config_.dt, config_.mu);
    next.t = state.t + config_.dt;
    if (!next.x.finite())
        throw NumericalError("step: non-finite coefficients (blow-up) at t = " +
                             std::to_string(next.t));
    return next;
}

SpectralField Simulator::project(std::span<const double> samples) const {
    return transform_.to_spectral(samples);
}

SpectralField Simulator::constant_field(double value) const {
    // e_0 = 1/sqrt(2), so a constant c has single coefficient c*sqrt(2).
    SpectralField field(config_.modes);
    field.coeffs[0] = value * std::sqrt(2.0);
    return field;
}

SpectralField Simulator::initial_state(std::span<const double> u0_samples) const {
    std::vector<double> shifted(u0_samples.begin(), u0_samples.end());
    for (double& v : shifted) v -= config_.profile.critical_temp;
    return transform_.to_spectral(shifted);
}

double supersolution_K(const Simulator& sim, double u0_sup) {
    const auto& c = sim.config();
    const double forced = sim.config().emission.inverse(
        c.Q * sim.insolation_max() * c.profile.beta_water);
    return std::max(u0_sup, forced);
}

} // namespace sebm
