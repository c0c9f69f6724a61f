#include "sebm/noise.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <stdexcept>

namespace sebm {

void NoiseConfig::validate() const {
    if (mu <= 0.0) throw std::invalid_argument("NoiseConfig: mu <= 0");
    if (modes < 1) throw std::invalid_argument("NoiseConfig: modes < 1");
    if (dt <= 0.0) throw std::invalid_argument("NoiseConfig: dt <= 0");
    if (steps < 0) throw std::invalid_argument("NoiseConfig: steps < 0");
}

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Uniform in (0, 1]; never returns 0, so log() below is safe.
double to_unit(std::uint64_t z) {
    return (static_cast<double>(z >> 11) + 1.0) * 0x1p-53;
}

} // namespace

double gauss_sample(std::uint64_t master_seed, std::uint64_t path,
                    std::uint64_t mode, std::uint64_t step) {
    // Stream key mixes seed, path and mode; the step indexes the counter.
    const std::uint64_t key =
        splitmix64(master_seed ^ splitmix64(path ^ splitmix64(mode)));
    const std::uint64_t z1 = splitmix64(key + 2 * step);
    const std::uint64_t z2 = splitmix64(key + 2 * step + 1);
    const double u1 = to_unit(z1);
    const double u2 = to_unit(z2);
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
}

NoisePath make_noise_path(const NoiseConfig& config, std::uint64_t path_index) {
    config.validate();
    NoisePath path;
    path.modes = config.modes;
    path.steps = config.steps;
    path.dt = config.dt;
    path.master_seed = config.master_seed;
    path.path_index = path_index;
    path.increments.resize(static_cast<std::size_t>(config.modes) * config.steps);
    const double sd = std::sqrt(config.dt);
    for (int n = 0; n < config.modes; ++n)
        for (int k = 0; k < config.steps; ++k)
            path.increment(n, k) =
                sd * gauss_sample(config.master_seed, path_index, n, k);
    return path;
}

TraceQ trace_q(double mu, int modes) {
    if (mu <= 0.0) throw std::invalid_argument("trace_q: mu <= 0");
    if (modes < 1) throw std::invalid_argument("trace_q: modes < 1");
    TraceQ out;
    for (int n = 0; n < modes; ++n)
        out.partial += 1.0 / (static_cast<double>(n) * (n + 1.0) + mu);
    // sum_{n>=N} 1/(n(n+1)) = 1/N by telescoping, and mu only shrinks it.
    out.tail_bound = 1.0 / modes;
    return out;
}

SpectralField sample_increment(const NoisePath& path, int step, double mu) {
    if (step < 0 || step >= path.steps)
        throw std::out_of_range("sample_increment: step out of range");
    SpectralField field(path.modes);
    for (int n = 0; n < path.modes; ++n)
        field.coeffs[n] = path.increment(n, step) /
                          std::sqrt(static_cast<double>(n) * (n + 1.0) + mu);
    return field;
}

Estimate isometry_estimate(int samples, double t, double mu, int modes,
                           std::uint64_t seed) {
    if (samples < 2) throw std::invalid_argument("isometry_estimate: samples < 2");
    if (t == 0.0) return {0.0, 0.0};
    // B^n_t ~ N(0, t) directly; no stepping needed for a marginal at t.
    double sum = 0.0, sum_sq = 0.0;
    const double sd = std::sqrt(t);
    for (int p = 0; p < samples; ++p) {
        double norm_sq = 0.0;
        for (int n = 0; n < modes; ++n) {
            const double b = sd * gauss_sample(seed, p, n, 0);
            norm_sq += b * b / (static_cast<double>(n) * (n + 1.0) + mu);
        }
        sum += norm_sq;
        sum_sq += norm_sq * norm_sq;
    }
    Estimate est;
    est.mean = sum / samples;
    const double var = (sum_sq - sum * sum / samples) / (samples - 1.0);
    est.stderr_ = std::sqrt(var / samples);
    return est;
}

namespace {

constexpr std::uint64_t kNoiseMagic = 0x5345424d4e4f4953ULL; // "SEBMNOIS"

void write_u64(std::ofstream& out, std::uint64_t v) {
    unsigned char buf[8];
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>(v >> (8 * i));
    out.write(reinterpret_cast<const char*>(buf), 8);
}

std::uint64_t read_u64(std::ifstream& in) {
    unsigned char buf[8];
    in.read(reinterpret_cast<char*>(buf), 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
    return v;
}

std::uint64_t bits_of(double d) {
    std::uint64_t v;
    std::memcpy(&v, &d, 8);
    return v;
}

double double_of(std::uint64_t v) {
    double d;
    std::memcpy(&d, &v, 8);
    return d;
}

} // namespace

void save_noise_path(const NoisePath& path, const std::string& filename) {
    std::ofstream out(filename, std::ios::binary);
    if (!out) throw std::runtime_error("save_noise_path: cannot open " + filename);
    write_u64(out, kNoiseMagic);
    write_u64(out, 1); // format version
    write_u64(out, path.master_seed);
    write_u64(out, path.path_index);
    write_u64(out, static_cast<std::uint64_t>(path.modes));
    write_u64(out, static_cast<std::uint64_t>(path.steps));
    write_u64(out, bits_of(path.dt));
    for (double v : path.increments) write_u64(out, bits_of(v));
    if (!out) throw std::runtime_error("save_noise_path: write failed");
}

NoisePath load_noise_path(const std::string& filename) {
    std::ifstream in(filename, std::ios::binary);
    if (!in) throw std::runtime_error("load_noise_path: cannot open " + filename);
    if (read_u64(in) != kNoiseMagic)
        throw std::runtime_error("load_noise_path: bad magic");
    if (read_u64(in) != 1)
        throw std::runtime_error("load_noise_path: unsupported version");
    NoisePath path;
    path.master_seed = read_u64(in);
    path.path_index = read_u64(in);
    path.modes = static_cast<int>(read_u64(in));
    path.steps = static_cast<int>(read_u64(in));
    path.dt = double_of(read_u64(in));
    path.increments.resize(static_cast<std::size_t>(path.modes) * path.steps);
    for (double& v : path.increments) v = double_of(read_u64(in));
    if (!in) throw std::runtime_error("load_noise_path: truncated file");
    return path;
}

} // namespace sebm
