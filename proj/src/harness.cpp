#include "sebm/harness.hpp"

#include "sebm/parallel.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace sebm {

namespace {

constexpr const char* kCodeVersion = "sebm 1.0.0";
constexpr const char* kFormats = "csv=1;trajectories=1;manifest=1";
constexpr std::uint64_t kTrajectoryMagic = 0x5345424d54524131ull; // "SEBMTRA1"

// Unit-norm basis row at one point; shares the three-term recurrence so a
// full row costs O(N) instead of O(N^2).
std::vector<double> basis_row(int modes, double x) {
    std::vector<double> row(modes);
    double p_prev = 1.0, p = x;
    for (int n = 0; n < modes; ++n) {
        double pn;
        if (n == 0) pn = 1.0;
        else if (n == 1) pn = x;
        else {
            pn = ((2.0 * n - 1.0) * x * p - (n - 1.0) * p_prev) / n;
            p_prev = p;
            p = pn;
        }
        row[n] = std::sqrt((2.0 * n + 1.0) / 2.0) * pn;
    }
    return row;
}

double evaluate_field(const SpectralField& field, double x) {
    const auto row = basis_row(field.modes(), x);
    double sum = 0.0;
    for (int n = 0; n < field.modes(); ++n) sum += field.coeffs[n] * row[n];
    return sum;
}

void write_u64(std::ostream& out, std::uint64_t v) {
    unsigned char buf[8];
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>(v >> (8 * i));
    out.write(reinterpret_cast<const char*>(buf), 8);
}

std::uint64_t read_u64(std::istream& in) {
    unsigned char buf[8];
    in.read(reinterpret_cast<char*>(buf), 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
    return v;
}

void write_f64(std::ostream& out, double v) {
    write_u64(out, std::bit_cast<std::uint64_t>(v));
}

double read_f64(std::istream& in) {
    return std::bit_cast<double>(read_u64(in));
}

FileRecord record_file(const std::filesystem::path& path) {
    FileRecord rec;
    rec.name = path.filename().string();
    rec.checksum = fnv1a_file(path);
    rec.bytes = std::filesystem::file_size(path);
    return rec;
}

} // namespace

void RunSpec::validate() const {
    model.validate();
    if (!initial) throw ConfigError("config: missing initial condition");
}

RunSpec parse_run_spec(const std::string& json_text) {
    RunSpec spec;
    spec.model = parse_config(json_text);

    nlohmann::json j = nlohmann::json::parse(json_text);
    spec.canonical_json = j.dump();

    std::string type = "constant";
    double value = 0.0, base = 0.0, amp = 0.0;
    if (j.contains("initial")) {
        const auto& init = j.at("initial");
        type = init.value("type", type);
        value = init.value("value", value);
        base = init.value("base", base);
        amp = init.value("amp", amp);
    }
    std::ostringstream text;
    if (type == "constant") {
        spec.initial = [value](double) { return value; };
        text << "constant:" << value;
    } else if (type == "p2") {
        // u0(x) = base + amp * P_2(x): smooth, symmetric, pole-to-equator.
        spec.initial = [base, amp](double x) {
            return base + amp * 0.5 * (3.0 * x * x - 1.0);
        };
        text << "p2:" << base << ":" << amp;
    } else {
        throw ConfigError("config: initial.type must be 'constant' or 'p2'");
    }
    spec.initial_text = text.str();
    spec.emit_gnuplot = j.value("emit_gnuplot", false);
    spec.validate();
    return spec;
}

EnsembleResult run_ensemble(const RunSpec& spec) {
    spec.validate();
    const ModelConfig& c = spec.model;
    const Simulator sim(c);
    const auto& nodes = sim.transform().rule().nodes;

    std::vector<double> u0(nodes.size());
    for (std::size_t j = 0; j < nodes.size(); ++j) u0[j] = spec.initial(nodes[j]);
    const SpectralField x0 = sim.initial_state(u0);

    const auto noise = make_ensemble_noise(c);
    std::vector<Trajectory> paths(c.ensemble);
    std::vector<std::string> failures(c.ensemble);
    parallel_for(c.ensemble, [&](int p) {
        try {
            paths[p] = run_path(sim, x0, noise[p]);
        } catch (const NumericalError& e) {
            failures[p] = e.what();
        }
    });

    EnsembleResult result;
    result.node_x.assign(nodes.begin(), nodes.end());
    result.ensemble.dt = c.dt;
    result.ensemble.steps = c.steps();
    for (int p = 0; p < c.ensemble; ++p) {
        if (failures[p].empty()) {
            result.ensemble.paths.push_back(std::move(paths[p]));
        } else if (result.error.empty()) {
            result.complete = false;
            result.error = failures[p];
        }
    }
    result.completed_paths = static_cast<int>(result.ensemble.paths.size());
    if (result.completed_paths == 0) return result;

    // Terminal mean and variance of the physical field u = X + u_c.
    const int nn = static_cast<int>(nodes.size());
    result.mean_terminal.assign(nn, 0.0);
    result.var_terminal.assign(nn, 0.0);
    std::vector<std::vector<double>> terminal(result.completed_paths);
    for (int p = 0; p < result.completed_paths; ++p) {
        terminal[p] =
            sim.transform().to_physical(result.ensemble.paths[p].states.back());
        for (double& v : terminal[p]) v += c.profile.critical_temp;
        for (int j = 0; j < nn; ++j) result.mean_terminal[j] += terminal[p][j];
    }
    for (double& v : result.mean_terminal) v /= result.completed_paths;
    if (result.completed_paths > 1) {
        for (int p = 0; p < result.completed_paths; ++p)
            for (int j = 0; j < nn; ++j) {
                const double d = terminal[p][j] - result.mean_terminal[j];
                result.var_terminal[j] += d * d;
            }
        for (double& v : result.var_terminal) v /= result.completed_paths - 1;
    }

    // Fluctuation about the noiseless trajectory in the B_T norm.
    ModelConfig det_cfg = c;
    det_cfg.eps = 0.0;
    det_cfg.linear_noise_a.reset();
    const Simulator det_sim(det_cfg);
    NoisePath dummy;
    dummy.modes = 0;
    dummy.steps = c.steps();
    dummy.dt = c.dt;
    TrajectoryEnsemble det;
    det.dt = c.dt;
    det.steps = c.steps();
    det.paths.assign(result.completed_paths, run_path(det_sim, x0, dummy));
    result.fluctuation = bt_norm(result.ensemble, det);
    return result;
}

IceReport ice_line(const SpectralField& state, int grid_points) {
    if (grid_points < 2) throw std::invalid_argument("ice_line: grid too coarse");
    IceReport report;
    std::vector<double> values(grid_points);
    std::vector<double> grid(grid_points);
    for (int i = 0; i < grid_points; ++i) {
        grid[i] = -1.0 + 2.0 * i / (grid_points - 1);
        values[i] = evaluate_field(state, grid[i]);
    }
    for (int i = 0; i + 1 < grid_points; ++i) {
        if ((values[i] < 0.0) == (values[i + 1] < 0.0)) continue;
        double lo = grid[i], hi = grid[i + 1];
        double f_lo = values[i];
        while (hi - lo > 1e-8) {
            const double mid = 0.5 * (lo + hi);
            const double f_mid = evaluate_field(state, mid);
            if ((f_mid < 0.0) == (f_lo < 0.0)) {
                lo = mid;
                f_lo = f_mid;
            } else {
                hi = mid;
            }
        }
        report.crossings.push_back(0.5 * (lo + hi));
    }
    std::sort(report.crossings.begin(), report.crossings.end());

    // Ice fraction: total length of segments between crossings whose
    // midpoint sits below the critical temperature, over |I| = 2.
    std::vector<double> edges{-1.0};
    edges.insert(edges.end(), report.crossings.begin(), report.crossings.end());
    edges.push_back(1.0);
    double ice = 0.0;
    for (std::size_t s = 0; s + 1 < edges.size(); ++s) {
        const double mid = 0.5 * (edges[s] + edges[s + 1]);
        if (evaluate_field(state, mid) < 0.0) ice += edges[s + 1] - edges[s];
    }
    report.ice_fraction = ice / 2.0;
    return report;
}

std::uint64_t fnv1a(const void* data, std::size_t bytes) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t hash = 14695981039346656037ull;
    for (std::size_t i = 0; i < bytes; ++i) {
        hash ^= p[i];
        hash *= 1099511628211ull;
    }
    return hash;
}

std::uint64_t fnv1a_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::uint64_t hash = 14695981039346656037ull;
    char buf[1 << 16];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            hash ^= static_cast<unsigned char>(buf[i]);
            hash *= 1099511628211ull;
        }
    }
    return hash;
}

std::uint64_t config_hash(const RunSpec& spec) {
    const std::string key = spec.canonical_json + "|" + spec.initial_text;
    return fnv1a(key.data(), key.size());
}

void save_ensemble(const std::filesystem::path& path,
                   const TrajectoryEnsemble& ensemble) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    const int modes =
        ensemble.paths.empty() ? 0 : ensemble.paths[0].states[0].modes();
    write_u64(out, kTrajectoryMagic);
    write_u64(out, 1); // format version
    write_u64(out, ensemble.paths.size());
    write_u64(out, static_cast<std::uint64_t>(modes));
    write_u64(out, static_cast<std::uint64_t>(ensemble.steps));
    write_f64(out, ensemble.dt);
    for (const auto& traj : ensemble.paths)
        for (const auto& state : traj.states)
            for (double c : state.coeffs) write_f64(out, c);
    if (!out) throw std::runtime_error("short write to " + path.string());
}

TrajectoryEnsemble load_ensemble(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    if (read_u64(in) != kTrajectoryMagic)
        throw std::runtime_error(path.string() + ": not a trajectory file");
    if (read_u64(in) != 1)
        throw std::runtime_error(path.string() + ": unsupported format version");
    const auto paths = read_u64(in);
    const auto modes = static_cast<int>(read_u64(in));
    const auto steps = static_cast<int>(read_u64(in));
    TrajectoryEnsemble ens;
    ens.steps = steps;
    ens.dt = read_f64(in);
    ens.paths.resize(paths);
    for (auto& traj : ens.paths) {
        traj.dt = ens.dt;
        traj.states.assign(steps + 1, SpectralField(modes));
        for (auto& state : traj.states)
            for (double& c : state.coeffs) c = read_f64(in);
    }
    if (!in) throw std::runtime_error(path.string() + ": truncated file");
    return ens;
}

std::string RunManifest::to_json() const {
    nlohmann::json j;
    j["config_hash"] = config_hash;
    j["master_seed"] = master_seed;
    j["code_version"] = code_version;
    j["formats"] = formats;
    j["wall_seconds"] = wall_seconds;
    for (const auto& [phase, seconds] : phase_seconds)
        j["phase_seconds"][phase] = seconds;
    for (const auto& rec : files)
        j["files"].push_back({{"name", rec.name},
                              {"checksum", rec.checksum},
                              {"bytes", rec.bytes}});
    return j.dump(2) + "\n";
}

RunManifest persist_run(const std::filesystem::path& out_dir,
                        const RunSpec& spec, const EnsembleResult& result,
                        std::vector<std::pair<std::string, double>> phases) {
    const auto start = std::chrono::steady_clock::now();
    std::filesystem::create_directories(out_dir);

    {
        std::ofstream csv(out_dir / "mean_field.csv");
        csv << "x,mean_u,var_u\n";
        csv.precision(17);
        for (std::size_t j = 0; j < result.node_x.size(); ++j)
            csv << result.node_x[j] << ',' << result.mean_terminal[j] << ','
                << result.var_terminal[j] << '\n';
    }
    {
        std::ofstream csv(out_dir / "fluctuation.csv");
        csv << "paths,bt_fluctuation,stderr\n";
        csv.precision(17);
        csv << result.completed_paths << ',' << result.fluctuation.mean << ','
            << result.fluctuation.stderr_ << '\n';
    }
    save_ensemble(out_dir / "trajectories.bin", result.ensemble);
    if (!result.complete) {
        nlohmann::json err;
        err["error"] = result.error;
        err["completed_paths"] = result.completed_paths;
        err["requested_paths"] = spec.model.ensemble;
        std::ofstream out(out_dir / "error.json");
        out << err.dump(2) << '\n';
    }
    if (spec.emit_gnuplot) {
        std::ofstream gp(out_dir / "plot.gp");
        gp << "set datafile separator ','\n"
           << "set xlabel 'x (sine of latitude)'\n"
           << "set ylabel 'temperature'\n"
           << "plot 'mean_field.csv' skip 1 using 1:2 with lines "
              "title 'ensemble mean at T'\n";
    }

    RunManifest manifest;
    manifest.config_hash = sebm::config_hash(spec);
    manifest.master_seed = spec.model.seed;
    manifest.code_version = kCodeVersion;
    manifest.formats = kFormats;
    manifest.phase_seconds = std::move(phases);
    for (const auto& name :
         {"mean_field.csv", "fluctuation.csv", "trajectories.bin"})
        manifest.files.push_back(record_file(out_dir / name));
    if (!result.complete)
        manifest.files.push_back(record_file(out_dir / "error.json"));
    if (spec.emit_gnuplot)
        manifest.files.push_back(record_file(out_dir / "plot.gp"));
    const auto end = std::chrono::steady_clock::now();
    double persist_seconds = std::chrono::duration<double>(end - start).count();
    manifest.phase_seconds.emplace_back("persist", persist_seconds);
    for (const auto& [phase, seconds] : manifest.phase_seconds)
        manifest.wall_seconds += seconds;

    std::ofstream out(out_dir / "manifest.json");
    out << manifest.to_json();
    return manifest;
}

void write_ice_series(const std::filesystem::path& run_dir,
                      const TrajectoryEnsemble& ensemble) {
    if (ensemble.paths.empty())
        throw std::runtime_error("write_ice_series: empty ensemble");
    const int points = ensemble.steps + 1;
    std::vector<double> mean_frac(points, 0.0), lo_frac(points, 1.0),
        hi_frac(points, 0.0);
    parallel_for(points, [&](int k) {
        for (const auto& traj : ensemble.paths) {
            const double f = ice_line(traj.states[k]).ice_fraction;
            mean_frac[k] += f;
            lo_frac[k] = std::min(lo_frac[k], f);
            hi_frac[k] = std::max(hi_frac[k], f);
        }
        mean_frac[k] /= static_cast<double>(ensemble.paths.size());
    });
    std::ofstream csv(run_dir / "icefraction.csv");
    csv << "t,mean_fraction,min_fraction,max_fraction\n";
    csv.precision(17);
    for (int k = 0; k < points; ++k)
        csv << k * ensemble.dt << ',' << mean_frac[k] << ',' << lo_frac[k]
            << ',' << hi_frac[k] << '\n';

    std::ofstream crossings(run_dir / "icelines.csv");
    crossings << "t,crossing\n";
    crossings.precision(17);
    for (int k = 0; k < points; ++k)
        for (double x : ice_line(ensemble.paths[0].states[k]).crossings)
            crossings << k * ensemble.dt << ',' << x << '\n';
}

} // namespace sebm
