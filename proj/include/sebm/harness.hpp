#pragma once

#include "sebm/dynamics.hpp"
#include "sebm/picard.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

// Ensemble driver, ice-cap detection, and run persistence: CSV for series,
// a versioned little-endian binary for spectral trajectories, JSON for the
// manifest. Every output file lands in the manifest with an FNV-1a
// checksum so reruns are verifiable byte for byte.

namespace sebm {

// A full run description: the model plus the physical initial temperature
// profile u0(x) and output options. Parsed from the same JSON document as
// the model config.
struct RunSpec {
    ModelConfig model;
    std::function<double(double)> initial; // u0(x) on [-1, 1]
    std::string initial_text;              // canonical description for hashing
    std::string canonical_json;            // sorted-key dump of the document
    bool emit_gnuplot = false;

    void validate() const;
};

RunSpec parse_run_spec(const std::string& json_text);

struct EnsembleResult {
    TrajectoryEnsemble ensemble;         // completed paths only
    std::vector<double> node_x;          // quadrature nodes of the run
    std::vector<double> mean_terminal;   // ensemble mean of u at T per node
    std::vector<double> var_terminal;    // ensemble variance of u at T
    Estimate fluctuation;                // B_T norm vs the eps = 0 trajectory
    int completed_paths = 0;
    bool complete = true;
    std::string error;                   // first failure message if partial
};

EnsembleResult run_ensemble(const RunSpec& spec);

struct IceReport {
    std::vector<double> crossings; // sorted latitudes where u crosses u_c
    double ice_fraction = 0.0;     // measure{u < u_c} / 2
};

// Reconstructs the shifted state on a fine uniform grid and refines each
// sign change of u - u_c by bisection to 1e-8 in x.
IceReport ice_line(const SpectralField& state, int grid_points = 2048);

struct FileRecord {
    std::string name;
    std::uint64_t checksum = 0; // FNV-1a over the file bytes
    std::uint64_t bytes = 0;
};

struct RunManifest {
    std::uint64_t config_hash = 0;
    std::uint64_t master_seed = 0;
    std::string code_version;
    std::string formats; // file-format version tags
    std::vector<FileRecord> files;
    double wall_seconds = 0.0;
    std::vector<std::pair<std::string, double>> phase_seconds;

    std::string to_json() const;
};

std::uint64_t fnv1a(const void* data, std::size_t bytes);
std::uint64_t fnv1a_file(const std::filesystem::path& path);
std::uint64_t config_hash(const RunSpec& spec);

// Trajectory container on disk: magic, version, path count, modes, steps,
// dt, then coefficients path-major / step-major, all little-endian.
void save_ensemble(const std::filesystem::path& path,
                   const TrajectoryEnsemble& ensemble);
TrajectoryEnsemble load_ensemble(const std::filesystem::path& path);

// Writes the standard output set for a completed run into out_dir:
// mean_field.csv, fluctuation.csv, trajectories.bin, manifest.json, and
// optionally plot.gp. Returns the manifest (also persisted).
RunManifest persist_run(const std::filesystem::path& out_dir,
                        const RunSpec& spec, const EnsembleResult& result,
                        std::vector<std::pair<std::string, double>> phases);

// Post-processing: per-time ensemble mean ice fraction and the crossing
// list of path 0, written as icefraction.csv in the run directory.
void write_ice_series(const std::filesystem::path& run_dir,
                      const TrajectoryEnsemble& ensemble);

} // namespace sebm
