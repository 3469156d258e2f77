#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "tefdtd/simulation.hpp"

namespace tefdtd {

/// One runnable scenario: a simulation setup plus naming and output control.
/// Mirrors the config file format one to one.
struct SimulationConfig {
    int schema_version = 1;
    std::string name = "run";
    SimulationSetup setup;

    std::string out_dir;     // empty -> write nothing
    bool write_ledger = true;
    bool write_probes = true;
    bool write_report = true;
    int snapshot_stride = 0; // H_z snapshots every N steps, 0 -> none
};

/// Parses the key = value config format (see README). Throws Error(config)
/// with the offending line number. Unknown keys and sections are errors.
SimulationConfig parse_config(std::istream& is);
SimulationConfig parse_config_file(const std::string& path);

/// Writes a config that parses back to identical values (%.17g round trip).
void write_config(std::ostream& os, const SimulationConfig& cfg);
std::string config_to_string(const SimulationConfig& cfg);

struct RunReport {
    std::string name;
    GridSpec grid;
    double dt = 0.0;
    long steps_requested = 0;
    long steps_done = 0;
    bool diverged = false;
    long ledger_rows = 0;
    long ledger_violations = 0;
    double min_slack = 0.0;
    double max_hz = 0.0;
    double max_hz_prefix = 0.0;
    double max_interface_supply_abs = 0.0;
    double max_interface_supply_rel = 0.0;
    double storage_last = 0.0;
    std::vector<std::pair<std::string, double>> probe_peaks;
    double wall_seconds = 0.0; // in-memory only, never written to files
};

/// Builds the simulation, steps it to completion, writes the requested
/// outputs (ledger.csv, probe_<name>.csv, report.txt, snapshots) under
/// cfg.out_dir, and returns the summary. The caller can pass a prebuilt
/// simulation to keep access to fields and peaks afterwards.
RunReport run_scenario(const SimulationConfig& cfg);
RunReport run_scenario(const SimulationConfig& cfg, Simulation& sim);

void write_report(std::ostream& os, const RunReport& r);

/// Local specific absorption rate from tracked field peaks (W/kg per cell):
/// sar = sigma (Ex_c^2 + Ey_c^2) / (2 rho) with the peak edge fields averaged
/// to the cell centre; cells with rho == 0 or hidden behind a refinement get 0.
struct SarMap {
    GridSpec g;
    double ox = 0.0, oy = 0.0;
    std::vector<double> sar;
    double peak = 0.0;
};

SarMap compute_sar(const Simulation& sim, std::size_t patch_index);
/// Area integral of the map, sum sar dx dy (W m^2 / kg).
double sar_integral(const SarMap& m);
/// Integral over every patch, masked coarse cells excluded.
double sar_total(const Simulation& sim);

/// Reflection magnitude per frequency bin from two probe recordings of the
/// same point, with and without the scatterer: |DFT(total - incident)| /
/// |DFT(incident)| at `bins` frequencies linearly spaced over [f_lo, f_hi].
/// sample_dt is the probe sampling interval (stride * dt).
struct ReflectionSpectrum {
    std::vector<double> freq_hz;
    std::vector<double> ratio;
};

ReflectionSpectrum compute_reflection(std::span<const double> total,
                                      std::span<const double> incident, double sample_dt,
                                      double f_lo, double f_hi, int bins);

/// Relative L2 distance ||a - b|| / ||b|| over the common prefix.
double rel_l2(std::span<const double> a, std::span<const double> b);

/// Binary field snapshot: 8-byte magic "TEFDSNAP", u32 version, component
/// (0 hz, 1 ex, 2 ey), array dims mx, my, then f64 dx, dy, time_s, origin x/y
/// and mx*my row-major f64 samples.
void write_snapshot(const std::string& path, const Patch& p, int component, double time_s);

} // namespace tefdtd
