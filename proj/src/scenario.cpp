#include "tefdtd/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <ostream>

#include "tefdtd/error.hpp"

namespace tefdtd {

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_probe_csv(const std::string& path, const ProbeSeries& s) {
    std::ofstream f(path);
    if (!f) throw Error(ErrorKind::diagnostic, "cannot write " + path);
    f << "time_s,value\n";
    for (std::size_t i = 0; i < s.time_s.size(); ++i)
        f << fmt(s.time_s[i]) << "," << fmt(s.value[i]) << "\n";
}

} // namespace

RunReport run_scenario(const SimulationConfig& cfg) {
    Simulation sim(cfg.setup);
    return run_scenario(cfg, sim);
}

RunReport run_scenario(const SimulationConfig& cfg, Simulation& sim) {
    namespace fs = std::filesystem;
    const bool out = !cfg.out_dir.empty();
    if (out) fs::create_directories(cfg.out_dir);

    const auto t0 = std::chrono::steady_clock::now();
    if (out && cfg.snapshot_stride > 0) {
        for (long s = 0; s < cfg.setup.steps && !sim.diverged(); ++s) {
            sim.step();
            if (sim.steps_done() % cfg.snapshot_stride == 0) {
                const double t = (sim.steps_done() - 0.5) * sim.dt();
                for (std::size_t p = 0; p < sim.patch_count(); ++p)
                    write_snapshot(cfg.out_dir + "/snap_p" + std::to_string(p) + "_s" +
                                       std::to_string(sim.steps_done()) + ".bin",
                                   sim.patch(p), 0, t);
            }
        }
    } else {
        sim.run();
    }
    const auto t1 = std::chrono::steady_clock::now();

    RunReport r;
    r.name = cfg.name;
    r.grid = cfg.setup.grid;
    r.dt = sim.dt();
    r.steps_requested = cfg.setup.steps;
    r.steps_done = sim.steps_done();
    r.diverged = sim.diverged();
    r.ledger_rows = long(sim.ledger().records.size());
    r.ledger_violations = sim.ledger().violations;
    r.min_slack = r.ledger_rows > 0 ? sim.ledger().min_slack : 0.0;
    r.max_hz = sim.max_hz();
    r.max_hz_prefix = sim.max_hz_prefix();
    r.max_interface_supply_abs = sim.max_interface_supply_abs();
    r.max_interface_supply_rel = sim.max_interface_supply_rel();
    r.storage_last = sim.last_storage();
    for (const ProbeSeries& s : sim.probe_series()) {
        double peak = 0.0;
        for (const double v : s.value) peak = std::max(peak, std::abs(v));
        r.probe_peaks.emplace_back(s.spec.name, peak);
    }
    r.wall_seconds = std::chrono::duration<double>(t1 - t0).count();

    if (out) {
        if (cfg.write_ledger && cfg.setup.audit.enabled) {
            std::ofstream f(cfg.out_dir + "/ledger.csv");
            if (!f) throw Error(ErrorKind::diagnostic, "cannot write " + cfg.out_dir + "/ledger.csv");
            sim.ledger().write_csv(f);
        }
        if (cfg.write_probes)
            for (const ProbeSeries& s : sim.probe_series())
                write_probe_csv(cfg.out_dir + "/probe_" + s.spec.name + ".csv", s);
        if (cfg.write_report) {
            std::ofstream f(cfg.out_dir + "/report.txt");
            if (!f) throw Error(ErrorKind::diagnostic, "cannot write " + cfg.out_dir + "/report.txt");
            write_report(f, r);
        }
    }
    return r;
}

void write_report(std::ostream& os, const RunReport& r) {
    os << "name: " << r.name << "\n";
    os << "grid: " << r.grid.nx << " x " << r.grid.ny << ", dx = " << fmt(r.grid.dx)
       << " m, dy = " << fmt(r.grid.dy) << " m\n";
    os << "dt: " << fmt(r.dt) << " s\n";
    os << "steps: " << r.steps_requested << " requested, " << r.steps_done << " completed\n";
    os << "diverged: " << (r.diverged ? "yes" : "no") << "\n";
    os << "ledger rows: " << r.ledger_rows << "\n";
    os << "ledger violations: " << r.ledger_violations << "\n";
    os << "min slack: " << fmt(r.min_slack) << " J/m\n";
    os << "max |H_z|: " << fmt(r.max_hz) << " A/m\n";
    os << "max |H_z| in prefix window: " << fmt(r.max_hz_prefix) << " A/m\n";
    os << "interface supply max abs: " << fmt(r.max_interface_supply_abs) << " J/m\n";
    os << "interface supply max rel: " << fmt(r.max_interface_supply_rel) << "\n";
    os << "last storage: " << fmt(r.storage_last) << " J/m\n";
    for (const auto& [name, peak] : r.probe_peaks)
        os << "probe " << name << " peak: " << fmt(peak) << "\n";
}

SarMap compute_sar(const Simulation& sim, std::size_t patch_index) {
    const Patch& p = sim.patch(patch_index);
    if (p.ex_peak.empty())
        throw Error(ErrorKind::diagnostic, "sar: run needs peak tracking enabled");
    SarMap m;
    m.g = p.g;
    m.ox = p.ox;
    m.oy = p.oy;
    m.sar.assign(p.g.n_hz(), 0.0);
    for (int j = 0; j < p.g.ny; ++j) {
        for (int i = 0; i < p.g.nx; ++i) {
            const std::size_t k = p.g.hz_index(i, j);
            if (!p.hzmask[k] || p.rho_cell[k] <= 0.0) continue;
            const double exc = 0.5 * (p.ex_peak[p.g.ex_index(i, j)] + p.ex_peak[p.g.ex_index(i, j + 1)]);
            const double eyc = 0.5 * (p.ey_peak[p.g.ey_index(i, j)] + p.ey_peak[p.g.ey_index(i + 1, j)]);
            m.sar[k] = p.sigma_cell[k] * (exc * exc + eyc * eyc) / (2.0 * p.rho_cell[k]);
            m.peak = std::max(m.peak, m.sar[k]);
        }
    }
    return m;
}

double sar_integral(const SarMap& m) {
    double s = 0.0;
    for (const double v : m.sar) s += v;
    return s * m.g.dx * m.g.dy;
}

double sar_total(const Simulation& sim) {
    double s = 0.0;
    for (std::size_t p = 0; p < sim.patch_count(); ++p) s += sar_integral(compute_sar(sim, p));
    return s;
}

ReflectionSpectrum compute_reflection(std::span<const double> total,
                                      std::span<const double> incident, double sample_dt,
                                      double f_lo, double f_hi, int bins) {
    if (bins < 1) throw Error(ErrorKind::argument, "reflection: bins must be >= 1");
    if (!(sample_dt > 0.0)) throw Error(ErrorKind::argument, "reflection: sample_dt must be > 0");
    const std::size_t n = std::min(total.size(), incident.size());
    ReflectionSpectrum out;
    out.freq_hz.resize(bins);
    out.ratio.resize(bins);
    for (int k = 0; k < bins; ++k) {
        const double f = bins == 1 ? f_lo : f_lo + k * (f_hi - f_lo) / (bins - 1);
        std::complex<double> refl = 0.0, inc = 0.0;
        for (std::size_t s = 0; s < n; ++s) {
            const double ph = -2.0 * std::numbers::pi * f * (double(s) * sample_dt);
            const std::complex<double> w(std::cos(ph), std::sin(ph));
            refl += (total[s] - incident[s]) * w;
            inc += incident[s] * w;
        }
        out.freq_hz[k] = f;
        const double denom = std::abs(inc);
        out.ratio[k] = std::abs(refl) / (denom > 0.0 ? denom : 1e-300);
    }
    return out;
}

double rel_l2(std::span<const double> a, std::span<const double> b) {
    const std::size_t n = std::min(a.size(), b.size());
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = a[i] - b[i];
        num += d * d;
        den += b[i] * b[i];
    }
    if (den == 0.0) return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return std::sqrt(num / den);
}

void write_snapshot(const std::string& path, const Patch& p, int component, double time_s) {
    const std::vector<double>* data = nullptr;
    std::uint32_t mx = 0, my = 0;
    switch (component) {
    case 0:
        data = &p.hz;
        mx = std::uint32_t(p.g.nx);
        my = std::uint32_t(p.g.ny);
        break;
    case 1:
        data = &p.ex;
        mx = std::uint32_t(p.g.nx);
        my = std::uint32_t(p.g.ny + 1);
        break;
    case 2:
        data = &p.ey;
        mx = std::uint32_t(p.g.nx + 1);
        my = std::uint32_t(p.g.ny);
        break;
    default: throw Error(ErrorKind::argument, "snapshot: component must be 0 (hz), 1 (ex) or 2 (ey)");
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorKind::diagnostic, "cannot write " + path);
    const char magic[8] = {'T', 'E', 'F', 'D', 'S', 'N', 'A', 'P'};
    const std::uint32_t version = 1, comp = std::uint32_t(component);
    f.write(magic, 8);
    f.write(reinterpret_cast<const char*>(&version), 4);
    f.write(reinterpret_cast<const char*>(&comp), 4);
    f.write(reinterpret_cast<const char*>(&mx), 4);
    f.write(reinterpret_cast<const char*>(&my), 4);
    const double head[5] = {p.g.dx, p.g.dy, time_s, p.ox, p.oy};
    f.write(reinterpret_cast<const char*>(head), sizeof(head));
    f.write(reinterpret_cast<const char*>(data->data()), std::streamsize(data->size() * 8));
}

} // namespace tefdtd
