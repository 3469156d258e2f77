#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "tefdtd/builtins.hpp"
#include "tefdtd/cli.hpp"
#include "tefdtd/error.hpp"
#include "tefdtd/scenario.hpp"
#include "tefdtd/simulation.hpp"

using namespace tefdtd;
namespace fs = std::filesystem;

namespace {

const char* kSample = R"(# sample run
schema_version = 1
name = "sample"
threads = 2
seed = 9

[grid]
nx = 24
ny = 16
dx = 1.0e-3
dy = 1.5e-3

[time]
steps = 40
cfl_fraction = 0.95

[boundaries]
east = "pml"

[pml]
thickness = 6

[[material]]
shape = "rect"
x0 = 4.0e-3
y0 = 4.0e-3
x1 = 8.0e-3
y1 = 8.0e-3
eps_r = 4.0
sigma = 0.5
rho = 1000.0

[[subgrid]]
i0 = 10
j0 = 6
i1 = 14
j1 = 10
refine = 2

[[source]]
kind = "gaussian"
x = 3.5e-3
y = 12.5e-3
f0 = 12.0e9
hwhm = 6.0e9

[[probe]]
field = "hz"
x = 16.5e-3
y = 8.5e-3
stride = 2
name = "mid"

[audit]
enabled = true

[output]
snapshot_stride = 0
)";

fs::path temp_dir() {
    fs::path d = fs::temp_directory_path() / "tefdtd_test";
    fs::create_directories(d);
    return d;
}

} // namespace

TEST_CASE("config parsing fills the setup") {
    std::istringstream is(kSample);
    SimulationConfig cfg = parse_config(is);
    CHECK(cfg.name == "sample");
    CHECK(cfg.setup.threads == 2);
    CHECK(cfg.setup.seed == 9);
    CHECK(cfg.setup.grid.nx == 24);
    CHECK(cfg.setup.grid.dy == doctest::Approx(1.5e-3));
    CHECK(cfg.setup.steps == 40);
    CHECK(cfg.setup.cfl_fraction == doctest::Approx(0.95));
    CHECK(cfg.setup.boundaries.east == BoundaryKind::pml);
    CHECK(cfg.setup.boundaries.west == BoundaryKind::pec);
    CHECK(cfg.setup.pml.thickness == 6);
    REQUIRE(cfg.setup.materials.size() == 1);
    CHECK(cfg.setup.materials[0].eps_r == doctest::Approx(4.0));
    CHECK(cfg.setup.materials[0].rho == doctest::Approx(1000.0));
    REQUIRE(cfg.setup.subgrids.size() == 1);
    CHECK(cfg.setup.subgrids[0].refine == 2);
    REQUIRE(cfg.setup.sources.size() == 1);
    CHECK(cfg.setup.sources[0].f0 == doctest::Approx(12e9));
    REQUIRE(cfg.setup.probes.size() == 1);
    CHECK(cfg.setup.probes[0].stride == 2);
    CHECK(cfg.setup.audit.enabled);
}

TEST_CASE("canonical writing round-trips exactly") {
    std::istringstream is(kSample);
    SimulationConfig cfg = parse_config(is);
    const std::string once = config_to_string(cfg);
    std::istringstream is2(once);
    SimulationConfig cfg2 = parse_config(is2);
    CHECK(config_to_string(cfg2) == once);
}

TEST_CASE("parse errors carry line numbers") {
    auto expect_throw = [](const std::string& text, const char* needle) {
        std::istringstream is(text);
        try {
            parse_config(is);
            FAIL_CHECK("expected a config error for: " << needle);
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::config);
            CHECK(std::string(e.what()).find("line") != std::string::npos);
        }
    };
    expect_throw("schema_version = 2\n", "unsupported schema");
    expect_throw("schema_version = 1\nbogus = 3\n", "unknown key");
    expect_throw("schema_version = 1\n[nosuch]\nx = 1\n", "unknown section");
    expect_throw("schema_version = 1\n[grid]\nnx = \"a\"\n", "bad integer");
    expect_throw("schema_version = 1\n[boundaries]\nwest = \"open\"\n", "bad side");

    // A file with no schema_version at all is rejected at end of input.
    std::istringstream is("name = \"x\"\n");
    CHECK_THROWS_AS(parse_config(is), Error);
}

TEST_CASE("builtin catalogue") {
    const auto& list = builtin_list();
    REQUIRE(list.size() == 4);
    CHECK(is_builtin("cavity-stability"));
    CHECK(is_builtin("material-traverse"));
    CHECK(is_builtin("four-rod"));
    CHECK(is_builtin("synthetic-sar"));
    CHECK_FALSE(is_builtin("nope"));
    for (const auto& b : list) {
        SimulationConfig cfg = builtin_config(b.name);
        CHECK(cfg.setup.grid.nx > 0);
        CHECK(cfg.setup.steps > 0);
    }
    CHECK_THROWS_AS(builtin_config("nope"), Error);
}

TEST_CASE("scenario run writes the output set") {
    fs::path out = temp_dir() / "run_out";
    fs::remove_all(out);
    SimulationConfig cfg;
    cfg.name = "tiny";
    cfg.out_dir = out.string();
    cfg.setup.grid = GridSpec{20, 14, 1e-3, 1e-3};
    SourceSpec s;
    s.x = 5.5e-3;
    s.y = 7.5e-3;
    s.f0 = 15e9;
    s.hwhm = 8e9;
    cfg.setup.sources = {s};
    ProbeSpec p;
    p.x = 14.5e-3;
    p.y = 7.5e-3;
    p.name = "mid";
    cfg.setup.probes = {p};
    cfg.setup.steps = 60;
    cfg.snapshot_stride = 30;

    RunReport rep = run_scenario(cfg);
    CHECK(rep.steps_done == 60);
    CHECK_FALSE(rep.diverged);
    CHECK(rep.ledger_rows == 59);
    CHECK(rep.ledger_violations == 0);
    CHECK(rep.max_hz > 0.0);
    REQUIRE(rep.probe_peaks.size() == 1);
    CHECK(rep.probe_peaks[0].first == "mid");
    CHECK(rep.wall_seconds >= 0.0);

    CHECK(fs::exists(out / "ledger.csv"));
    CHECK(fs::exists(out / "probe_mid.csv"));
    CHECK(fs::exists(out / "report.txt"));
    CHECK(fs::exists(out / "snap_p0_s30.bin"));
    CHECK(fs::exists(out / "snap_p0_s60.bin"));

    // Probe CSV: header plus one row per sampled step.
    std::ifstream pf(out / "probe_mid.csv");
    std::string line;
    std::getline(pf, line);
    CHECK(line == "time_s,value");
    int rows = 0;
    while (std::getline(pf, line)) ++rows;
    CHECK(rows == 60);

    // The report must never leak wall-clock timing; runs stay diffable.
    std::ifstream rf(out / "report.txt");
    std::stringstream buf;
    buf << rf.rdbuf();
    CHECK(buf.str().find("tiny") != std::string::npos);
    CHECK(buf.str().find("second") == std::string::npos);
    CHECK(buf.str().find("wall") == std::string::npos);
}

TEST_CASE("snapshot files carry the documented binary layout") {
    fs::path out = temp_dir() / "snap_out";
    fs::create_directories(out);
    SimulationSetup su;
    su.grid = GridSpec{3, 2, 1e-3, 2e-3};
    SourceSpec s;
    s.x = 1.5e-3;
    s.y = 1.5e-3;
    s.f0 = 10e9;
    s.hwhm = 5e9;
    su.sources = {s};
    su.steps = 1;
    Simulation sim(su);
    sim.run();

    const fs::path file = out / "snap.bin";
    write_snapshot(file.string(), sim.patch(0), 0, 1.25e-12);

    std::ifstream f(file, std::ios::binary);
    char magic[8];
    f.read(magic, 8);
    CHECK(std::memcmp(magic, "TEFDSNAP", 8) == 0);
    std::uint32_t version, component, mx, my;
    f.read(reinterpret_cast<char*>(&version), 4);
    f.read(reinterpret_cast<char*>(&component), 4);
    f.read(reinterpret_cast<char*>(&mx), 4);
    f.read(reinterpret_cast<char*>(&my), 4);
    CHECK(version == 1);
    CHECK(component == 0);
    CHECK(mx == 3);
    CHECK(my == 2);
    double meta[5];
    f.read(reinterpret_cast<char*>(meta), sizeof meta);
    CHECK(meta[0] == 1e-3);
    CHECK(meta[1] == 2e-3);
    CHECK(meta[2] == 1.25e-12);
    std::vector<double> data(6);
    f.read(reinterpret_cast<char*>(data.data()), 6 * sizeof(double));
    CHECK(f.good());
    for (int k = 0; k < 6; ++k) CHECK(data[k] == sim.patch(0).hz[k]);
}

TEST_CASE("absorption map from tracked peaks") {
    SimulationSetup su;
    su.grid = GridSpec{3, 3, 2e-3, 2e-3};
    MaterialRegion tissue;
    tissue.x0 = 2e-3;
    tissue.y0 = 2e-3;
    tissue.x1 = 4e-3;
    tissue.y1 = 4e-3;
    tissue.sigma = 1.0;
    tissue.rho = 1000.0;
    su.materials = {tissue};
    SourceSpec s;
    s.x = 1e-3;
    s.y = 1e-3;
    s.f0 = 10e9;
    s.hwhm = 5e9;
    su.sources = {s};
    su.steps = 1;
    su.track_peaks = true;
    su.peak_window_end = 1e-9;
    Simulation sim(su);

    Patch& p = sim.patch_mut(0);
    REQUIRE_FALSE(p.ex_peak.empty());
    // Both E_x edges of the centre cell peak at 1 V/m; E_y stays quiet:
    // SAR = sigma (1^2 + 0)/(2 rho) = 5e-4 W/kg in that cell alone.
    p.ex_peak[p.g.ex_index(1, 1)] = 1.0;
    p.ex_peak[p.g.ex_index(1, 2)] = 1.0;

    SarMap map = compute_sar(sim, 0);
    REQUIRE(map.sar.size() == 9);
    CHECK(map.sar[map.g.hz_index(1, 1)] == doctest::Approx(5e-4).epsilon(1e-13));
    CHECK(map.peak == doctest::Approx(5e-4).epsilon(1e-13));
    for (int k = 0; k < 9; ++k)
        if (k != int(map.g.hz_index(1, 1))) CHECK(map.sar[k] == 0.0);

    // Integral weights each cell by its area.
    CHECK(sar_integral(map) == doctest::Approx(5e-4 * 4e-6).epsilon(1e-13));
    CHECK(sar_total(sim) == doctest::Approx(sar_integral(map)).epsilon(1e-13));
}

TEST_CASE("absorption needs tracked peaks") {
    SimulationSetup su;
    su.grid = GridSpec{3, 3, 2e-3, 2e-3};
    SourceSpec s;
    s.x = 1e-3;
    s.y = 1e-3;
    s.f0 = 10e9;
    s.hwhm = 5e9;
    su.sources = {s};
    su.steps = 1;
    Simulation sim(su);
    CHECK_THROWS_AS(compute_sar(sim, 0), Error);
}

TEST_CASE("reflection spectrum picks out a synthetic echo") {
    // Incident carries two tones; the echo returns a quarter of the 3 GHz one
    // only. Both sampled bins divide well-conditioned spectral amplitudes.
    const double fa = 3e9, fb = 5e9, dtp = 1e-11;
    const int n = 1000; // integer cycles of both tones and of every bin
    std::vector<double> incident(n), total(n);
    for (int k = 0; k < n; ++k) {
        const double t = k * dtp;
        const double ca = std::cos(2.0 * std::numbers::pi * fa * t);
        const double cb = std::cos(2.0 * std::numbers::pi * fb * t);
        incident[k] = ca + cb;
        total[k] = incident[k] + 0.25 * ca;
    }
    ReflectionSpectrum spec = compute_reflection(total, incident, dtp, 1e9, 10e9, 10);
    REQUIRE(spec.freq_hz.size() == 10);
    CHECK(spec.freq_hz.front() == doctest::Approx(1e9));
    CHECK(spec.freq_hz.back() == doctest::Approx(10e9));
    CHECK(spec.freq_hz[2] == doctest::Approx(3e9));
    CHECK(spec.ratio[2] == doctest::Approx(0.25).epsilon(1e-9));
    CHECK(spec.ratio[4] == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("relative l2 distance") {
    std::vector<double> a = {1.0, 2.0, -1.0};
    std::vector<double> b = {2.0, 4.0, -2.0};
    CHECK(rel_l2(a, a) == 0.0);
    CHECK(rel_l2(b, a) == doctest::Approx(1.0));
    CHECK(rel_l2(a, b) == doctest::Approx(0.5));
}

TEST_CASE("command line round trip") {
    fs::path dir = temp_dir();
    fs::path cfgfile = dir / "cli_case.toml";
    {
        std::ofstream f(cfgfile);
        f << kSample;
    }
    fs::path out = dir / "cli_out";
    fs::remove_all(out);

    CHECK(cli_entry({"scenarios"}) == 0);
    CHECK(cli_entry({"run", cfgfile.string(), "--out", out.string(), "--steps", "10"}) == 0);
    CHECK(fs::exists(out / "report.txt"));
    CHECK(cli_entry({"analyze", cfgfile.string()}) == 0);
    CHECK(cli_entry({"run", (dir / "missing.toml").string()}) == 2);
    CHECK(cli_entry({"wat"}) != 0);

    // Exported configs parse back.
    fs::path exported = dir / "exported.toml";
    CHECK(cli_entry({"analyze", cfgfile.string(), "--export-config", exported.string()}) == 0);
    SimulationConfig cfg = parse_config_file(exported.string());
    CHECK(cfg.setup.grid.nx == 24);
}
