#include <cstdio>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>

#include "tefdtd/error.hpp"
#include "tefdtd/scenario.hpp"

namespace tefdtd {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

// Strips a # comment, honouring (simple, unescaped) double quotes.
std::string strip_comment(const std::string& s) {
    bool q = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '"') q = !q;
        else if (s[i] == '#' && !q) return s.substr(0, i);
    }
    return s;
}

[[noreturn]] void fail(long ln, const std::string& msg) {
    throw Error(ErrorKind::config, "line " + std::to_string(ln) + ": " + msg);
}

double num(const std::string& v, long ln) {
    try {
        std::size_t used = 0;
        const double d = std::stod(v, &used);
        if (used != v.size()) fail(ln, "trailing characters after number '" + v + "'");
        return d;
    } catch (const Error&) {
        throw;
    } catch (...) {
        fail(ln, "expected a number, got '" + v + "'");
    }
}

long integer(const std::string& v, long ln) {
    try {
        std::size_t used = 0;
        const long d = std::stol(v, &used);
        if (used != v.size()) fail(ln, "trailing characters after integer '" + v + "'");
        return d;
    } catch (const Error&) {
        throw;
    } catch (...) {
        fail(ln, "expected an integer, got '" + v + "'");
    }
}

bool boolean(const std::string& v, long ln) {
    if (v == "true") return true;
    if (v == "false") return false;
    fail(ln, "expected true or false, got '" + v + "'");
}

std::string quoted(const std::string& v, long ln) {
    if (v.size() < 2 || v.front() != '"' || v.back() != '"')
        fail(ln, "expected a quoted string, got '" + v + "'");
    return v.substr(1, v.size() - 2);
}

BoundaryKind side_kind(const std::string& v, long ln) {
    const std::string s = quoted(v, ln);
    if (s == "pec") return BoundaryKind::pec;
    if (s == "pml") return BoundaryKind::pml;
    fail(ln, "boundary must be \"pec\" or \"pml\", got \"" + s + "\"");
}

} // namespace

SimulationConfig parse_config(std::istream& is) {
    SimulationConfig cfg;
    SimulationSetup& su = cfg.setup;
    std::string section; // active [section] or [[array]] name
    std::string line;
    long ln = 0;
    bool saw_version = false;

    while (std::getline(is, line)) {
        ++ln;
        line = trim(strip_comment(line));
        if (line.empty()) continue;

        if (line.size() >= 4 && line.substr(0, 2) == "[[" &&
            line.substr(line.size() - 2) == "]]") {
            section = trim(line.substr(2, line.size() - 4));
            if (section == "material") su.materials.emplace_back();
            else if (section == "subgrid") su.subgrids.emplace_back();
            else if (section == "source") su.sources.emplace_back();
            else if (section == "probe") su.probes.emplace_back();
            else fail(ln, "unknown array section [[" + section + "]]");
            continue;
        }
        if (line.front() == '[' && line.back() == ']') {
            section = trim(line.substr(1, line.size() - 2));
            if (section != "grid" && section != "time" && section != "boundaries" &&
                section != "pml" && section != "audit" && section != "peaks" &&
                section != "output")
                fail(ln, "unknown section [" + section + "]");
            continue;
        }

        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) fail(ln, "expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty() || val.empty()) fail(ln, "expected key = value");

        if (section.empty()) {
            if (key == "schema_version") {
                if (integer(val, ln) != 1) fail(ln, "schema_version: only 1 is supported");
                saw_version = true;
            } else if (key == "name") cfg.name = quoted(val, ln);
            else if (key == "threads") su.threads = int(integer(val, ln));
            else if (key == "seed") su.seed = std::uint64_t(integer(val, ln));
            else fail(ln, "unknown top-level key '" + key + "'");
        } else if (section == "grid") {
            if (key == "nx") su.grid.nx = int(integer(val, ln));
            else if (key == "ny") su.grid.ny = int(integer(val, ln));
            else if (key == "dx") su.grid.dx = num(val, ln);
            else if (key == "dy") su.grid.dy = num(val, ln);
            else fail(ln, "unknown key '" + key + "' in [grid]");
        } else if (section == "time") {
            if (key == "steps") su.steps = integer(val, ln);
            else if (key == "dt") su.dt = num(val, ln);
            else if (key == "cfl_fraction") su.cfl_fraction = num(val, ln);
            else fail(ln, "unknown key '" + key + "' in [time]");
        } else if (section == "boundaries") {
            if (key == "south") su.boundaries.south = side_kind(val, ln);
            else if (key == "north") su.boundaries.north = side_kind(val, ln);
            else if (key == "west") su.boundaries.west = side_kind(val, ln);
            else if (key == "east") su.boundaries.east = side_kind(val, ln);
            else fail(ln, "unknown key '" + key + "' in [boundaries]");
        } else if (section == "pml") {
            if (key == "thickness") su.pml.thickness = int(integer(val, ln));
            else if (key == "grading_order") su.pml.grading_order = num(val, ln);
            else if (key == "reflection_target") su.pml.reflection_target = num(val, ln);
            else if (key == "sigma_max") su.pml.sigma_max = num(val, ln);
            else fail(ln, "unknown key '" + key + "' in [pml]");
        } else if (section == "audit") {
            if (key == "enabled") su.audit.enabled = boolean(val, ln);
            else if (key == "interface_check") su.audit.interface_check = boolean(val, ln);
            else if (key == "tol_rel") su.audit.tol_rel = num(val, ln);
            else if (key == "tol_abs") su.audit.tol_abs = num(val, ln);
            else fail(ln, "unknown key '" + key + "' in [audit]");
        } else if (section == "peaks") {
            if (key == "enabled") su.track_peaks = boolean(val, ln);
            else if (key == "window_start") su.peak_window_start = num(val, ln);
            else if (key == "window_end") su.peak_window_end = num(val, ln);
            else fail(ln, "unknown key '" + key + "' in [peaks]");
        } else if (section == "output") {
            if (key == "directory") cfg.out_dir = quoted(val, ln);
            else if (key == "ledger") cfg.write_ledger = boolean(val, ln);
            else if (key == "probes") cfg.write_probes = boolean(val, ln);
            else if (key == "report") cfg.write_report = boolean(val, ln);
            else if (key == "snapshot_stride") cfg.snapshot_stride = int(integer(val, ln));
            else fail(ln, "unknown key '" + key + "' in [output]");
        } else if (section == "material") {
            MaterialRegion& m = su.materials.back();
            if (key == "shape") {
                const std::string s = quoted(val, ln);
                if (s == "rect") m.shape = MaterialRegion::Shape::rect;
                else if (s == "disc") m.shape = MaterialRegion::Shape::disc;
                else fail(ln, "material shape must be \"rect\" or \"disc\"");
            } else if (key == "x0") m.x0 = num(val, ln);
            else if (key == "y0") m.y0 = num(val, ln);
            else if (key == "x1") m.x1 = num(val, ln);
            else if (key == "y1") m.y1 = num(val, ln);
            else if (key == "cx") m.cx = num(val, ln);
            else if (key == "cy") m.cy = num(val, ln);
            else if (key == "radius") m.radius = num(val, ln);
            else if (key == "eps_r") m.eps_r = num(val, ln);
            else if (key == "mu_r") m.mu_r = num(val, ln);
            else if (key == "sigma") m.sigma = num(val, ln);
            else if (key == "rho") m.rho = num(val, ln);
            else fail(ln, "unknown key '" + key + "' in [[material]]");
        } else if (section == "subgrid") {
            SubgridRegion& r = su.subgrids.back();
            if (key == "i0") r.i0 = int(integer(val, ln));
            else if (key == "j0") r.j0 = int(integer(val, ln));
            else if (key == "i1") r.i1 = int(integer(val, ln));
            else if (key == "j1") r.j1 = int(integer(val, ln));
            else if (key == "refine") r.refine = int(integer(val, ln));
            else fail(ln, "unknown key '" + key + "' in [[subgrid]]");
        } else if (section == "source") {
            SourceSpec& s = su.sources.back();
            if (key == "kind") {
                const std::string k = quoted(val, ln);
                if (k == "gaussian") s.kind = SourceSpec::Kind::gaussian;
                else if (k == "sinusoid") s.kind = SourceSpec::Kind::sinusoid;
                else fail(ln, "source kind must be \"gaussian\" or \"sinusoid\"");
            } else if (key == "x") s.x = num(val, ln);
            else if (key == "y") s.y = num(val, ln);
            else if (key == "amplitude") s.amplitude = num(val, ln);
            else if (key == "f0") s.f0 = num(val, ln);
            else if (key == "hwhm") s.hwhm = num(val, ln);
            else if (key == "delay") s.delay = num(val, ln);
            else if (key == "turn_off") s.turn_off = num(val, ln);
            else if (key == "ramp_cycles") s.ramp_cycles = num(val, ln);
            else fail(ln, "unknown key '" + key + "' in [[source]]");
        } else if (section == "probe") {
            ProbeSpec& p = su.probes.back();
            if (key == "field") {
                const std::string f = quoted(val, ln);
                if (f == "hz") p.field = ProbeSpec::Field::hz;
                else if (f == "ex") p.field = ProbeSpec::Field::ex;
                else if (f == "ey") p.field = ProbeSpec::Field::ey;
                else fail(ln, "probe field must be \"hz\", \"ex\" or \"ey\"");
            } else if (key == "x") p.x = num(val, ln);
            else if (key == "y") p.y = num(val, ln);
            else if (key == "stride") p.stride = int(integer(val, ln));
            else if (key == "name") p.name = quoted(val, ln);
            else fail(ln, "unknown key '" + key + "' in [[probe]]");
        }
    }
    if (!saw_version) throw Error(ErrorKind::config, "schema_version = 1 is required");
    return cfg;
}

SimulationConfig parse_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw Error(ErrorKind::config, "cannot open config file: " + path);
    try {
        return parse_config(f);
    } catch (const Error& e) {
        throw Error(e.kind(), path + ": " + e.what());
    }
}

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

const char* fmt(bool v) { return v ? "true" : "false"; }

const char* side_name(BoundaryKind k) { return k == BoundaryKind::pec ? "pec" : "pml"; }

} // namespace

void write_config(std::ostream& os, const SimulationConfig& cfg) {
    const SimulationSetup& su = cfg.setup;
    os << "schema_version = 1\n";
    os << "name = \"" << cfg.name << "\"\n";
    os << "threads = " << su.threads << "\n";
    os << "seed = " << su.seed << "\n";
    os << "\n[grid]\n";
    os << "nx = " << su.grid.nx << "\n";
    os << "ny = " << su.grid.ny << "\n";
    os << "dx = " << fmt(su.grid.dx) << "\n";
    os << "dy = " << fmt(su.grid.dy) << "\n";
    os << "\n[time]\n";
    os << "steps = " << su.steps << "\n";
    os << "dt = " << fmt(su.dt) << "\n";
    os << "cfl_fraction = " << fmt(su.cfl_fraction) << "\n";
    os << "\n[boundaries]\n";
    os << "south = \"" << side_name(su.boundaries.south) << "\"\n";
    os << "north = \"" << side_name(su.boundaries.north) << "\"\n";
    os << "west = \"" << side_name(su.boundaries.west) << "\"\n";
    os << "east = \"" << side_name(su.boundaries.east) << "\"\n";
    os << "\n[pml]\n";
    os << "thickness = " << su.pml.thickness << "\n";
    os << "grading_order = " << fmt(su.pml.grading_order) << "\n";
    os << "reflection_target = " << fmt(su.pml.reflection_target) << "\n";
    os << "sigma_max = " << fmt(su.pml.sigma_max) << "\n";
    os << "\n[audit]\n";
    os << "enabled = " << fmt(su.audit.enabled) << "\n";
    os << "interface_check = " << fmt(su.audit.interface_check) << "\n";
    os << "tol_rel = " << fmt(su.audit.tol_rel) << "\n";
    os << "tol_abs = " << fmt(su.audit.tol_abs) << "\n";
    os << "\n[peaks]\n";
    os << "enabled = " << fmt(su.track_peaks) << "\n";
    os << "window_start = " << fmt(su.peak_window_start) << "\n";
    os << "window_end = " << fmt(su.peak_window_end) << "\n";
    os << "\n[output]\n";
    os << "directory = \"" << cfg.out_dir << "\"\n";
    os << "ledger = " << fmt(cfg.write_ledger) << "\n";
    os << "probes = " << fmt(cfg.write_probes) << "\n";
    os << "report = " << fmt(cfg.write_report) << "\n";
    os << "snapshot_stride = " << cfg.snapshot_stride << "\n";
    for (const MaterialRegion& m : su.materials) {
        os << "\n[[material]]\n";
        if (m.shape == MaterialRegion::Shape::rect) {
            os << "shape = \"rect\"\n";
            os << "x0 = " << fmt(m.x0) << "\n";
            os << "y0 = " << fmt(m.y0) << "\n";
            os << "x1 = " << fmt(m.x1) << "\n";
            os << "y1 = " << fmt(m.y1) << "\n";
        } else {
            os << "shape = \"disc\"\n";
            os << "cx = " << fmt(m.cx) << "\n";
            os << "cy = " << fmt(m.cy) << "\n";
            os << "radius = " << fmt(m.radius) << "\n";
        }
        os << "eps_r = " << fmt(m.eps_r) << "\n";
        os << "mu_r = " << fmt(m.mu_r) << "\n";
        os << "sigma = " << fmt(m.sigma) << "\n";
        os << "rho = " << fmt(m.rho) << "\n";
    }
    for (const SubgridRegion& r : su.subgrids) {
        os << "\n[[subgrid]]\n";
        os << "i0 = " << r.i0 << "\n";
        os << "j0 = " << r.j0 << "\n";
        os << "i1 = " << r.i1 << "\n";
        os << "j1 = " << r.j1 << "\n";
        os << "refine = " << r.refine << "\n";
    }
    for (const SourceSpec& s : su.sources) {
        os << "\n[[source]]\n";
        os << "kind = \"" << (s.kind == SourceSpec::Kind::gaussian ? "gaussian" : "sinusoid")
           << "\"\n";
        os << "x = " << fmt(s.x) << "\n";
        os << "y = " << fmt(s.y) << "\n";
        os << "amplitude = " << fmt(s.amplitude) << "\n";
        os << "f0 = " << fmt(s.f0) << "\n";
        os << "hwhm = " << fmt(s.hwhm) << "\n";
        os << "delay = " << fmt(s.delay) << "\n";
        os << "turn_off = " << fmt(s.turn_off) << "\n";
        os << "ramp_cycles = " << fmt(s.ramp_cycles) << "\n";
    }
    for (const ProbeSpec& p : su.probes) {
        os << "\n[[probe]]\n";
        const char* f = p.field == ProbeSpec::Field::hz ? "hz"
                        : p.field == ProbeSpec::Field::ex ? "ex"
                                                          : "ey";
        os << "field = \"" << f << "\"\n";
        os << "x = " << fmt(p.x) << "\n";
        os << "y = " << fmt(p.y) << "\n";
        os << "stride = " << p.stride << "\n";
        os << "name = \"" << p.name << "\"\n";
    }
}

std::string config_to_string(const SimulationConfig& cfg) {
    std::ostringstream os;
    write_config(os, cfg);
    return os.str();
}

} // namespace tefdtd
