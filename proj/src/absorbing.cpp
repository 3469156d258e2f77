#include "tefdtd/absorbing.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "tefdtd/constants.hpp"
#include "tefdtd/error.hpp"

namespace tefdtd {

void PmlSpec::validate() const {
    if (thickness < 4) throw Error(ErrorKind::config, "pml.thickness: must be >= 4 cells");
    if (!(grading_order > 0.0)) throw Error(ErrorKind::config, "pml.grading_order: must be > 0");
    if (!(reflection_target > 0.0) || reflection_target >= 1.0)
        throw Error(ErrorKind::config, "pml.reflection_target: must be in (0, 1)");
    if (sigma_max < 0.0) throw Error(ErrorKind::config, "pml.sigma_max: must be >= 0");
}

double PmlSpec::resolved_sigma_max(double depth_m) const {
    if (sigma_max > 0.0) return sigma_max;
    return -(grading_order + 1.0) * std::log(reflection_target) * eps0 * c0 / (2.0 * depth_m);
}

double SourceSpec::tau() const {
    return std::sqrt(2.0 * std::log(2.0)) / (2.0 * std::numbers::pi * hwhm);
}

double SourceSpec::resolved_delay() const {
    if (delay > 0.0) return delay;
    return kind == Kind::gaussian ? 6.0 * tau() : 0.0;
}

double SourceSpec::resolved_turn_off() const {
    if (turn_off >= 0.0) return turn_off;
    if (kind == Kind::gaussian) return resolved_delay() + 8.0 * tau();
    return std::numeric_limits<double>::infinity();
}

double SourceSpec::value(double t) const {
    if (amplitude == 0.0 || t > resolved_turn_off()) return 0.0;
    if (kind == Kind::gaussian) {
        const double u = t - resolved_delay();
        const double tt = tau();
        return amplitude * std::exp(-u * u / (2.0 * tt * tt)) *
               std::cos(2.0 * std::numbers::pi * f0 * u);
    }
    const double u = t - resolved_delay();
    if (u < 0.0) return 0.0;
    double ramp = 1.0;
    if (ramp_cycles > 0.0) {
        const double w = u * f0 / ramp_cycles;
        if (w < 1.0) ramp = 0.5 * (1.0 - std::cos(std::numbers::pi * w));
    }
    return amplitude * ramp * std::sin(2.0 * std::numbers::pi * f0 * u);
}

void SourceSpec::validate() const {
    if (!(f0 > 0.0)) throw Error(ErrorKind::config, "source.f0: must be > 0");
    if (kind == Kind::gaussian) {
        if (!(hwhm > 0.0)) throw Error(ErrorKind::config, "source.hwhm: must be > 0 for gaussian");
        // A shorter delay would start the waveform above 1e-5 of its peak.
        if (delay > 0.0 && delay < 5.0 * tau())
            throw Error(ErrorKind::config, "source.delay: must be >= 5 tau for gaussian");
    }
    if (ramp_cycles < 0.0) throw Error(ErrorKind::config, "source.ramp_cycles: must be >= 0");
}

void ProbeSpec::validate() const {
    if (stride < 1) throw Error(ErrorKind::config, "probe.stride: must be >= 1");
    if (name.empty()) throw Error(ErrorKind::config, "probe.name: must not be empty");
}

namespace {

struct Profile {
    // Graded sigma along one axis; lo/hi are the layer extents in meters.
    bool lo_on = false, hi_on = false;
    double lo_edge = 0.0, hi_edge = 0.0; // inner boundaries
    double depth_lo = 0.0, depth_hi = 0.0;
    double smax_lo = 0.0, smax_hi = 0.0;
    double order = 3.0;

    double sigma(double pos) const {
        if (lo_on && pos < lo_edge) {
            const double xi = (lo_edge - pos) / depth_lo;
            return smax_lo * std::pow(xi, order);
        }
        if (hi_on && pos > hi_edge) {
            const double xi = (pos - hi_edge) / depth_hi;
            return smax_hi * std::pow(xi, order);
        }
        return 0.0;
    }
};

Profile make_profile(bool lo, bool hi, double span, double delta, const PmlSpec& spec) {
    Profile p;
    p.order = spec.grading_order;
    const double depth = spec.thickness * delta;
    if (lo) {
        p.lo_on = true;
        p.lo_edge = depth;
        p.depth_lo = depth;
        p.smax_lo = spec.resolved_sigma_max(depth);
    }
    if (hi) {
        p.hi_on = true;
        p.hi_edge = span - depth;
        p.depth_hi = depth;
        p.smax_hi = spec.resolved_sigma_max(depth);
    }
    return p;
}

} // namespace

PmlData build_pml(const GridSpec& g, const BoundarySpec& sides, const PmlSpec& spec, TimeStep ts,
                  const std::vector<std::uint8_t>& excls, const std::vector<std::uint8_t>& eycls) {
    PmlData pml;
    if (!sides.any_pml()) return pml;
    spec.validate();
    const bool w = sides.west == BoundaryKind::pml, e = sides.east == BoundaryKind::pml;
    const bool s = sides.south == BoundaryKind::pml, n = sides.north == BoundaryKind::pml;
    if ((w || e) && 2 * spec.thickness >= g.nx)
        throw Error(ErrorKind::config, "pml.thickness: layers overlap in x");
    if ((s || n) && 2 * spec.thickness >= g.ny)
        throw Error(ErrorKind::config, "pml.thickness: layers overlap in y");

    const Profile px = make_profile(w, e, g.nx * g.dx, g.dx, spec);
    const Profile py = make_profile(s, n, g.ny * g.dy, g.dy, spec);
    const auto weights = [&](double sigma, double& bb, double& aa) {
        bb = std::exp(-sigma * ts.dt / eps0);
        aa = bb - 1.0;
    };

    double bb, aa;
    // E_x edges respond to the y grading (their curl term differences H in y).
    for (int j = 0; j <= g.ny; ++j) {
        const double sig = py.sigma(j * g.dy);
        if (sig <= 0.0) continue;
        weights(sig, bb, aa);
        for (int i = 0; i < g.nx; ++i) {
            const std::size_t k = g.ex_index(i, j);
            if (excls[k] == 0) pml.ex.push(k, bb, aa);
        }
    }
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i <= g.nx; ++i) {
            const double sig = px.sigma(i * g.dx);
            if (sig <= 0.0) continue;
            weights(sig, bb, aa);
            const std::size_t k = g.ey_index(i, j);
            if (eycls[k] == 0) pml.ey.push(k, bb, aa);
        }
    }
    // H nodes pick up both gradings, each correcting one curl component.
    for (int j = 0; j < g.ny; ++j) {
        const double sy = py.sigma((j + 0.5) * g.dy);
        for (int i = 0; i < g.nx; ++i) {
            const std::size_t k = g.hz_index(i, j);
            const double sx = px.sigma((i + 0.5) * g.dx);
            if (sy > 0.0) {
                weights(sy, bb, aa);
                pml.hy.push(k, bb, aa);
            }
            if (sx > 0.0) {
                weights(sx, bb, aa);
                pml.hx.push(k, bb, aa);
            }
        }
    }
    return pml;
}

} // namespace tefdtd
