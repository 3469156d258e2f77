#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tefdtd/grid.hpp"

namespace tefdtd {

enum class BoundaryKind { pec, pml };

struct BoundarySpec {
    BoundaryKind south = BoundaryKind::pec;
    BoundaryKind north = BoundaryKind::pec;
    BoundaryKind west = BoundaryKind::pec;
    BoundaryKind east = BoundaryKind::pec;
    bool any_pml() const {
        return south == BoundaryKind::pml || north == BoundaryKind::pml ||
               west == BoundaryKind::pml || east == BoundaryKind::pml;
    }
};

/// Graded absorbing layer backed by the outer PEC wall. Conductivity rises
/// polynomially from zero at the inner boundary to sigma_max at the wall:
/// sigma(d) = sigma_max (d/depth)^grading_order. When sigma_max is left at 0
/// it is derived from the normal-incidence reflection target:
/// sigma_max = -(order+1) ln(R0) eps0 c0 / (2 depth).
struct PmlSpec {
    int thickness = 10; // cells
    double grading_order = 3.0;
    double reflection_target = 1e-6;
    double sigma_max = 0.0; // 0 -> derived

    void validate() const;
    double resolved_sigma_max(double depth_m) const;
};

/// Soft magnetic-current source injected into one H_z node:
/// hz += g(t) dt / mu. Modulated Gaussian g(t) = A exp(-(t-t0)^2/(2 tau^2))
/// cos(2 pi f0 (t-t0)) with tau set from the spectral half width at half
/// maximum, or a ramped sinusoid. The waveform is clamped to exactly zero
/// after turn_off so post-excitation energy balances are exact.
struct SourceSpec {
    enum class Kind { gaussian, sinusoid };
    Kind kind = Kind::gaussian;
    double x = 0.0, y = 0.0; // meters
    double amplitude = 1.0;
    double f0 = 0.0;         // Hz
    double hwhm = 0.0;       // Hz, gaussian only
    double delay = 0.0;      // s; 0 -> 6 tau (gaussian) or 0 (sinusoid)
    double turn_off = -1.0;  // s; < 0 -> delay + 8 tau (gaussian) / never (sinusoid)
    double ramp_cycles = 2.0;

    double tau() const;
    double resolved_delay() const;
    double resolved_turn_off() const;
    double value(double t) const;
    void validate() const;
};

struct ProbeSpec {
    enum class Field { hz, ex, ey };
    Field field = Field::hz;
    double x = 0.0, y = 0.0; // meters
    int stride = 1;
    std::string name;

    void validate() const;
};

/// Sampled probe output. H_z samples carry half-step times (n+1/2) dt, E
/// samples integer times (n+1) dt.
struct ProbeSeries {
    ProbeSpec spec;
    std::vector<double> time_s;
    std::vector<double> value;
};

/// Convolutional accumulator set for one field family inside the layer:
/// compact index list plus per-entry recursion weights. psi_new = b psi +
/// a (spatial difference); zero conductivity gives b = 1, a = 0 and the
/// correction vanishes identically.
struct PmlSet {
    std::vector<std::size_t> idx;
    std::vector<double> b;
    std::vector<double> a;
    std::vector<double> psi;

    void push(std::size_t i, double bb, double aa) {
        idx.push_back(i);
        b.push_back(bb);
        a.push_back(aa);
        psi.push_back(0.0);
    }
    std::size_t size() const { return idx.size(); }
};

struct PmlData {
    PmlSet ex; // y-graded, corrects E_x
    PmlSet ey; // x-graded, corrects E_y
    PmlSet hy; // y-graded, corrects H via the d(E_x)/dy term
    PmlSet hx; // x-graded, corrects H via the d(E_y)/dx term
    bool any() const { return ex.size() || ey.size() || hx.size() || hy.size(); }
};

/// Builds the layer's recursion weights for the sides marked pml. Entries are
/// emitted only where the graded sigma is nonzero and the edge is interior
/// (class 0 in excls/eycls). Grading positions are the staggered component
/// locations, depth measured from the layer's inner boundary toward the wall.
PmlData build_pml(const GridSpec& g, const BoundarySpec& sides, const PmlSpec& spec, TimeStep ts,
                  const std::vector<std::uint8_t>& excls, const std::vector<std::uint8_t>& eycls);

} // namespace tefdtd
