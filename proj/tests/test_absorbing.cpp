#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "tefdtd/absorbing.hpp"
#include "tefdtd/constants.hpp"
#include "tefdtd/error.hpp"
#include "tefdtd/simulation.hpp"

using namespace tefdtd;

TEST_CASE("layer spec validation") {
    PmlSpec p;
    CHECK_NOTHROW(p.validate());
    p.thickness = 3;
    CHECK_THROWS_AS(p.validate(), Error);
    p = PmlSpec{};
    p.grading_order = 0.0;
    CHECK_THROWS_AS(p.validate(), Error);
    p = PmlSpec{};
    p.reflection_target = 1.0;
    CHECK_THROWS_AS(p.validate(), Error);
    p = PmlSpec{};
    p.sigma_max = -1.0;
    CHECK_THROWS_AS(p.validate(), Error);
}

TEST_CASE("conductivity ceiling from the reflection target") {
    PmlSpec p; // order 3, target 1e-6
    CHECK(p.resolved_sigma_max(0.01) == doctest::Approx(7.3344299963619584).epsilon(1e-13));
    // Scales inversely with depth.
    CHECK(p.resolved_sigma_max(0.02) == doctest::Approx(0.5 * 7.3344299963619584).epsilon(1e-13));
    p.sigma_max = 2.5;
    CHECK(p.resolved_sigma_max(0.01) == 2.5);
}

TEST_CASE("gaussian drive shape and clamping") {
    SourceSpec s;
    s.amplitude = 3.0;
    s.f0 = 10e9;
    s.hwhm = 1e9;
    CHECK(s.tau() == doctest::Approx(1.8739062512927758e-10).epsilon(1e-13));
    CHECK(s.resolved_delay() == doctest::Approx(6.0 * s.tau()));
    CHECK(s.resolved_turn_off() == doctest::Approx(s.resolved_delay() + 8.0 * s.tau()));

    // Peak value is the amplitude; the waveform is exactly zero after turn-off.
    CHECK(s.value(s.resolved_delay()) == doctest::Approx(3.0).epsilon(1e-13));
    CHECK(s.value(s.resolved_turn_off() + 1e-15) == 0.0);
    CHECK(s.value(0.9 * s.resolved_turn_off()) != 0.0);

    s.turn_off = 5e-10;
    CHECK(s.resolved_turn_off() == 5e-10);
    CHECK(s.value(5.1e-10) == 0.0);

    CHECK_NOTHROW(s.validate());
    s.delay = 4.0 * s.tau(); // too close to t = 0
    CHECK_THROWS_AS(s.validate(), Error);
    s.delay = 0.0;
    s.hwhm = 0.0;
    CHECK_THROWS_AS(s.validate(), Error);
}

TEST_CASE("ramped sinusoid drive") {
    SourceSpec s;
    s.kind = SourceSpec::Kind::sinusoid;
    s.amplitude = 2.0;
    s.f0 = 1e9;
    s.ramp_cycles = 2.0;
    CHECK(s.value(-1e-12) == 0.0);
    CHECK(s.resolved_delay() == 0.0);
    // Quarter period into the ramp: sin peaks, envelope at 0.5 (1 - cos(pi/8)).
    const double v = s.value(0.25e-9);
    CHECK(v == doctest::Approx(2.0 * 0.5 * (1.0 - std::cos(std::numbers::pi * 0.125))));
    // Past the ramp the envelope is gone.
    CHECK(s.value(2.25e-9) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(s.resolved_turn_off() == std::numeric_limits<double>::infinity());

    s.f0 = 0.0;
    CHECK_THROWS_AS(s.validate(), Error);
}

TEST_CASE("probe spec validation") {
    ProbeSpec p;
    p.name = "x";
    CHECK_NOTHROW(p.validate());
    p.stride = 0;
    CHECK_THROWS_AS(p.validate(), Error);
    p.stride = 1;
    p.name.clear();
    CHECK_THROWS_AS(p.validate(), Error);
}

namespace {

std::vector<std::uint8_t> pinned_excls(const GridSpec& g) {
    std::vector<std::uint8_t> cls(g.n_ex(), node_interior);
    for (int i = 0; i < g.nx; ++i) {
        cls[g.ex_index(i, 0)] = node_pinned;
        cls[g.ex_index(i, g.ny)] = node_pinned;
    }
    return cls;
}

std::vector<std::uint8_t> pinned_eycls(const GridSpec& g) {
    std::vector<std::uint8_t> cls(g.n_ey(), node_interior);
    for (int j = 0; j < g.ny; ++j) {
        cls[g.ey_index(0, j)] = node_pinned;
        cls[g.ey_index(g.nx, j)] = node_pinned;
    }
    return cls;
}

} // namespace

TEST_CASE("layer population for a single west-side layer") {
    GridSpec g{20, 10, 1e-3, 1e-3};
    BoundarySpec sides;
    sides.west = BoundaryKind::pml;
    PmlSpec spec;
    spec.thickness = 5;
    TimeStep ts{2.335e-12};
    PmlData pml = build_pml(g, sides, spec, ts, pinned_excls(g), pinned_eycls(g));

    // No y grading: nothing corrects E_x or the y half of H.
    CHECK(pml.ex.size() == 0);
    CHECK(pml.hy.size() == 0);
    // E_y columns 1..4 sit in the layer (0 is the pinned wall); H columns 0..4.
    CHECK(pml.ey.size() == 4 * 10);
    CHECK(pml.hx.size() == 5 * 10);
    CHECK(pml.any());

    // Column i=1 sits 4 of 5 cells deep: sigma = smax (4/5)^3, b = exp(-sigma dt/eps0).
    const double smax = spec.resolved_sigma_max(5e-3);
    bool found = false;
    for (std::size_t k = 0; k < pml.ey.size(); ++k) {
        if (pml.ey.idx[k] == g.ey_index(1, 3)) {
            found = true;
            CHECK(pml.ey.b[k] == doctest::Approx(0.13798157231400318).epsilon(1e-10));
            CHECK(pml.ey.b[k] ==
                  doctest::Approx(std::exp(-smax * 0.512 * ts.dt / eps0)).epsilon(1e-13));
            CHECK(pml.ey.a[k] == doctest::Approx(pml.ey.b[k] - 1.0).epsilon(1e-13));
        }
    }
    CHECK(found);
    for (double v : pml.ey.psi) CHECK(v == 0.0);
}

TEST_CASE("explicit conductivity ceiling reproduces the derived one") {
    GridSpec g{24, 12, 1e-3, 1e-3};
    BoundarySpec sides;
    sides.west = sides.east = sides.south = sides.north = BoundaryKind::pml;
    PmlSpec derived;
    derived.thickness = 5;
    PmlSpec explicit_spec = derived;
    explicit_spec.sigma_max = derived.resolved_sigma_max(5e-3);
    TimeStep ts{1e-12};
    PmlData a = build_pml(g, sides, derived, ts, pinned_excls(g), pinned_eycls(g));
    PmlData b = build_pml(g, sides, explicit_spec, ts, pinned_excls(g), pinned_eycls(g));
    REQUIRE(a.ey.size() == b.ey.size());
    REQUIRE(a.ex.size() == b.ex.size());
    for (std::size_t k = 0; k < a.ey.size(); ++k) CHECK(a.ey.b[k] == b.ey.b[k]);
    for (std::size_t k = 0; k < a.ex.size(); ++k) CHECK(a.ex.b[k] == b.ex.b[k]);
}

TEST_CASE("overlapping layers are rejected") {
    GridSpec g{9, 20, 1e-3, 1e-3};
    BoundarySpec sides;
    sides.west = sides.east = BoundaryKind::pml;
    PmlSpec spec;
    spec.thickness = 5;
    CHECK_THROWS_AS(build_pml(g, sides, spec, TimeStep{1e-12}, pinned_excls(g), pinned_eycls(g)),
                    Error);
}

TEST_CASE("a pulse leaves through the layer with little reflection") {
    // Parallel-plate guide closed by an absorbing east end. A uniform column
    // source launches a plane pulse; the probe sees the outgoing wave early
    // and any echo from the layer much later.
    SimulationSetup su;
    su.grid = GridSpec{120, 6, 1e-3, 1e-3};
    su.boundaries.east = BoundaryKind::pml;
    su.pml.thickness = 12;
    su.steps = 520;
    for (int j = 0; j < 6; ++j) {
        SourceSpec s;
        s.x = 20.5e-3;
        s.y = (j + 0.5) * 1e-3;
        s.f0 = 15e9;
        s.hwhm = 8e9;
        su.sources.push_back(s);
    }
    ProbeSpec p;
    p.field = ProbeSpec::Field::hz;
    p.x = 30.5e-3;
    p.y = 2.5e-3;
    p.name = "guide";
    su.probes = {p};
    su.audit.enabled = false;
    Simulation sim(su);
    sim.run();
    REQUIRE_FALSE(sim.diverged());

    const ProbeSeries& ser = sim.probe_series()[0];
    double incident = 0.0, echo = 0.0;
    for (std::size_t k = 0; k < ser.value.size(); ++k) {
        if (ser.time_s[k] < 0.45e-9)
            incident = std::max(incident, std::abs(ser.value[k]));
        else
            echo = std::max(echo, std::abs(ser.value[k]));
    }
    REQUIRE(incident > 0.0);
    CHECK(echo / incident < 2e-3);
}
