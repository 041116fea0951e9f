#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "doctest.h"

#include "ftl2lwr/ftl_sim.hpp"

using namespace ftl2lwr;
using doctest::Approx;

namespace {

FtlState uniform_state(std::size_t N, double y, double ell = 0.125)
{
    FtlState s{0.0, ell, std::vector<double>(N)};
    for (std::size_t k = 0; k < N; ++k)
        s.positions[k] = static_cast<double>(k) * y * ell;
    return s;
}

FtlState random_state(std::mt19937_64& rng, std::size_t N, double ell)
{
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    FtlState s{0.0, ell, std::vector<double>(N)};
    for (std::size_t k = 1; k < N; ++k)
        s.positions[k] = s.positions[k - 1] + ell * (1.0 + (unit(rng) < 0.3 ? 0.0 : 4.0 * unit(rng)));
    return s;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b)
{
    double m = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k)
        m = std::max(m, std::abs(a[k] - b[k]));
    return m;
}

// Integrates to t with n equal steps.
FtlState advance(FtlState s, double t, int n, const VelocityModel& m)
{
    for (int k = 0; k < n; ++k)
        s = step(s, t / n, m);
    return s;
}

} // namespace

TEST_CASE("rhs")
{
    const VelocityModel g = greenshields();
    SUBCASE("bumper to bumper: only the leader moves")
    {
        const auto v = rhs(uniform_state(5, 1.0), g);
        CHECK(v == std::vector<double>{0, 0, 0, 0, 1});
        // Same jam from the quantile placement, where spacings carry rounding.
        const auto w = rhs(initial_state(initial_positions(block_density(), 10)), g);
        for (std::size_t k = 0; k + 1 < w.size(); ++k)
            CHECK(std::abs(w[k]) <= 1e-14);
        CHECK(w.back() == 1.0);
    }
    SUBCASE("free flow")
    {
        for (double v : rhs(uniform_state(5, 1e9), g))
            CHECK(v == Approx(1.0).epsilon(1e-8));
    }
    SUBCASE("two vehicles two lengths apart")
    {
        const auto v = rhs(uniform_state(2, 2.0), g);
        CHECK(v[0] == Approx(0.5));
        CHECK(v[1] == 1.0);
    }
}

TEST_CASE("state views")
{
    const FtlState s = uniform_state(4, 2.0, 0.25);
    CHECK(s.vehicles() == 4);
    CHECK(s.cells() == 3);
    CHECK(s.spacing(1) == Approx(2.0));
    CHECK(s.density(3) == Approx(0.5));
    CHECK(s.speeds(greenshields()).back() == 1.0);
}

TEST_CASE("step size restriction")
{
    const VelocityModel g = greenshields(), q = quadratic();
    const FtlState s = uniform_state(10, 1.5, 0.1);
    // ell/M = 0.1 for Greenshields and 0.05 for the quadratic model.
    CHECK(max_stable_step(0.1, g) == Approx(0.1));
    CHECK(max_stable_step(0.1, q) == Approx(0.05));
    CHECK_NOTHROW(step(s, 0.1, g));
    CHECK_THROWS_AS(step(s, 0.11, g), std::invalid_argument);
    CHECK_THROWS_AS(step(s, 0.06, q), std::invalid_argument);
    CHECK_THROWS_AS(step(s, 0.0, g), std::invalid_argument);
}

TEST_CASE("one step from bumper to bumper")
{
    const VelocityModel g = greenshields();
    const FtlState s = uniform_state(6, 1.0);
    const double dt = 0.1;
    std::size_t clamps = 0;
    const FtlState n = step(s, dt, g, &clamps);
    CHECK(n.t == dt);
    CHECK(n.positions.back() == Approx(s.positions.back() + dt));
    // The jam releases from the front: each follower moves less than the vehicle
    // ahead, the tail by an amount far below dt.
    for (std::size_t k = 0; k + 1 < n.vehicles(); ++k) {
        const double moved = n.positions[k] - s.positions[k];
        CHECK(moved >= 0.0);
        CHECK(moved < n.positions[k + 1] - s.positions[k + 1]);
        CHECK(n.spacing(k + 1) >= 1.0);
    }
    CHECK(clamps == 0);
}

TEST_CASE("the step is the backward Euler update")
{
    std::mt19937_64 rng(1);
    const VelocityModel g = greenshields();
    const FtlState s = random_state(rng, 40, 0.05);
    const double dt = 0.04;
    const FtlState n = step(s, dt, g);
    const auto v = rhs(n, g);
    for (std::size_t k = 0; k < n.vehicles(); ++k)
        CHECK(n.positions[k] == Approx(s.positions[k] + dt * v[k]).epsilon(1e-13));
}

TEST_CASE("spacings never drop below one vehicle length")
{
    std::mt19937_64 rng(8);
    for (const VelocityModel& m : {greenshields(), quadratic()})
        for (int trial = 0; trial < 20; ++trial) {
            FtlState s = random_state(rng, 60, 0.02);
            std::size_t clamps = 0;
            for (int k = 0; k < 50; ++k) {
                s = step(s, max_stable_step(s.ell, m), m, &clamps);
                for (std::size_t i = 1; i < s.vehicles(); ++i)
                    REQUIRE(s.spacing(i) >= 1.0 - 1e-12);
            }
            CHECK(clamps == 0);
        }
}

TEST_CASE("two half steps against one full step")
{
    std::mt19937_64 rng(4);
    const VelocityModel g = greenshields();
    const FtlState s = random_state(rng, 30, 0.05);
    // Local error of one step is O(dt^2): halving dt divides the gap by about 4.
    double previous = 0.0;
    for (double dt : {0.002, 0.001, 0.0005, 0.00025}) {
        const FtlState one = step(s, dt, g);
        const FtlState two = step(step(s, dt / 2, g), dt / 2, g);
        const double gap = max_abs_diff(one.positions, two.positions);
        if (previous > 0.0)
            CHECK(previous / gap == Approx(4.0).epsilon(0.15));
        previous = gap;
    }
}

TEST_CASE("self-convergence under dt refinement")
{
    std::mt19937_64 rng(6);
    const VelocityModel g = greenshields();
    const FtlState s = random_state(rng, 30, 0.05);
    const double t = 0.4;
    const FtlState reference = advance(s, t, 1000, g);
    const double e1 = max_abs_diff(advance(s, t, 10, g).positions, reference.positions);
    const double e2 = max_abs_diff(advance(s, t, 20, g).positions, reference.positions);
    const double e3 = max_abs_diff(advance(s, t, 40, g).positions, reference.positions);
    CHECK(e2 < e1);
    CHECK(e3 < e2);
    CHECK(std::log2(e2 / e3) >= 0.9);
}

TEST_CASE("simulate")
{
    const VelocityModel g = greenshields();
    const InitialLayout layout = initial_positions(block_density(), 100);

    SUBCASE("snapshots hit the requested times")
    {
        const Trajectory tr = simulate(layout, g, 0.5, {0.1, 0.25, 0.5});
        REQUIRE(tr.snapshots.size() == 4);
        CHECK(tr.snapshots[0].t == 0.0);
        CHECK(tr.snapshots[1].t == 0.1);
        CHECK(tr.snapshots[2].t == 0.25);
        CHECK(tr.final().t == 0.5);
        CHECK(tr.dt_used == Approx(0.9 * layout.ell));
        CHECK(tr.step_count > 0);
    }
    SUBCASE("the front opens into a rarefaction")
    {
        const Trajectory tr = simulate(layout, g, 0.5, {});
        CHECK(tr.final().spacing(tr.final().cells()) > 1.0);
        CHECK(tr.initial().spacing(tr.initial().cells()) == Approx(1.0));
    }
    SUBCASE("invalid arguments")
    {
        CHECK_THROWS(simulate(layout, g, 0.5, {0.6}));
        CHECK_THROWS(simulate(layout, g, 0.5, {}, 1.5));
    }
}

TEST_CASE("spacing bounds along trajectories")
{
    for (const VelocityModel& m : {greenshields(), quadratic()})
        for (const InitialDensity& d : {block_density(), two_blocks_density(), riemann_density(0.2, 0.8),
                                        riemann_density(1.0, 0.0), constant_density(0.3)}) {
            const InitialLayout layout = initial_positions(d, 120);
            std::vector<double> times;
            for (int k = 1; k <= 20; ++k)
                times.push_back(0.05 * k);
            const Trajectory tr = simulate(layout, m, 1.0, times);
            const BoundReport r = check_spacing_bounds(tr, m);
            CAPTURE(m.name());
            CHECK(r.times.size() == tr.snapshots.size());
            CHECK(r.worst_lower() >= -1e-12);
            CHECK(r.worst_upper() >= -1e-8);
            CHECK(r.pass());
            CHECK(tr.clamp_events == 0);
            for (const FtlState& s : tr.snapshots)
                for (std::size_t i = 1; i < s.vehicles(); ++i)
                    REQUIRE(s.positions[i] > s.positions[i - 1]);
        }
}

TEST_CASE("leader spacing bound on the block")
{
    const VelocityModel g = greenshields();
    const InitialLayout layout = initial_positions(block_density(), 200);
    const Trajectory tr = simulate(layout, g, 1.0, {0.25, 0.5, 0.75});
    for (const FtlState& s : tr.snapshots)
        CHECK(s.spacing(s.cells()) <= std::sqrt(1.0 + 2.0 * s.t / s.ell) + 1e-8);
}

TEST_CASE("free flow keeps its spacings")
{
    const VelocityModel g = greenshields();
    InitialLayout layout;
    layout.N = 5;
    layout.ell = 1e-6;
    layout.positions = {0.0, 1.0, 2.0, 3.0, 4.0};
    const Trajectory tr = simulate(layout, g, 0.5, {0.25});
    const BoundReport r = check_spacing_bounds(tr, g);
    for (std::size_t i = 1; i < 5; ++i)
        CHECK(tr.final().spacing(i) == Approx(1e6).epsilon(1e-6));
    CHECK(r.worst_lower() > 1e5);
    CHECK(r.pass());
}
