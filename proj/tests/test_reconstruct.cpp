#include <cmath>
#include <random>
#include <stdexcept>

#include "doctest.h"

#include "ftl2lwr/reconstruct.hpp"

using namespace ftl2lwr;
using doctest::Approx;

namespace {

std::vector<double> uniform_times(double t_end, int n)
{
    std::vector<double> t;
    for (int k = 1; k <= n; ++k)
        t.push_back(t_end * k / n);
    return t;
}

FtlState uniform_state(std::size_t N, double y, double ell)
{
    FtlState s{0.0, ell, std::vector<double>(N)};
    for (std::size_t k = 0; k < N; ++k)
        s.positions[k] = static_cast<double>(k) * y * ell;
    return s;
}

} // namespace

TEST_CASE("density field")
{
    SUBCASE("bumper to bumper block")
    {
        const FtlState s = initial_state(initial_positions(block_density(), 3));
        const StepFunction rho = density_field(s);
        CHECK(rho.breakpoints().front() == Approx(0.25));
        CHECK(rho.breakpoints().back() == Approx(0.75));
        for (double v : rho.values())
            CHECK(v == Approx(1.0));
        CHECK(mass(rho) == Approx(0.5));
    }
    SUBCASE("uniform spacing two")
    {
        const StepFunction rho = density_field(uniform_state(6, 2.0, 0.125));
        for (double v : rho.values())
            CHECK(v == 0.5);
    }
}

TEST_CASE("velocity field")
{
    const VelocityModel g = greenshields();
    const StepFunction jammed = velocity_field(initial_state(initial_positions(block_density(), 10)), g);
    for (double v : jammed.values())
        CHECK(std::abs(v) <= 1e-14);
    const StepFunction half = velocity_field(uniform_state(6, 2.0, 0.125), g);
    for (double v : half.values())
        CHECK(v == 0.5);

    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (const VelocityModel& m : {greenshields(), quadratic()}) {
        FtlState s{0.0, 0.01, std::vector<double>(50)};
        for (std::size_t k = 1; k < 50; ++k)
            s.positions[k] = s.positions[k - 1] + s.ell * (1.0 + 5.0 * unit(rng));
        const StepFunction rho = density_field(s), V = velocity_field(s, m);
        CHECK(rho.breakpoints() == V.breakpoints());
        for (std::size_t j = 0; j < rho.pieces(); ++j)
            CHECK(V.values()[j] == Approx(m.v_of_rho(rho.values()[j])).epsilon(1e-14));
    }
}

TEST_CASE("velocity variation counts the leader")
{
    const VelocityModel g = greenshields();
    // Jammed: V = (0, ..., 0, 1).
    CHECK(velocity_variation(initial_state(initial_positions(block_density(), 10)), g) == Approx(1.0).epsilon(1e-14));
    // Uniform spacing 2: V = (0.5, ..., 0.5, 1).
    CHECK(velocity_variation(uniform_state(6, 2.0, 0.125), g) == 0.5);
}

TEST_CASE("every cell carries one vehicle length of mass")
{
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int n = 0; n < 50; ++n) {
        FtlState s{0.0, 0.01 * (1.0 + unit(rng)), std::vector<double>(40)};
        for (std::size_t k = 1; k < 40; ++k)
            s.positions[k] = s.positions[k - 1] + s.ell * (1.0 + 10.0 * unit(rng));
        const StepFunction rho = density_field(s);
        for (std::size_t j = 0; j < rho.pieces(); ++j)
            CHECK((rho.breakpoints()[j + 1] - rho.breakpoints()[j]) * rho.values()[j] == Approx(s.ell).epsilon(1e-14));
        CHECK(mass(rho) == Approx(39 * s.ell).epsilon(1e-13));
    }
}

TEST_CASE("fields along trajectories")
{
    const double t_end = 1.0;
    for (const VelocityModel& m : {greenshields(), quadratic()})
        for (const InitialDensity& d :
             {block_density(), two_blocks_density(), riemann_density(0.2, 0.8), riemann_density(1.0, 0.0)}) {
            const Trajectory tr = simulate(initial_positions(d, 150), m, t_end, uniform_times(t_end, 20));
            const FtlState& s0 = tr.initial();
            const double lip = total_variation(density_field(s0)) + total_variation(velocity_field(s0, m));
            const double expected_mass = static_cast<double>(s0.cells()) * s0.ell;
            for (std::size_t k = 0; k < tr.snapshots.size(); ++k) {
                const FtlState& s = tr.snapshots[k];
                CHECK(std::abs(mass(density_field(s)) - expected_mass) <= 1e-10);
                if (k == 0)
                    continue;
                const FtlState& p = tr.snapshots[k - 1];
                CHECK(total_variation(density_field(s)) <= total_variation(density_field(p)) + 1e-8);
                CHECK(velocity_variation(s, m) <= velocity_variation(p, m) + 1e-8);
                CHECK(l1_distance(density_field(s), density_field(p)) <= (s.t - p.t) * lip + 1e-6);
            }
        }
}

TEST_CASE("bump test function")
{
    const BumpTestFunction phi{0.5, 0.0, 0.25, 0.5};
    CHECK(phi(0.5, 0.0) == Approx(std::exp(-2.0)));
    CHECK(phi(0.2, 0.0) == 0.0);
    CHECK(phi(0.5, 0.6) == 0.0);
    CHECK(phi.dt(0.5, 0.0) == 0.0);
    const double h = 1e-7;
    for (double t : {0.3, 0.45, 0.6})
        for (double z : {-0.3, 0.1, 0.4}) {
            CHECK(phi.dt(t, z) == Approx((phi(t + h, z) - phi(t - h, z)) / (2 * h)).epsilon(1e-6));
            CHECK(phi.dz(t, z) == Approx((phi(t, z + h) - phi(t, z - h)) / (2 * h)).epsilon(1e-6));
            CHECK(phi(t, z) >= 0.0);
        }
}

TEST_CASE("entropy residual validation")
{
    const VelocityModel g = greenshields();
    const Trajectory coarse = simulate(initial_positions(block_density(), 50), g, 1.0, uniform_times(1.0, 10));
    const Trajectory fine = simulate(initial_positions(block_density(), 50), g, 1.0, uniform_times(1.0, 256));
    CHECK_THROWS_AS(kruzkov_residual(coarse, g, 0.5, {0.5, 0.5, 0.25, 0.5}), std::invalid_argument);
    CHECK_THROWS_AS(kruzkov_residual(fine, g, 0.5, {0.9, 0.5, 0.25, 0.5}), std::invalid_argument);
    CHECK_THROWS_AS(kruzkov_residual(fine, g, 0.5, {0.1, 0.5, 0.25, 0.5}), std::invalid_argument);
    CHECK_NOTHROW(kruzkov_residual(fine, g, 0.5, {0.5, 0.5, 0.25, 0.5}));
}

TEST_CASE("residual vanishes where the density equals k")
{
    const VelocityModel g = greenshields();
    const double c = 0.4;
    const Trajectory tr = simulate(initial_positions(constant_density(c), 400), g, 0.5, uniform_times(0.5, 256));
    // Far from both ends of the constant state for the whole time window.
    const BumpTestFunction phi{0.25, 1.25, 0.2, 0.3};
    CHECK(std::abs(kruzkov_residual(tr, g, c, phi)) <= 1e-9);
}

TEST_CASE("weak-form residual shrinks with the vehicle length")
{
    const VelocityModel g = greenshields();
    const BumpTestFunction phi{0.5, 0.0, 0.25, 0.25};
    double previous = INFINITY;
    for (std::size_t N : {100u, 200u, 400u}) {
        const Trajectory tr = simulate(initial_positions(riemann_density(0.2, 0.8), N), g, 1.0, uniform_times(1.0, 256));
        const double ks[] = {0.0, 1.0};
        const auto r = kruzkov_residuals(tr, g, ks, phi);
        // k = 0 and k = 1 give the weak form with opposite signs.
        CHECK(r[0] == Approx(-r[1]).epsilon(1e-6));
        CHECK(std::abs(r[0]) < previous);
        previous = std::abs(r[0]);
    }
}

TEST_CASE("parallel residuals equal the serial reference")
{
    const VelocityModel g = greenshields();
    const Trajectory tr =
        simulate(initial_positions(riemann_density(0.2, 0.8), 300), g, 1.0, uniform_times(1.0, 200));
    const double ks[] = {0.0, 0.25, 0.5, 0.75, 1.0};
    const BumpTestFunction phi{0.5, 0.0, 0.25, 0.25};
    CHECK(kruzkov_residuals(tr, g, ks, phi) == serial::kruzkov_residuals(tr, g, ks, phi));
    CHECK(kruzkov_residual(tr, g, 0.5, phi) == serial::kruzkov_residuals(tr, g, ks, phi)[2]);
}
