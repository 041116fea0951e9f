#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "doctest.h"

#include "ftl2lwr/velocity.hpp"

using namespace ftl2lwr;
using doctest::Approx;

TEST_CASE("greenshields values")
{
    const VelocityModel g = greenshields();
    CHECK(g.v_of_rho(0.0) == 1.0);
    CHECK(g.v_of_rho(1.0) == 0.0);
    CHECK(g.v_of_rho(0.5) == 0.5);

    CHECK(g.V_of_y(1.0) == 0.0);
    CHECK(g.V_of_y(2.0) == 0.5);
    CHECK(g.V_of_y(std::numeric_limits<double>::infinity()) == 1.0);

    CHECK(g.flux(0.0) == 0.0);
    CHECK(g.flux(1.0) == 0.0);
    CHECK(g.flux(0.5) == 0.25);

    CHECK(g.flux_peak() == Approx(0.5).epsilon(1e-9));
    CHECK(g.max_wave_speed() == Approx(1.0).epsilon(1e-9));
    CHECK(g.sigma() == 2.0);
    CHECK(g.M() == 1.0);
}

TEST_CASE("domain errors")
{
    const VelocityModel g = greenshields();
    CHECK_THROWS_AS(g.v_of_rho(-1e-6), std::domain_error);
    CHECK_THROWS_AS(g.v_of_rho(1.0 + 1e-6), std::domain_error);
    CHECK_THROWS_AS(g.V_of_y(0.5), std::domain_error);
    CHECK_NOTHROW(g.v_of_rho(1.0 + 1e-13));
    CHECK_NOTHROW(g.V_of_y(1.0 - 1e-13));
}

TEST_CASE("registration rejects invalid models")
{
    const auto one = [](double) { return 1.0; };
    const auto zero = [](double) { return 0.0; };
    // v(1) != 0
    CHECK_THROWS(VelocityModel("flat", one, zero, 2.0, 1.0));
    // sigma must exceed 1
    CHECK_THROWS(VelocityModel("g", [](double r) { return 1.0 - r; }, [](double) { return -1.0; }, 1.0, 1.0));
    // non-unimodal flux: f = rho (1 - rho)(1 - 4 rho (1 - rho))^2-ish has several maxima
    const auto v = [](double r) { return (1.0 - r) * std::pow(std::cos(3.0 * M_PI * r), 2); };
    const auto vp = [](double r) {
        const double c = std::cos(3.0 * M_PI * r), s = std::sin(3.0 * M_PI * r);
        return -c * c - (1.0 - r) * 6.0 * M_PI * c * s;
    };
    CHECK_THROWS(VelocityModel("wavy", v, vp, 2.0, 1.0));
}

TEST_CASE("assumption checks")
{
    SUBCASE("greenshields holds with equality")
    {
        const AssumptionReport r = verify_assumptions(greenshields(), 1000);
        CHECK(r.all_pass());
        CHECK(std::abs(r.lower_bound_margin) <= 1e-12);
        CHECK(std::abs(r.derivative_margin) <= 1e-12);
    }
    SUBCASE("quadratic model with sigma 3, M 2")
    {
        const AssumptionReport r = verify_assumptions(quadratic(), 1000);
        CHECK(r.lower_bound_ok);
        CHECK(r.derivative_ok);
        CHECK(r.all_pass());
    }
    SUBCASE("overstated constants are reported, not thrown")
    {
        const VelocityModel bad("tight", [](double r) { return 1.0 - r; }, [](double) { return -1.0; }, 3.0, 0.5);
        const AssumptionReport r = verify_assumptions(bad, 1000);
        CHECK_FALSE(r.lower_bound_ok);
        CHECK_FALSE(r.derivative_ok);
        CHECK(r.lower_bound_margin < 0.0);
        CHECK(r.derivative_margin == Approx(-0.5));
    }
}

TEST_CASE("model lookup")
{
    CHECK(model_by_name("greenshields").name() == "greenshields");
    CHECK(model_by_name("quadratic").sigma() == 3.0);
    CHECK_THROWS(model_by_name("nope"));
}

TEST_CASE("random properties of the built-in models")
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (const VelocityModel& m : {greenshields(), quadratic()}) {
        CAPTURE(m.name());
        for (int n = 0; n < 2000; ++n) {
            const double rho = unit(rng);
            CHECK(m.flux(rho) == rho * m.v_of_rho(rho));
            if (rho > 0.0)
                CHECK(m.V_of_y(1.0 / rho) == Approx(m.v_of_rho(rho)).epsilon(1e-14));

            const double y1 = 1.0 + 100.0 * unit(rng) * unit(rng);
            const double y2 = y1 + 10.0 * unit(rng);
            const double V1 = m.V_of_y(y1), V2 = m.V_of_y(y2);
            CHECK(V1 >= 0.0);
            CHECK(V2 <= 1.0);
            CHECK(V1 <= V2);
        }
    }
}

TEST_CASE("V' matches a difference quotient")
{
    for (const VelocityModel& m : {greenshields(), quadratic()})
        for (double y : {1.0, 1.5, 3.0, 10.0}) {
            const double h = 1e-6;
            const double fd = (m.V_of_y(y + h) - m.V_of_y(y)) / h;
            CHECK(m.V_prime(y) == Approx(fd).epsilon(1e-5));
        }
}
