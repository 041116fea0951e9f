#include "ftl2lwr/lwr_ref.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ftl2lwr {

namespace {

constexpr double kBoundaryTol = 1e-12;

struct Wave {
    double x;        // breakpoint
    double left, right;  // states
    double slow, fast;   // speeds of the wave edges (equal for a shock)
};

Wave greenshields_wave(double x, double left, double right)
{
    if (left < right) {
        const double s = 1.0 - left - right;
        return {x, left, right, s, s};
    }
    return {x, left, right, 1.0 - 2.0 * left, 1.0 - 2.0 * right};
}

std::vector<Wave> waves_of(const InitialDensity& density)
{
    const auto& b = density.breakpoints();
    const auto& v = density.values();
    std::vector<Wave> waves;
    for (std::size_t j = 0; j < b.size(); ++j) {
        const double left = j == 0 ? 0.0 : v[j - 1];
        const double right = j == v.size() ? 0.0 : v[j];
        if (left != right)
            waves.push_back(greenshields_wave(b[j], left, right));
    }
    return waves;
}

} // namespace

StepFunction GridSolution::field(std::size_t snapshot) const
{
    std::vector<double> b(cells + 1);
    for (std::size_t j = 0; j <= cells; ++j)
        b[j] = x_min + static_cast<double>(j) * dx;
    b[cells] = x_max;
    return StepFunction(std::move(b), snapshots.at(snapshot).averages);
}

double GridSolution::total_mass(std::size_t snapshot) const
{
    double m = 0.0;
    for (double u : snapshots.at(snapshot).averages)
        m += u;
    return m * dx;
}

std::vector<double> godunov_step(std::span<const double> u, double lambda, const VelocityModel& model)
{
    std::vector<double> flux(u.size() + 1), out(u.size());
    parallel::godunov_fluxes(u, flux, model);
    parallel::godunov_update(u, flux, out, lambda);
    return out;
}

namespace serial {

std::vector<double> godunov_step(std::span<const double> u, double lambda, const VelocityModel& model)
{
    std::vector<double> flux(u.size() + 1), out(u.size());
    serial::godunov_fluxes(u, flux, model);
    serial::godunov_update(u, flux, out, lambda);
    return out;
}

} // namespace serial

GridSolution empty_grid(const InitialDensity& density, const VelocityModel& model, std::size_t cells, double t_end,
                        double cfl)
{
    // Information moves at most one cell per step, i.e. at speed max|f'|/cfl.
    const double pad = 1.1 * t_end * std::max(1.0, model.max_wave_speed()) / cfl;
    GridSolution sol;
    sol.x_min = density.breakpoints().front() - pad;
    sol.x_max = density.breakpoints().back() + pad;
    if (pad == 0.0) {
        sol.x_min -= 1.0;
        sol.x_max += 1.0;
    }
    sol.cells = cells;
    sol.dx = (sol.x_max - sol.x_min) / static_cast<double>(cells);
    return sol;
}

GridSolution godunov_solve(const InitialDensity& density, const VelocityModel& model, std::size_t cells,
                           double t_end, const std::vector<double>& output_times, double cfl)
{
    if (cells < 2)
        throw std::invalid_argument("godunov_solve: need at least two cells");
    if (!(t_end >= 0.0))
        throw std::invalid_argument("godunov_solve: t_end must be non-negative");
    if (!(cfl > 0.0 && cfl <= 1.0))
        throw std::invalid_argument("godunov_solve: cfl must lie in (0,1]");
    for (double t : output_times)
        if (!(t >= 0.0 && t <= t_end))
            throw std::invalid_argument("godunov_solve: output times must lie in [0, t_end]");
    if (!std::is_sorted(output_times.begin(), output_times.end()))
        throw std::invalid_argument("godunov_solve: output times must be sorted");

    const double speed = model.max_wave_speed();
    GridSolution sol = empty_grid(density, model, cells, t_end, cfl);

    std::vector<double> u(cells);
    for (std::size_t j = 0; j < cells; ++j) {
        const double a = sol.x_min + static_cast<double>(j) * sol.dx;
        const double b = j + 1 == cells ? sol.x_max : a + sol.dx;
        u[j] = (density.cdf(b) - density.cdf(a)) / (b - a);
    }
    const double left_far = u.front(), right_far = u.back();
    sol.snapshots.push_back({0.0, u});

    std::vector<double> targets;
    for (double t : output_times)
        if (t > 0.0 && (targets.empty() || t > targets.back()))
            targets.push_back(t);
    if (targets.empty() || targets.back() < t_end)
        targets.push_back(t_end);

    const double dt = cfl * sol.dx / speed;
    double t = 0.0;
    for (double target : targets) {
        if (target == 0.0)
            continue;
        while (t < target) {
            const double remaining = target - t;
            const bool lands = remaining <= dt * (1.0 + 1e-9);
            const double h = lands ? remaining : dt;
            u = godunov_step(u, h / sol.dx, model);
            t = lands ? target : t + h;
        }
        if (std::abs(u.front() - left_far) > kBoundaryTol || std::abs(u.back() - right_far) > kBoundaryTol)
            throw std::logic_error("godunov_solve: a wave reached the padded boundary");
        sol.snapshots.push_back({t, u});
    }
    return sol;
}

RiemannSolution::RiemannSolution(double rho_left, double rho_right, double t, double x0)
    : rho_left_(rho_left), rho_right_(rho_right), t_(t), x0_(x0)
{
    if (!(t > 0.0))
        throw std::invalid_argument("riemann_exact: t must be positive");
    if (!(rho_left >= 0.0 && rho_left <= 1.0 && rho_right >= 0.0 && rho_right <= 1.0))
        throw std::invalid_argument("riemann_exact: states must lie in [0,1]");
    const Wave w = greenshields_wave(x0, rho_left, rho_right);
    speed_left_ = w.slow;
    speed_right_ = w.fast;
}

double RiemannSolution::operator()(double z) const
{
    if (rho_left_ == rho_right_)
        return rho_left_;
    if (z < wave_left())
        return rho_left_;
    if (z >= wave_right())
        return rho_right_;
    return 0.5 * (1.0 - (z - x0_) / t_);
}

PiecewiseLinear RiemannSolution::profile(double z_min, double z_max) const
{
    if (!(z_min < z_max))
        throw std::invalid_argument("RiemannSolution::profile: empty window");
    std::vector<double> b{z_min}, c, s;
    const auto piece = [&](double right, double intercept, double slope) {
        right = std::min(right, z_max);
        if (right > b.back()) {
            b.push_back(right);
            c.push_back(intercept);
            s.push_back(slope);
        }
    };
    if (rho_left_ == rho_right_) {
        piece(z_max, rho_left_, 0.0);
    } else {
        piece(wave_left(), rho_left_, 0.0);
        piece(wave_right(), 0.5 * (1.0 + x0_ / t_), -0.5 / t_);
        piece(z_max, rho_right_, 0.0);
    }
    return PiecewiseLinear(std::move(b), std::move(c), std::move(s));
}

RiemannSolution riemann_exact(double rho_left, double rho_right, double t)
{
    return RiemannSolution(rho_left, rho_right, t);
}

double greenshields_interaction_time(const InitialDensity& density)
{
    const auto waves = waves_of(density);
    double first = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j + 1 < waves.size(); ++j) {
        const double closing = waves[j].fast - waves[j + 1].slow;
        if (closing > 0.0)
            first = std::min(first, (waves[j + 1].x - waves[j].x) / closing);
    }
    return first;
}

PiecewiseLinear greenshields_exact(const InitialDensity& density, double t)
{
    if (!(t > 0.0))
        throw std::invalid_argument("greenshields_exact: t must be positive");
    if (t > greenshields_interaction_time(density))
        throw std::domain_error("greenshields_exact: waves interact before t");

    const auto waves = waves_of(density);
    std::vector<double> b, c, s;
    const auto piece = [&](double left, double right, double intercept, double slope) {
        if (!(right > left))
            return;
        if (b.empty())
            b.push_back(left);
        else if (b.back() < left) {
            // Only reachable through rounding at touching waves.
            b.push_back(left);
            c.push_back(0.0);
            s.push_back(0.0);
        }
        b.push_back(right);
        c.push_back(intercept);
        s.push_back(slope);
    };
    for (std::size_t j = 0; j < waves.size(); ++j) {
        const Wave& w = waves[j];
        const double wl = w.x + t * w.slow, wr = w.x + t * w.fast;
        if (wr > wl)
            piece(wl, wr, 0.5 * (1.0 + w.x / t), -0.5 / t);
        else if (b.empty())
            b.push_back(wl);
        if (j + 1 < waves.size()) {
            const Wave& next = waves[j + 1];
            piece(std::max(wr, b.back()), next.x + t * next.slow, w.right, 0.0);
        }
    }
    if (b.empty())
        return PiecewiseLinear();
    return PiecewiseLinear(std::move(b), std::move(c), std::move(s));
}

} // namespace ftl2lwr
