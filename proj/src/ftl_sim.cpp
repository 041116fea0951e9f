#include "ftl2lwr/ftl_sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ftl2lwr/kernels.hpp"

namespace ftl2lwr {

namespace {

// Relative slack on the step restriction and on the one-vehicle-length floor.
constexpr double kStepSlack = 1e-12;
constexpr double kSpacingTol = 1e-12;

} // namespace

std::vector<double> FtlState::spacings() const
{
    std::vector<double> y(cells());
    for (std::size_t i = 1; i < vehicles(); ++i)
        y[i - 1] = spacing(i);
    return y;
}

std::vector<double> FtlState::densities() const
{
    std::vector<double> rho(cells());
    for (std::size_t i = 1; i < vehicles(); ++i)
        rho[i - 1] = density(i);
    return rho;
}

std::vector<double> FtlState::speeds(const VelocityModel& model) const { return rhs(*this, model); }

FtlState initial_state(const InitialLayout& layout)
{
    if (layout.positions.size() < 2)
        throw std::invalid_argument("initial_state: need at least two vehicles");
    return FtlState{0.0, layout.ell, layout.positions};
}

std::vector<double> rhs(const FtlState& state, const VelocityModel& model)
{
    std::vector<double> v(state.vehicles());
    parallel::ftl_speeds(state.positions, v, state.ell, model);
    return v;
}

double max_stable_step(double ell, const VelocityModel& model) { return ell / model.M(); }

namespace {

// Root y in [1, gap/ell] of ell*y + dt*V(y) = gap. The left side is increasing in y.
double implicit_spacing(double gap, double dt, double ell, const VelocityModel& model)
{
    double lo = 1.0;
    double hi = std::max(gap / ell, 1.0);
    if (ell - gap >= 0.0)
        return 1.0;
    double y = hi;
    for (int it = 0; it < 100; ++it) {
        const double g = ell * y + dt * model.V_of_y(y) - gap;
        if (g > 0.0)
            hi = y;
        else
            lo = y;
        const double slope = ell + dt * model.V_prime(y);
        double next = y - g / slope;
        if (!(next > lo && next < hi))
            next = 0.5 * (lo + hi);
        if (std::abs(next - y) <= 4 * std::numeric_limits<double>::epsilon() * y || hi - lo <= 0.0) {
            y = next;
            break;
        }
        y = next;
    }
    return y;
}

} // namespace

FtlState step(const FtlState& state, double dt, const VelocityModel& model, std::size_t* clamps)
{
    if (!(dt > 0.0))
        throw std::invalid_argument("step: dt must be positive");
    if (dt > max_stable_step(state.ell, model) * (1.0 + kStepSlack))
        throw std::invalid_argument("step: dt exceeds ell/M");

    // Backward Euler for dz_{i-1/2}/dt = V(y_i). Vehicle i only depends on the
    // new position of vehicle i+1, so the implicit system is solved exactly by
    // one sweep from the leader to the rear.
    const std::size_t n = state.vehicles();
    const auto& z = state.positions;
    const double ell = state.ell;
    const double floor = ell * (1.0 - kSpacingTol);

    FtlState next{state.t + dt, ell, std::vector<double>(n)};
    next.positions[n - 1] = z[n - 1] + dt;
    for (std::size_t k = n - 1; k-- > 0;) {
        const double y = implicit_spacing(next.positions[k + 1] - z[k], dt, ell, model);
        next.positions[k] = z[k] + dt * model.V_of_y(y);
        if (next.positions[k + 1] - next.positions[k] < floor) {
            next.positions[k] = next.positions[k + 1] - ell;
            if (clamps)
                ++*clamps;
        }
    }
    return next;
}

Trajectory simulate(const InitialLayout& layout, const VelocityModel& model, double t_end,
                    const std::vector<double>& output_times, double cfl)
{
    if (!(t_end >= 0.0))
        throw std::invalid_argument("simulate: t_end must be non-negative");
    if (!(cfl > 0.0 && cfl <= 1.0))
        throw std::invalid_argument("simulate: cfl must lie in (0,1]");
    for (double t : output_times)
        if (!(t >= 0.0 && t <= t_end))
            throw std::invalid_argument("simulate: output times must lie in [0, t_end]");
    if (!std::is_sorted(output_times.begin(), output_times.end()))
        throw std::invalid_argument("simulate: output times must be sorted");

    std::vector<double> targets;
    for (double t : output_times)
        if (t > 0.0 && (targets.empty() || t > targets.back()))
            targets.push_back(t);
    if (targets.empty() || targets.back() < t_end)
        targets.push_back(t_end);

    Trajectory traj;
    traj.dt_used = cfl * max_stable_step(layout.ell, model);
    FtlState state = initial_state(layout);
    traj.snapshots.push_back(state);

    for (double target : targets) {
        if (target == 0.0)
            continue;
        while (state.t < target) {
            const double remaining = target - state.t;
            const bool lands = remaining <= traj.dt_used * (1.0 + 1e-9);
            state = step(state, lands ? remaining : traj.dt_used, model, &traj.clamp_events);
            ++traj.step_count;
            if (lands)
                state.t = target;
        }
        traj.snapshots.push_back(state);
    }
    return traj;
}

double BoundReport::worst_lower() const
{
    double w = std::numeric_limits<double>::infinity();
    for (double m : lower_margin)
        w = std::min(w, m);
    return w;
}

double BoundReport::worst_upper() const
{
    double w = std::numeric_limits<double>::infinity();
    for (double m : upper_margin)
        w = std::min(w, m);
    return w;
}

BoundReport check_spacing_bounds(const Trajectory& traj, const VelocityModel& model)
{
    BoundReport r;
    if (traj.snapshots.empty())
        return r;
    const auto y0 = traj.initial().spacings();
    const double sigma = model.sigma();
    for (const auto& s : traj.snapshots) {
        double lower = std::numeric_limits<double>::infinity();
        double upper = std::numeric_limits<double>::infinity();
        for (std::size_t i = 1; i < s.vehicles(); ++i) {
            const double y = s.spacing(i);
            const double bound = std::pow(std::pow(y0[i - 1], sigma) + sigma * s.t / s.ell, 1.0 / sigma);
            lower = std::min(lower, y - 1.0);
            upper = std::min(upper, bound - y);
        }
        r.times.push_back(s.t);
        r.lower_margin.push_back(lower);
        r.upper_margin.push_back(upper);
    }
    return r;
}

} // namespace ftl2lwr
