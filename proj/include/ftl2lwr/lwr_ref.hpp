#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ftl2lwr/discretizer.hpp"
#include "ftl2lwr/kernels.hpp"
#include "ftl2lwr/step_function.hpp"
#include "ftl2lwr/velocity.hpp"

namespace ftl2lwr {

struct GridSnapshot {
    double t = 0;
    std::vector<double> averages;
};

/// Cell averages of a finite-volume solution on a uniform grid.
struct GridSolution {
    double x_min = 0, x_max = 0;
    std::size_t cells = 0;
    double dx = 0;
    std::vector<GridSnapshot> snapshots;

    double x_center(std::size_t j) const { return x_min + (static_cast<double>(j) + 0.5) * dx; }
    /// Snapshot as a step function on the grid.
    StepFunction field(std::size_t snapshot) const;
    double total_mass(std::size_t snapshot) const;
};

/// One conservative Godunov update u_out = u - lambda (F_{j+1/2} - F_{j-1/2})
/// with constant extrapolation at the two ends.
std::vector<double> godunov_step(std::span<const double> u, double lambda, const VelocityModel& model);

namespace serial {

std::vector<double> godunov_step(std::span<const double> u, double lambda, const VelocityModel& model);

} // namespace serial

/// Grid of godunov_solve without snapshots: [x_0 - pad, x_m + pad] with
/// pad = 1.1 * t_end * max(1, max|f'|) / cfl, wide enough that the numerical
/// domain of dependence never reaches the end cells.
GridSolution empty_grid(const InitialDensity& density, const VelocityModel& model, std::size_t cells, double t_end,
                        double cfl);

/// Solves rho_t + f(rho)_z = 0 from a piecewise-constant initial density on
/// empty_grid(...), with dt = cfl * dx / max|f'|. Records snapshots at t = 0,
/// every output time and t_end. Throws std::logic_error if the end cells change.
GridSolution godunov_solve(const InitialDensity& density, const VelocityModel& model, std::size_t cells,
                           double t_end, const std::vector<double>& output_times, double cfl = 0.45);

/// Entropy solution of the Greenshields Riemann problem with the jump at x0.
class RiemannSolution {
public:
    /// Throws std::invalid_argument for t <= 0 or states outside [0,1].
    RiemannSolution(double rho_left, double rho_right, double t, double x0 = 0.0);

    double operator()(double z) const;
    bool is_shock() const { return rho_left_ < rho_right_; }
    bool is_rarefaction() const { return rho_left_ > rho_right_; }
    /// Extent of the wave: a single point for shocks.
    double wave_left() const { return x0_ + t_ * speed_left_; }
    double wave_right() const { return x0_ + t_ * speed_right_; }

    /// The solution restricted to [z_min, z_max] as an exact piecewise-linear function.
    PiecewiseLinear profile(double z_min, double z_max) const;

private:
    double rho_left_, rho_right_, t_, x0_;
    double speed_left_, speed_right_;
};

RiemannSolution riemann_exact(double rho_left, double rho_right, double t);

/// Exact Greenshields solution for piecewise-constant compactly supported
/// data, valid while the waves issued from neighbouring breakpoints do not
/// interact. Throws std::domain_error once they do.
PiecewiseLinear greenshields_exact(const InitialDensity& density, double t);

/// First time at which two neighbouring Riemann waves of the data meet.
double greenshields_interaction_time(const InitialDensity& density);

} // namespace ftl2lwr
