#pragma once

#include <cstddef>
#include <vector>

#include "ftl2lwr/discretizer.hpp"
#include "ftl2lwr/velocity.hpp"

namespace ftl2lwr {

/// Vehicle boundaries z_{1/2} < ... < z_{N-1/2} at time t. Vehicle i sits at
/// z_{i-1/2}; cell i = [z_{i-1/2}, z_{i+1/2}) for i = 1..N-1 and the leader
/// (vehicle N) has no cell.
struct FtlState {
    double t = 0;
    double ell = 0;
    std::vector<double> positions;

    std::size_t vehicles() const { return positions.size(); }
    std::size_t cells() const { return positions.empty() ? 0 : positions.size() - 1; }

    /// y_i for i = 1..N-1 (1-based, as in the cell numbering).
    double spacing(std::size_t i) const { return (positions[i] - positions[i - 1]) / ell; }
    double density(std::size_t i) const { return 1.0 / spacing(i); }

    std::vector<double> spacings() const;  // y_1..y_{N-1}
    std::vector<double> densities() const; // rho_1..rho_{N-1}
    /// V_1..V_N with V_N = 1.
    std::vector<double> speeds(const VelocityModel& model) const;
};

FtlState initial_state(const InitialLayout& layout);

struct Trajectory {
    std::vector<FtlState> snapshots;
    std::size_t step_count = 0;
    double dt_used = 0;
    // Steps after which a spacing was clamped back to one vehicle length.
    std::size_t clamp_events = 0;

    const FtlState& initial() const { return snapshots.front(); }
    const FtlState& final() const { return snapshots.back(); }
};

/// Right-hand side of the position ODE: component i-1 is V(y_i), the last is 1.
std::vector<double> rhs(const FtlState& state, const VelocityModel& model);

/// Largest step allowed at cfl = 1: ell / M.
double max_stable_step(double ell, const VelocityModel& model);

/// One backward-Euler step of the position ODE. The discrete spacings then
/// satisfy 1 <= y_i and y_i^sigma <= y_i(0)^sigma + sigma t / ell for every
/// step size; dt is still limited to ell/M (std::invalid_argument otherwise).
/// A spacing that ends up below one vehicle length (only possible through
/// rounding) is restored by pulling the follower back, and counted in
/// *clamps when given.
FtlState step(const FtlState& state, double dt, const VelocityModel& model, std::size_t* clamps = nullptr);

/// Integrates from the initial layout to t_end with uniform dt = cfl*ell/M,
/// shortening sub-steps so every output time is hit exactly. Snapshots are
/// recorded at t = 0, at every output time and at t_end (duplicates merged).
Trajectory simulate(const InitialLayout& layout, const VelocityModel& model, double t_end,
                    const std::vector<double>& output_times, double cfl = 0.9);

struct BoundReport {
    std::vector<double> times;
    // min_i (y_i(t) - 1)
    std::vector<double> lower_margin;
    // min_i ((y_i(0)^sigma + sigma t / ell)^(1/sigma) - y_i(t))
    std::vector<double> upper_margin;

    double worst_lower() const;
    double worst_upper() const;
    bool pass(double lower_tol = 1e-12, double upper_tol = 1e-8) const
    {
        return worst_lower() >= -lower_tol && worst_upper() >= -upper_tol;
    }
};

/// Per-snapshot margins of the spacing bounds 1 <= y_i(t) <= (y_i(0)^sigma + sigma t/ell)^(1/sigma).
BoundReport check_spacing_bounds(const Trajectory& traj, const VelocityModel& model);

} // namespace ftl2lwr
