#pragma once

#include <span>
#include <vector>

#include "ftl2lwr/ftl_sim.hpp"
#include "ftl2lwr/step_function.hpp"
#include "ftl2lwr/velocity.hpp"

namespace ftl2lwr {

/// rho_ell(t, .): value 1/y_i on [z_{i-1/2}, z_{i+1/2}), i = 1..N-1. The
/// leader has no cell. Every cell carries mass ell.
StepFunction density_field(const FtlState& state);

/// V_ell(t, .): value V(y_i) on the same cells; cellwise V_ell = v(rho_ell).
StepFunction velocity_field(const FtlState& state, const VelocityModel& model);

/// sum_{i=1}^{N-1} |V_{i+1} - V_i| with the leader convention V_N = 1.
///
/// This is the velocity variation that the particle dynamics keep
/// non-increasing. total_variation(velocity_field(...)) is not monotone in
/// general: its jump down to the zero tail at the leader grows as the
/// front opens up.
double velocity_variation(const FtlState& state, const VelocityModel& model);

/// phi(t, z) = eta((t - t0)/rt) * eta((z - z0)/rz), eta(s) = exp(1/(s^2-1)) on |s| < 1.
struct BumpTestFunction {
    double t0 = 0, z0 = 0;
    double rt = 1, rz = 1;

    static double eta(double s);
    static double eta_prime(double s);

    double operator()(double t, double z) const;
    double dt(double t, double z) const;
    double dz(double t, double z) const;

    double t_min() const { return t0 - rt; }
    double t_max() const { return t0 + rt; }
    double z_min() const { return z0 - rz; }
    double z_max() const { return z0 + rz; }
};

/// Kruzkov entropy residual of rho_ell along a trajectory:
///
///   int int |rho - k| phi_t + sign(rho - k)(f(rho) - f(k)) phi_z dz dt
///     + int |rho(0,z) - k| phi(0,z) dz
///
/// Each cell's z-integral is exact in rho (phi_z integrates in closed form,
/// phi_t by adaptive Gauss-Kronrod to 1e-10); the t-integral uses the
/// trapezoid rule over snapshots. Throws std::invalid_argument if the time
/// support of phi leaves [0, t_end] or holds fewer than 32 snapshots.
double kruzkov_residual(const Trajectory& traj, const VelocityModel& model, double k, const BumpTestFunction& phi);

/// Residuals for several k at once; the per-cell test-function integrals are
/// shared across k. Snapshots are processed in parallel.
std::vector<double> kruzkov_residuals(const Trajectory& traj, const VelocityModel& model, std::span<const double> ks,
                                      const BumpTestFunction& phi);

namespace serial {

/// Single-threaded reference for kruzkov_residuals.
std::vector<double> kruzkov_residuals(const Trajectory& traj, const VelocityModel& model, std::span<const double> ks,
                                      const BumpTestFunction& phi);

} // namespace serial

inline constexpr int kMinSnapshotsInSupport = 32;

} // namespace ftl2lwr
