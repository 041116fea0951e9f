#pragma once

// Data-parallel inner loops of the particle and grid solvers.
//
// Each kernel exists twice: `serial::` is the plain reference loop kept for
// testing and benchmarking, `parallel::` is the OpenMP version used by the
// solvers. Both are element-wise with no reductions, so they agree bit for bit.

#include <cstddef>
#include <span>

#include "ftl2lwr/velocity.hpp"

namespace ftl2lwr {

/// Godunov numerical flux for a unimodal flux f:
/// min f on [a,b] if a <= b, max f on [b,a] otherwise.
double godunov_flux(const VelocityModel& model, double a, double b);

namespace serial {

/// speeds[k] = V((z[k+1]-z[k])/ell) for k < N-1 and speeds[N-1] = 1 (leader).
void ftl_speeds(std::span<const double> z, std::span<double> speeds, double ell, const VelocityModel& model);

/// Interface fluxes for cell averages u (size n): flux has n+1 entries,
/// flux[0] and flux[n] use constant extrapolation of the edge cells.
void godunov_fluxes(std::span<const double> u, std::span<double> flux, const VelocityModel& model);

/// u_out[j] = u[j] - lambda * (flux[j+1] - flux[j]).
void godunov_update(std::span<const double> u, std::span<const double> flux, std::span<double> u_out,
                    double lambda);

} // namespace serial

namespace parallel {

// Below this size the loops stay single-threaded.
inline constexpr std::size_t kMinParallelSize = 4096;

void ftl_speeds(std::span<const double> z, std::span<double> speeds, double ell, const VelocityModel& model);
void godunov_fluxes(std::span<const double> u, std::span<double> flux, const VelocityModel& model);
void godunov_update(std::span<const double> u, std::span<const double> flux, std::span<double> u_out,
                    double lambda);

} // namespace parallel

} // namespace ftl2lwr
