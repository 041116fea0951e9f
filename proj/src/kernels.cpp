#include "ftl2lwr/kernels.hpp"

#include <algorithm>
#include <cassert>
#include <exception>

namespace ftl2lwr {

double godunov_flux(const VelocityModel& model, double a, double b)
{
    if (a <= b)
        return std::min(model.flux(a), model.flux(b));
    const double peak = model.flux_peak();
    if (b <= peak && peak <= a)
        return model.flux(peak);
    return std::max(model.flux(a), model.flux(b));
}

namespace serial {

void ftl_speeds(std::span<const double> z, std::span<double> speeds, double ell, const VelocityModel& model)
{
    assert(speeds.size() == z.size() && !z.empty());
    const std::size_t n = z.size();
    for (std::size_t k = 0; k + 1 < n; ++k)
        speeds[k] = model.V_of_y((z[k + 1] - z[k]) / ell);
    speeds[n - 1] = 1.0;
}

void godunov_fluxes(std::span<const double> u, std::span<double> flux, const VelocityModel& model)
{
    const std::size_t n = u.size();
    assert(flux.size() == n + 1 && n > 0);
    flux[0] = model.flux(u[0]);
    flux[n] = model.flux(u[n - 1]);
    for (std::size_t j = 1; j < n; ++j)
        flux[j] = godunov_flux(model, u[j - 1], u[j]);
}

void godunov_update(std::span<const double> u, std::span<const double> flux, std::span<double> u_out,
                    double lambda)
{
    for (std::size_t j = 0; j < u.size(); ++j)
        u_out[j] = u[j] - lambda * (flux[j + 1] - flux[j]);
}

} // namespace serial

namespace parallel {

// Signed loop indices for OpenMP.
using index_t = long;

// Exceptions must not escape an OpenMP region; the first one is rethrown after it.
class FirstError {
public:
    template <class F>
    void guard(F&& body)
    {
        try {
            body();
        } catch (...) {
#pragma omp critical(ftl2lwr_first_error)
            if (!error_)
                error_ = std::current_exception();
        }
    }
    void rethrow() const
    {
        if (error_)
            std::rethrow_exception(error_);
    }

private:
    std::exception_ptr error_;
};

void ftl_speeds(std::span<const double> z, std::span<double> speeds, double ell, const VelocityModel& model)
{
    assert(speeds.size() == z.size() && !z.empty());
    const auto n = static_cast<index_t>(z.size());
    FirstError error;
#pragma omp parallel for schedule(static) if (z.size() >= kMinParallelSize)
    for (index_t k = 0; k < n - 1; ++k)
        error.guard([&] { speeds[k] = model.V_of_y((z[k + 1] - z[k]) / ell); });
    error.rethrow();
    speeds[n - 1] = 1.0;
}

void godunov_fluxes(std::span<const double> u, std::span<double> flux, const VelocityModel& model)
{
    const auto n = static_cast<index_t>(u.size());
    assert(flux.size() == u.size() + 1 && n > 0);
    flux[0] = model.flux(u[0]);
    flux[n] = model.flux(u[n - 1]);
    FirstError error;
#pragma omp parallel for schedule(static) if (u.size() >= kMinParallelSize)
    for (index_t j = 1; j < n; ++j)
        error.guard([&] { flux[j] = godunov_flux(model, u[j - 1], u[j]); });
    error.rethrow();
}

void godunov_update(std::span<const double> u, std::span<const double> flux, std::span<double> u_out,
                    double lambda)
{
    const auto n = static_cast<index_t>(u.size());
#pragma omp parallel for schedule(static) if (u.size() >= kMinParallelSize)
    for (index_t j = 0; j < n; ++j)
        u_out[j] = u[j] - lambda * (flux[j + 1] - flux[j]);
}

} // namespace parallel

} // namespace ftl2lwr
