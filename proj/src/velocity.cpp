#include "ftl2lwr/velocity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ftl2lwr {

namespace {

constexpr double kDomainTol = 1e-12;
constexpr double kCheckTol = 1e-12;
constexpr int kRegistrationSamples = 10000;

} // namespace

VelocityModel::VelocityModel(std::string name, Fn v, Fn v_prime, double sigma, double M)
    : name_(std::move(name)), v_(std::move(v)), v_prime_(std::move(v_prime)), sigma_(sigma), M_(M)
{
    if (!(sigma_ > 1.0))
        throw std::invalid_argument("velocity model '" + name_ + "': sigma must exceed 1");
    if (!(M_ > 0.0))
        throw std::invalid_argument("velocity model '" + name_ + "': M must be positive");
    if (std::abs(v_(0.0) - 1.0) > kCheckTol || std::abs(v_(1.0)) > kCheckTol)
        throw std::invalid_argument("velocity model '" + name_ + "': requires v(0)=1 and v(1)=0");

    // f' may change sign at most once, from + to -.
    bool descending = false;
    double speed = 0.0;
    double prev_rho = 0.0;
    double peak_lo = 1.0, peak_hi = 1.0;
    for (int j = 0; j < kRegistrationSamples; ++j) {
        const double rho = static_cast<double>(j) / (kRegistrationSamples - 1);
        const double fp = flux_prime(rho);
        speed = std::max(speed, std::abs(fp));
        if (fp < -kCheckTol) {
            if (!descending) {
                descending = true;
                peak_lo = prev_rho;
                peak_hi = rho;
            }
        } else if (fp > kCheckTol && descending) {
            throw std::invalid_argument("velocity model '" + name_ + "': flux is not unimodal");
        }
        prev_rho = rho;
    }
    max_speed_ = speed;

    if (!descending) {
        peak_ = 1.0;
    } else {
        // Bisect on the sign of f' inside the bracketing sample pair.
        for (int it = 0; it < 200 && peak_hi - peak_lo > 4 * std::numeric_limits<double>::epsilon(); ++it) {
            const double mid = 0.5 * (peak_lo + peak_hi);
            if (flux_prime(mid) > 0.0)
                peak_lo = mid;
            else
                peak_hi = mid;
        }
        peak_ = 0.5 * (peak_lo + peak_hi);
    }
}

double VelocityModel::v_of_rho(double rho) const
{
    if (!(rho >= -kDomainTol && rho <= 1.0 + kDomainTol))
        throw std::domain_error("v_of_rho: density outside [0,1]");
    return v_(std::clamp(rho, 0.0, 1.0));
}

double VelocityModel::v_prime(double rho) const
{
    if (!(rho >= -kDomainTol && rho <= 1.0 + kDomainTol))
        throw std::domain_error("v_prime: density outside [0,1]");
    return v_prime_(std::clamp(rho, 0.0, 1.0));
}

double VelocityModel::V_of_y(double y) const
{
    if (std::isinf(y) && y > 0)
        return 1.0;
    if (!(y >= 1.0 - kDomainTol))
        throw std::domain_error("V_of_y: spacing below one vehicle length");
    return v_(1.0 / std::max(y, 1.0));
}

double VelocityModel::V_prime(double y) const
{
    if (std::isinf(y) && y > 0)
        return 0.0;
    if (!(y >= 1.0 - kDomainTol))
        throw std::domain_error("V_prime: spacing below one vehicle length");
    y = std::max(y, 1.0);
    return -v_prime_(1.0 / y) / (y * y);
}

double VelocityModel::flux(double rho) const { return rho * v_of_rho(rho); }

double VelocityModel::flux_prime(double rho) const { return v_of_rho(rho) + rho * v_prime(rho); }

VelocityModel greenshields()
{
    return VelocityModel(
        "greenshields", [](double rho) { return 1.0 - rho; }, [](double) { return -1.0; }, 2.0, 1.0);
}

VelocityModel quadratic()
{
    return VelocityModel(
        "quadratic", [](double rho) { return 1.0 - rho * rho; }, [](double rho) { return -2.0 * rho; }, 3.0,
        2.0);
}

VelocityModel model_by_name(std::string_view name)
{
    if (name == "greenshields")
        return greenshields();
    if (name == "quadratic")
        return quadratic();
    throw std::invalid_argument("unknown velocity model '" + std::string(name) + "'");
}

AssumptionReport verify_assumptions(const VelocityModel& model, int grid_size)
{
    if (grid_size < 2)
        throw std::invalid_argument("verify_assumptions: grid_size must be at least 2");

    AssumptionReport r;
    r.lower_bound_margin = std::numeric_limits<double>::infinity();
    r.derivative_margin = std::numeric_limits<double>::infinity();
    r.max_v_prime = -std::numeric_limits<double>::infinity();

    const double log_top = std::log(1e6);
    for (int j = 0; j < grid_size; ++j) {
        const double y = (j == 0) ? 1.0 : std::exp(log_top * j / (grid_size - 1));
        const double V = model.V_of_y(y);
        r.lower_bound_margin = std::min(r.lower_bound_margin, V - (1.0 - std::pow(y, 1.0 - model.sigma())));
        r.derivative_margin = std::min(r.derivative_margin, model.M() - y * y * model.V_prime(y));
        r.max_v_prime = std::max(r.max_v_prime, model.v_prime(1.0 / y));
    }
    // Densities below 1e-6 are not reached by the spacing grid.
    for (int j = 0; j < grid_size; ++j) {
        const double rho = static_cast<double>(j) / (grid_size - 1);
        r.max_v_prime = std::max(r.max_v_prime, model.v_prime(rho));
    }
    r.boundary_error = std::max(std::abs(model.v_of_rho(0.0) - 1.0), std::abs(model.v_of_rho(1.0)));

    r.lower_bound_ok = r.lower_bound_margin >= -kCheckTol;
    r.derivative_ok = r.derivative_margin >= -kCheckTol;
    r.monotone_ok = r.max_v_prime <= kCheckTol;
    r.boundary_ok = r.boundary_error <= kCheckTol;
    return r;
}

} // namespace ftl2lwr
