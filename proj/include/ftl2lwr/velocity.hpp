#pragma once

#include <functional>
#include <string>
#include <string_view>

namespace ftl2lwr {

/// Speed law of the traffic model, normalized so that the free-flow speed is 1.
///
/// A model is given in density form v(rho) on [0,1]; the spacing form is
/// V(y) = v(1/y) for y >= 1 (y measured in vehicle lengths). The constants
/// sigma and M are the ones the model author claims for
///   V(y) >= 1 - y^(1-sigma)   and   y^2 V'(y) <= M,
/// and are checked, not inferred, by verify_assumptions().
///
/// Construction performs the registration checks needed by the Godunov
/// reference solver: boundary values v(0)=1, v(1)=0 and a unimodal flux
/// f(rho) = rho v(rho). Instances are immutable.
class VelocityModel {
public:
    using Fn = std::function<double(double)>;

    VelocityModel(std::string name, Fn v, Fn v_prime, double sigma, double M);

    const std::string& name() const { return name_; }
    double sigma() const { return sigma_; }
    double M() const { return M_; }

    /// v(rho); throws std::domain_error outside [0,1] (tolerance 1e-12).
    double v_of_rho(double rho) const;
    double v_prime(double rho) const;

    /// V(y) = v(1/y); accepts y = +inf (returns 1). Throws for y < 1 - 1e-12.
    double V_of_y(double y) const;
    /// V'(y) = -v'(1/y) / y^2.
    double V_prime(double y) const;

    /// f(rho) = rho v(rho).
    double flux(double rho) const;
    double flux_prime(double rho) const;

    /// Maximizer of f on [0,1] (measured at registration).
    double flux_peak() const { return peak_; }
    /// max |f'| on [0,1] (measured at registration).
    double max_wave_speed() const { return max_speed_; }

private:
    std::string name_;
    Fn v_;
    Fn v_prime_;
    double sigma_;
    double M_;
    double peak_ = 0.5;
    double max_speed_ = 1.0;
};

/// v(rho) = 1 - rho, sigma = 2, M = 1.
VelocityModel greenshields();
/// v(rho) = 1 - rho^2, sigma = 3, M = 2.
VelocityModel quadratic();

/// Lookup by config name: "greenshields" | "quadratic".
VelocityModel model_by_name(std::string_view name);

struct AssumptionReport {
    // Worst (smallest) value of V(y) - (1 - y^(1-sigma)) on the grid.
    double lower_bound_margin = 0;
    // Worst (smallest) value of M - y^2 V'(y) on the grid.
    double derivative_margin = 0;
    // Largest v'(rho) seen; must be <= 0.
    double max_v_prime = 0;
    // max(|v(0) - 1|, |v(1)|).
    double boundary_error = 0;

    bool lower_bound_ok = false;
    bool derivative_ok = false;
    bool monotone_ok = false;
    bool boundary_ok = false;

    bool all_pass() const { return lower_bound_ok && derivative_ok && monotone_ok && boundary_ok; }
};

/// Samples y on a geometric grid over [1, 1e6] with grid_size points and
/// reports the worst margin of each structural assumption. Failures are
/// reported, not thrown. Checks pass at tolerance 1e-12.
AssumptionReport verify_assumptions(const VelocityModel& model, int grid_size);

} // namespace ftl2lwr
