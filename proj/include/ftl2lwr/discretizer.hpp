#pragma once

#include <cstddef>
#include <vector>

#include "ftl2lwr/step_function.hpp"

namespace ftl2lwr {

/// Compactly supported piecewise-constant initial density with values in [0,1].
class InitialDensity {
public:
    /// Throws std::invalid_argument on malformed breakpoints or values
    /// outside [0,1] (tolerance 1e-12).
    InitialDensity(std::vector<double> breakpoints, std::vector<double> values);

    const StepFunction& profile() const { return profile_; }
    const std::vector<double>& breakpoints() const { return profile_.breakpoints(); }
    const std::vector<double>& values() const { return profile_.values(); }

    double mass() const { return ftl2lwr::mass(profile_); }
    double total_variation() const { return ftl2lwr::total_variation(profile_); }
    bool normalized() const;

    /// Cumulative mass from the left end up to z (piecewise linear).
    double cdf(double z) const;

private:
    StepFunction profile_;
};

/// Presets available from the config file.
InitialDensity block_density();                                  // chi_[0,1]
InitialDensity riemann_density(double rho_left, double rho_right); // [-1,0) | [0,1), normalized
InitialDensity two_blocks_density();                             // chi_[0,0.5] + chi_[1,1.5]
InitialDensity constant_density(double value);                   // value on [0, 1/value)

/// Rescales the axis about the left end so the mass becomes 1; values are
/// unchanged. Throws on zero mass.
InitialDensity normalize(const InitialDensity& density);

struct InitialLayout {
    std::size_t N = 0;
    double ell = 0;
    // z_{1/2}(0), ..., z_{N-1/2}(0)
    std::vector<double> positions;
    // y_1(0), ..., y_{N-1}(0)
    std::vector<double> spacings;
};

/// Mass-quantile placement: z_{i+1/2}(0) = inf{ z : CDF(z) >= (i+1) ell },
/// ell = 1/(N+1), i = 0..N-1. Requires a normalized density and N >= 2.
InitialLayout initial_positions(const InitialDensity& density, std::size_t N);

} // namespace ftl2lwr
