#pragma once

#include <cstddef>
#include <vector>

namespace ftl2lwr {

/// Piecewise-constant function on the real line: value values[j] on
/// [breakpoints[j], breakpoints[j+1]), zero outside [front, back].
/// All functionals below are exact.
class StepFunction {
public:
    StepFunction() = default;
    StepFunction(std::vector<double> breakpoints, std::vector<double> values);

    const std::vector<double>& breakpoints() const { return breakpoints_; }
    const std::vector<double>& values() const { return values_; }
    std::size_t pieces() const { return values_.size(); }
    bool empty() const { return values_.empty(); }

    double operator()(double z) const;

private:
    std::vector<double> breakpoints_;
    std::vector<double> values_;
};

/// Piecewise-linear function: intercept[j] + slope[j]*z on
/// [breakpoints[j], breakpoints[j+1]), zero outside. Discontinuities are
/// allowed at breakpoints. Used for exact Riemann solutions.
class PiecewiseLinear {
public:
    PiecewiseLinear() = default;
    PiecewiseLinear(std::vector<double> breakpoints, std::vector<double> intercepts, std::vector<double> slopes);

    const std::vector<double>& breakpoints() const { return breakpoints_; }
    std::size_t pieces() const { return intercepts_.size(); }

    double operator()(double z) const;
    double intercept(std::size_t j) const { return intercepts_[j]; }
    double slope(std::size_t j) const { return slopes_[j]; }

private:
    std::vector<double> breakpoints_;
    std::vector<double> intercepts_;
    std::vector<double> slopes_;
};

double mass(const StepFunction& f);
double mass(const PiecewiseLinear& f);

/// |v_1| + sum |v_{j+1} - v_j| + |v_p|, jumps from and to the zero tails included.
double total_variation(const StepFunction& f);

double l1_distance(const StepFunction& f, const StepFunction& g);
double l1_distance(const StepFunction& f, const PiecewiseLinear& g);

} // namespace ftl2lwr
