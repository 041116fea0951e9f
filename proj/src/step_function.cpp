#include "ftl2lwr/step_function.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <stdexcept>

namespace ftl2lwr {

namespace {

void check_layout(const std::vector<double>& breakpoints, std::size_t pieces, const char* what)
{
    if (pieces == 0 && breakpoints.empty())
        return;
    if (breakpoints.size() != pieces + 1)
        throw std::invalid_argument(std::string(what) + ": need exactly one more breakpoint than pieces");
    for (std::size_t j = 0; j + 1 < breakpoints.size(); ++j)
        if (!(breakpoints[j] < breakpoints[j + 1]))
            throw std::invalid_argument(std::string(what) + ": breakpoints must be strictly increasing");
}

// Index of the piece containing z, or -1 outside the support.
long locate(const std::vector<double>& breakpoints, double z)
{
    if (breakpoints.empty() || z < breakpoints.front() || z >= breakpoints.back())
        return -1;
    auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), z);
    return static_cast<long>(std::distance(breakpoints.begin(), it)) - 1;
}

std::vector<double> merged(const std::vector<double>& a, const std::vector<double>& b)
{
    std::vector<double> out;
    out.reserve(a.size() + b.size());
    std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

// Exact integral of |d| over [u, w] for d linear with endpoint values du, dw.
double abs_linear_integral(double du, double dw, double width)
{
    if ((du >= 0 && dw >= 0) || (du <= 0 && dw <= 0))
        return 0.5 * std::abs(du + dw) * width;
    return 0.5 * (du * du + dw * dw) / std::abs(dw - du) * width;
}

} // namespace

StepFunction::StepFunction(std::vector<double> breakpoints, std::vector<double> values)
    : breakpoints_(std::move(breakpoints)), values_(std::move(values))
{
    check_layout(breakpoints_, values_.size(), "StepFunction");
}

double StepFunction::operator()(double z) const
{
    const long j = locate(breakpoints_, z);
    return j < 0 ? 0.0 : values_[static_cast<std::size_t>(j)];
}

PiecewiseLinear::PiecewiseLinear(std::vector<double> breakpoints, std::vector<double> intercepts,
                                 std::vector<double> slopes)
    : breakpoints_(std::move(breakpoints)), intercepts_(std::move(intercepts)), slopes_(std::move(slopes))
{
    if (intercepts_.size() != slopes_.size())
        throw std::invalid_argument("PiecewiseLinear: intercept/slope size mismatch");
    check_layout(breakpoints_, intercepts_.size(), "PiecewiseLinear");
}

double PiecewiseLinear::operator()(double z) const
{
    const long j = locate(breakpoints_, z);
    if (j < 0)
        return 0.0;
    const auto k = static_cast<std::size_t>(j);
    return intercepts_[k] + slopes_[k] * z;
}

double mass(const StepFunction& f)
{
    double m = 0.0;
    const auto& b = f.breakpoints();
    for (std::size_t j = 0; j < f.pieces(); ++j)
        m += f.values()[j] * (b[j + 1] - b[j]);
    return m;
}

double mass(const PiecewiseLinear& f)
{
    double m = 0.0;
    const auto& b = f.breakpoints();
    for (std::size_t j = 0; j < f.pieces(); ++j) {
        const double mid = 0.5 * (b[j] + b[j + 1]);
        m += (f.intercept(j) + f.slope(j) * mid) * (b[j + 1] - b[j]);
    }
    return m;
}

double total_variation(const StepFunction& f)
{
    if (f.empty())
        return 0.0;
    const auto& v = f.values();
    double tv = std::abs(v.front()) + std::abs(v.back());
    for (std::size_t j = 0; j + 1 < v.size(); ++j)
        tv += std::abs(v[j + 1] - v[j]);
    return tv;
}

double l1_distance(const StepFunction& f, const StepFunction& g)
{
    const auto grid = merged(f.breakpoints(), g.breakpoints());
    double d = 0.0;
    for (std::size_t j = 0; j + 1 < grid.size(); ++j) {
        const double mid = 0.5 * (grid[j] + grid[j + 1]);
        d += std::abs(f(mid) - g(mid)) * (grid[j + 1] - grid[j]);
    }
    return d;
}

double l1_distance(const StepFunction& f, const PiecewiseLinear& g)
{
    const auto grid = merged(f.breakpoints(), g.breakpoints());
    double d = 0.0;
    for (std::size_t j = 0; j + 1 < grid.size(); ++j) {
        const double u = grid[j], w = grid[j + 1];
        const double mid = 0.5 * (u + w);
        const double c = f(mid);
        const long k = locate(g.breakpoints(), mid);
        if (k < 0) {
            d += std::abs(c) * (w - u);
            continue;
        }
        const auto piece = static_cast<std::size_t>(k);
        const double a = g.intercept(piece) - c, s = g.slope(piece);
        d += abs_linear_integral(a + s * u, a + s * w, w - u);
    }
    return d;
}

} // namespace ftl2lwr
