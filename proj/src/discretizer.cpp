#include "ftl2lwr/discretizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ftl2lwr {

namespace {

constexpr double kValueTol = 1e-12;
constexpr double kMassTol = 1e-12;

std::vector<double> clamp_values(std::vector<double> values)
{
    for (double& v : values) {
        if (!(v >= -kValueTol && v <= 1.0 + kValueTol))
            throw std::invalid_argument("InitialDensity: values must lie in [0,1]");
        v = std::clamp(v, 0.0, 1.0);
    }
    return values;
}

} // namespace

InitialDensity::InitialDensity(std::vector<double> breakpoints, std::vector<double> values)
    : profile_(std::move(breakpoints), clamp_values(std::move(values)))
{
    if (profile_.empty())
        throw std::invalid_argument("InitialDensity: at least one piece is required");
    for (double b : profile_.breakpoints())
        if (!std::isfinite(b))
            throw std::invalid_argument("InitialDensity: breakpoints must be finite");
}

bool InitialDensity::normalized() const { return std::abs(mass() - 1.0) <= kMassTol; }

double InitialDensity::cdf(double z) const
{
    const auto& b = breakpoints();
    const auto& v = values();
    double c = 0.0;
    for (std::size_t j = 0; j < v.size(); ++j) {
        if (z <= b[j])
            break;
        c += v[j] * (std::min(z, b[j + 1]) - b[j]);
    }
    return c;
}

InitialDensity block_density() { return InitialDensity({0.0, 1.0}, {1.0}); }

InitialDensity riemann_density(double rho_left, double rho_right)
{
    return normalize(InitialDensity({-1.0, 0.0, 1.0}, {rho_left, rho_right}));
}

InitialDensity two_blocks_density() { return InitialDensity({0.0, 0.5, 1.0, 1.5}, {1.0, 0.0, 1.0}); }

InitialDensity constant_density(double value)
{
    if (!(value > 0.0 && value <= 1.0))
        throw std::invalid_argument("constant density must lie in (0,1]");
    return InitialDensity({0.0, 1.0 / value}, {value});
}

InitialDensity normalize(const InitialDensity& density)
{
    const double m = density.mass();
    if (!(m > 0.0))
        throw std::invalid_argument("normalize: density has zero mass");
    if (std::abs(m - 1.0) <= kMassTol)
        return density;
    const double x0 = density.breakpoints().front();
    std::vector<double> b = density.breakpoints();
    for (double& z : b)
        z = x0 + (z - x0) / m;
    return InitialDensity(std::move(b), density.values());
}

InitialLayout initial_positions(const InitialDensity& density, std::size_t N)
{
    if (N < 2)
        throw std::invalid_argument("initial_positions: need at least two vehicles");
    if (!density.normalized())
        throw std::invalid_argument("initial_positions: density must have unit mass");

    const auto& b = density.breakpoints();
    const auto& v = density.values();
    const std::size_t pieces = v.size();

    // cumulative[j] = mass left of b[j]
    std::vector<double> cumulative(pieces + 1, 0.0);
    for (std::size_t j = 0; j < pieces; ++j)
        cumulative[j + 1] = cumulative[j] + v[j] * (b[j + 1] - b[j]);

    InitialLayout layout;
    layout.N = N;
    layout.ell = 1.0 / static_cast<double>(N + 1);
    layout.positions.resize(N);

    constexpr double eps = std::numeric_limits<double>::epsilon();
    std::size_t j = 0; // current piece; levels increase so the scan is monotone
    for (std::size_t i = 0; i < N; ++i) {
        const double level = static_cast<double>(i + 1) / static_cast<double>(N + 1);
        const double slack = 8 * eps * std::max(1.0, level);
        // First piece whose right-end cumulative mass reaches the level. A level
        // that lands on a zero-density plateau stops at the plateau's left edge.
        while (j + 1 < pieces && cumulative[j + 1] < level - slack)
            ++j;
        double z;
        if (v[j] > 0.0) {
            z = b[j] + std::max(0.0, level - cumulative[j]) / v[j];
            z = std::min(z, b[j + 1]);
        } else {
            z = b[j];
        }
        layout.positions[i] = z;
    }

    layout.spacings.resize(N - 1);
    for (std::size_t i = 1; i < N; ++i)
        layout.spacings[i - 1] = (layout.positions[i] - layout.positions[i - 1]) / layout.ell;
    return layout;
}

} // namespace ftl2lwr
