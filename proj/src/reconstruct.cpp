#include "ftl2lwr/reconstruct.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace ftl2lwr {

StepFunction density_field(const FtlState& state) { return StepFunction(state.positions, state.densities()); }

StepFunction velocity_field(const FtlState& state, const VelocityModel& model)
{
    std::vector<double> v(state.cells());
    for (std::size_t i = 1; i < state.vehicles(); ++i)
        v[i - 1] = model.V_of_y(state.spacing(i));
    return StepFunction(state.positions, std::move(v));
}

double velocity_variation(const FtlState& state, const VelocityModel& model)
{
    const auto V = state.speeds(model);
    double tv = 0.0;
    for (std::size_t i = 0; i + 1 < V.size(); ++i)
        tv += std::abs(V[i + 1] - V[i]);
    return tv;
}

double BumpTestFunction::eta(double s)
{
    if (!(std::abs(s) < 1.0))
        return 0.0;
    return std::exp(1.0 / (s * s - 1.0));
}

double BumpTestFunction::eta_prime(double s)
{
    if (!(std::abs(s) < 1.0))
        return 0.0;
    const double q = s * s - 1.0;
    return eta(s) * (-2.0 * s / (q * q));
}

double BumpTestFunction::operator()(double t, double z) const { return eta((t - t0) / rt) * eta((z - z0) / rz); }

double BumpTestFunction::dt(double t, double z) const
{
    return eta_prime((t - t0) / rt) / rt * eta((z - z0) / rz);
}

double BumpTestFunction::dz(double t, double z) const
{
    return eta((t - t0) / rt) * eta_prime((z - z0) / rz) / rz;
}

namespace {

constexpr double kQuadratureTol = 1e-10;

struct Piece {
    double rho;
    double mass_weight;  // int_piece eta((z-z0)/rz) dz
    double slope_weight; // eta(s_right) - eta(s_left)
};

// Pieces of rho_ell(t,.) that meet the z-support of phi, including the zero
// tails on either side of the vehicle cells.
std::vector<Piece> pieces_in_support(const FtlState& state, const BumpTestFunction& phi)
{
    std::vector<Piece> out;
    const auto& p = state.positions;
    const auto add = [&](double left, double right, double rho) {
        const double u = std::max(left, phi.z_min());
        const double w = std::min(right, phi.z_max());
        if (!(u < w))
            return;
        const double su = (u - phi.z0) / phi.rz;
        const double sw = (w - phi.z0) / phi.rz;
        const double integral = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
            BumpTestFunction::eta, su, sw, 15, kQuadratureTol);
        out.push_back({rho, phi.rz * integral, BumpTestFunction::eta(sw) - BumpTestFunction::eta(su)});
    };
    add(-INFINITY, p.front(), 0.0);
    for (std::size_t i = 1; i < p.size(); ++i)
        add(p[i - 1], p[i], state.density(i));
    add(p.back(), INFINITY, 0.0);
    return out;
}

int sign(double x) { return (x > 0.0) - (x < 0.0); }

// Space integral at one snapshot, for every k.
void snapshot_integrand(const FtlState& state, const VelocityModel& model, std::span<const double> ks,
                        const BumpTestFunction& phi, std::span<double> out)
{
    std::fill(out.begin(), out.end(), 0.0);
    const double tau = (state.t - phi.t0) / phi.rt;
    if (!(std::abs(tau) < 1.0))
        return;
    const double a = BumpTestFunction::eta(tau);
    const double a_t = BumpTestFunction::eta_prime(tau) / phi.rt;
    for (const Piece& piece : pieces_in_support(state, phi)) {
        const double f_rho = model.flux(piece.rho);
        for (std::size_t j = 0; j < ks.size(); ++j) {
            const double k = ks[j];
            out[j] += std::abs(piece.rho - k) * a_t * piece.mass_weight +
                      sign(piece.rho - k) * (f_rho - model.flux(k)) * a * piece.slope_weight;
        }
    }
}

void validate(const Trajectory& traj, const BumpTestFunction& phi)
{
    if (traj.snapshots.empty())
        throw std::invalid_argument("kruzkov_residual: empty trajectory");
    if (!(phi.rt > 0.0 && phi.rz > 0.0))
        throw std::invalid_argument("kruzkov_residual: test function radii must be positive");
    if (phi.t_min() < 0.0 || phi.t_max() > traj.final().t)
        throw std::invalid_argument("kruzkov_residual: test function support leaves [0, t_end]");
    if (traj.initial().t > phi.t_min())
        throw std::invalid_argument("kruzkov_residual: trajectory starts inside the test function support");
    const auto inside = std::count_if(traj.snapshots.begin(), traj.snapshots.end(), [&](const FtlState& s) {
        return s.t > phi.t_min() && s.t < phi.t_max();
    });
    if (inside < kMinSnapshotsInSupport)
        throw std::invalid_argument("kruzkov_residual: fewer than 32 snapshots inside the test function support");
}

// Trapezoid rule in time plus the initial-data term.
std::vector<double> assemble(const Trajectory& traj, std::span<const double> ks, const BumpTestFunction& phi,
                             const std::vector<double>& integrands)
{
    const std::size_t nk = ks.size();
    std::vector<double> result(nk, 0.0);
    for (std::size_t s = 0; s + 1 < traj.snapshots.size(); ++s) {
        const double h = traj.snapshots[s + 1].t - traj.snapshots[s].t;
        for (std::size_t j = 0; j < nk; ++j)
            result[j] += 0.5 * h * (integrands[s * nk + j] + integrands[(s + 1) * nk + j]);
    }

    const FtlState& first = traj.initial();
    if (first.t == 0.0) {
        const double a0 = BumpTestFunction::eta((0.0 - phi.t0) / phi.rt);
        if (a0 > 0.0) {
            for (const Piece& piece : pieces_in_support(first, phi))
                for (std::size_t j = 0; j < nk; ++j)
                    result[j] += std::abs(piece.rho - ks[j]) * a0 * piece.mass_weight;
        }
    }
    return result;
}

} // namespace

std::vector<double> kruzkov_residuals(const Trajectory& traj, const VelocityModel& model, std::span<const double> ks,
                                      const BumpTestFunction& phi)
{
    validate(traj, phi);
    const std::size_t nk = ks.size();
    const auto count = static_cast<long>(traj.snapshots.size());
    std::vector<double> integrands(traj.snapshots.size() * nk);

    std::exception_ptr error;
#pragma omp parallel for schedule(dynamic)
    for (long s = 0; s < count; ++s) {
        try {
            snapshot_integrand(traj.snapshots[s], model, ks, phi,
                               std::span<double>(integrands).subspan(static_cast<std::size_t>(s) * nk, nk));
        } catch (...) {
#pragma omp critical(ftl2lwr_residual_error)
            if (!error)
                error = std::current_exception();
        }
    }
    if (error)
        std::rethrow_exception(error);
    return assemble(traj, ks, phi, integrands);
}

double kruzkov_residual(const Trajectory& traj, const VelocityModel& model, double k, const BumpTestFunction& phi)
{
    const double ks[] = {k};
    return kruzkov_residuals(traj, model, ks, phi).front();
}

namespace serial {

std::vector<double> kruzkov_residuals(const Trajectory& traj, const VelocityModel& model, std::span<const double> ks,
                                      const BumpTestFunction& phi)
{
    validate(traj, phi);
    const std::size_t nk = ks.size();
    std::vector<double> integrands(traj.snapshots.size() * nk);
    for (std::size_t s = 0; s < traj.snapshots.size(); ++s)
        snapshot_integrand(traj.snapshots[s], model, ks, phi, std::span<double>(integrands).subspan(s * nk, nk));
    return assemble(traj, ks, phi, integrands);
}

} // namespace serial

} // namespace ftl2lwr
