#pragma once

#include <cstddef>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "ftl2lwr/discretizer.hpp"
#include "ftl2lwr/ftl_sim.hpp"
#include "ftl2lwr/lwr_ref.hpp"
#include "ftl2lwr/reconstruct.hpp"
#include "ftl2lwr/velocity.hpp"

namespace ftl2lwr {

enum class ExitCode : int {
    ok = 0,
    config = 2,
    convergence = 3,
    invariant = 4,
};

enum class Mode { run, converge, entropy };

/// Raised for malformed or inconsistent configuration; the message names the
/// offending key and, when known, its line in the config file.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
    std::string model = "greenshields";
    InitialDensity density = block_density();
    std::string initial_label = "block";
    // Set for the "riemann" preset; enables the exact reference.
    bool riemann_preset = false;

    std::size_t N = 0;
    std::vector<std::size_t> N_list;
    double t_end = 0;
    std::vector<double> output_times;
    double cfl_particle = 0.9;
    double cfl_grid = 0.45;
    // 0 selects 16 * max N.
    std::size_t reference_cells = 0;
    std::vector<double> entropy_ks;
    std::vector<BumpTestFunction> phis;
    std::string output_dir;

    std::size_t max_N() const;
    std::size_t effective_reference_cells() const;
};

/// Parses and validates a config document for the given mode. `source` is the
/// raw text, used only to attach line numbers to error messages.
ExperimentConfig parse_config(const nlohmann::json& doc, Mode mode, const std::string& source = {});
ExperimentConfig load_config(const std::filesystem::path& path, Mode mode);

/// Pass/fail of every particle-level estimate along one trajectory.
struct InvariantReport {
    BoundReport spacing_bounds;
    std::vector<double> times;
    std::vector<double> tv_density;  // TV(rho_ell(t))
    std::vector<double> tv_velocity; // velocity_variation(t)
    std::vector<double> mass;        // mass(rho_ell(t))
    std::vector<double> l1_step;     // ||rho_ell(t_{s+1}) - rho_ell(t_s)||_1
    double expected_mass = 0;
    double lipschitz_constant = 0; // TV(rho_ell(0)) + TV(V_ell(0))

    double worst_tv_density_increase = 0;
    double worst_tv_velocity_increase = 0;
    double worst_mass_error = 0;
    double worst_lipschitz_excess = 0; // max of l1_step - dt * constant
    std::size_t clamp_events = 0;

    bool spacing_ok() const { return spacing_bounds.pass(1e-12, 1e-8); }
    bool tv_ok() const { return worst_tv_density_increase <= 1e-8 && worst_tv_velocity_increase <= 1e-8; }
    bool mass_ok() const { return worst_mass_error <= 1e-10; }
    bool lipschitz_ok() const { return worst_lipschitz_excess <= 1e-6; }
    bool all_pass() const { return spacing_ok() && tv_ok() && mass_ok() && lipschitz_ok(); }

    nlohmann::json to_json() const;
};

InvariantReport check_invariants(const Trajectory& traj, const VelocityModel& model);

struct ConvergenceRow {
    std::size_t N = 0;
    double ell = 0;
    double t = 0;
    double l1_error = 0;
    double tv_density = 0;
    double min_spacing_margin = 0;
    double worst_entropy_residual = 0; // NaN when no test functions are configured
    double order = 0;                  // NaN for the coarsest N
};

struct ConvergenceReport {
    std::vector<ConvergenceRow> rows; // ordered by t, then N
    std::string reference;            // "riemann_exact" or "godunov"
    // Reference sampled (exact) or computed (Godunov) on the reference grid.
    GridSolution reference_grid;
    bool strictly_decreasing = false;

    /// Rows at output time t, in N order.
    std::vector<ConvergenceRow> at_time(double t) const;
};

struct EntropyRow {
    std::size_t N = 0;
    double ell = 0;
    double k = 0;
    BumpTestFunction phi;
    double residual = 0;
};

struct EntropyReport {
    std::vector<EntropyRow> rows; // ordered by phi, k, then N
    bool negative_part_non_increasing = false;
};

/// Residuals below this magnitude are treated as zero when comparing the
/// negative part across N.
inline constexpr double kEntropyNoiseFloor = 1e-9;

struct Outcome {
    ExitCode code = ExitCode::ok;
    nlohmann::json report;
};

/// discretize -> simulate -> reconstruct; writes trajectory.csv,
/// fields_t<t>.csv and report.json into out_dir.
Outcome run_single(const ExperimentConfig& config, const std::filesystem::path& out_dir);

ConvergenceReport convergence_study(const ExperimentConfig& config);
/// Writes convergence.csv, reference_t<t>.csv and report.json.
Outcome run_convergence(const ExperimentConfig& config, const std::filesystem::path& out_dir);
/// Output stage of run_convergence; the exit code is 3 unless the errors
/// strictly decrease in N at every output time.
Outcome write_convergence(const ExperimentConfig& config, const ConvergenceReport& report,
                          const std::filesystem::path& out_dir);

EntropyReport entropy_study(const ExperimentConfig& config);
/// Writes entropy.csv and report.json.
Outcome run_entropy_suite(const ExperimentConfig& config, const std::filesystem::path& out_dir);

/// Shortest round-trip decimal form; "inf", "-inf" and "nan" for non-finite values.
std::string format_number(double x);

/// Entry point of the ftl2lwr executable.
int run_cli(int argc, char** argv);

} // namespace ftl2lwr
