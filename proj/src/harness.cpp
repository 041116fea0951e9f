#include "ftl2lwr/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <sstream>

#include "ftl2lwr/step_function.hpp"

namespace ftl2lwr {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_number(double x)
{
    if (std::isnan(x))
        return "nan";
    if (std::isinf(x))
        return x > 0 ? "inf" : "-inf";
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
    (void)ec;
    return std::string(buf, end);
}

std::size_t ExperimentConfig::max_N() const
{
    std::size_t m = N;
    for (std::size_t n : N_list)
        m = std::max(m, n);
    return m;
}

std::size_t ExperimentConfig::effective_reference_cells() const
{
    return reference_cells ? reference_cells : 16 * max_N();
}

// ---------------------------------------------------------------------------
// Config parsing

namespace {

class ConfigReader {
public:
    ConfigReader(const json& doc, const std::string& source) : doc_(doc), source_(source) {}

    [[noreturn]] void fail(const std::string& key, const std::string& what) const
    {
        throw ConfigError(location(key) + "'" + key + "' " + what);
    }

    bool has(const std::string& key) const { return doc_.contains(key); }

    double number(const std::string& key) const
    {
        const json& v = doc_.at(key);
        if (!v.is_number())
            fail(key, "must be a number");
        return v.get<double>();
    }

    double number_or(const std::string& key, double fallback) const { return has(key) ? number(key) : fallback; }

    std::size_t count(const std::string& key) const
    {
        const json& v = doc_.at(key);
        if (!v.is_number_integer() || v.get<long long>() < 0)
            fail(key, "must be a non-negative integer");
        return v.get<std::size_t>();
    }

    std::vector<double> numbers(const std::string& key) const
    {
        const json& v = doc_.at(key);
        if (!v.is_array())
            fail(key, "must be an array of numbers");
        std::vector<double> out;
        for (const json& x : v) {
            if (!x.is_number())
                fail(key, "must be an array of numbers");
            out.push_back(x.get<double>());
        }
        return out;
    }

    std::vector<std::size_t> counts(const std::string& key) const
    {
        const json& v = doc_.at(key);
        if (!v.is_array())
            fail(key, "must be an array of integers");
        std::vector<std::size_t> out;
        for (const json& x : v) {
            if (!x.is_number_integer() || x.get<long long>() < 0)
                fail(key, "must be an array of non-negative integers");
            out.push_back(x.get<std::size_t>());
        }
        return out;
    }

    std::string text(const std::string& key) const
    {
        const json& v = doc_.at(key);
        if (!v.is_string())
            fail(key, "must be a string");
        return v.get<std::string>();
    }

    const json& object(const std::string& key) const
    {
        const json& v = doc_.at(key);
        if (!v.is_object())
            fail(key, "must be an object");
        return v;
    }

    ConfigReader nested(const std::string& key) const { return ConfigReader(object(key), source_); }

private:
    // "line N: " for the first occurrence of "key" in the raw text.
    std::string location(const std::string& key) const
    {
        const auto pos = source_.find("\"" + key + "\"");
        if (pos == std::string::npos)
            return "";
        const auto line = 1 + std::count(source_.begin(), source_.begin() + static_cast<long>(pos), '\n');
        return "line " + std::to_string(line) + ": ";
    }

    const json& doc_;
    const std::string& source_;
};

void parse_initial(const ConfigReader& r, ExperimentConfig& c)
{
    if (!r.has("initial"))
        return;
    const ConfigReader init = r.nested("initial");
    try {
        if (init.has("preset")) {
            const std::string preset = init.text("preset");
            c.initial_label = preset;
            if (preset == "block") {
                c.density = block_density();
            } else if (preset == "two_blocks") {
                c.density = two_blocks_density();
            } else if (preset == "riemann") {
                if (!init.has("rho_left") || !init.has("rho_right"))
                    init.fail("preset", "\"riemann\" requires rho_left and rho_right");
                const double left = init.number("rho_left"), right = init.number("rho_right");
                c.density = riemann_density(left, right);
                c.riemann_preset = true;
                c.initial_label = "riemann(" + format_number(left) + "," + format_number(right) + ")";
            } else if (preset == "constant") {
                if (!init.has("value"))
                    init.fail("preset", "\"constant\" requires value");
                c.density = constant_density(init.number("value"));
            } else {
                init.fail("preset", "must be one of block, riemann, two_blocks, constant");
            }
        } else {
            if (!init.has("breakpoints") || !init.has("values"))
                r.fail("initial", "needs a preset or breakpoints and values");
            c.density = normalize(InitialDensity(init.numbers("breakpoints"), init.numbers("values")));
            c.initial_label = "explicit";
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        r.fail("initial", std::string("is invalid: ") + e.what());
    }
}

std::vector<BumpTestFunction> parse_phis(const json& doc, const ConfigReader& r)
{
    const json& list = doc.at("phi");
    if (!list.is_array())
        r.fail("phi", "must be an array of {t0, z0, rt, rz} objects");
    std::vector<BumpTestFunction> out;
    for (const json& item : list) {
        if (!item.is_object())
            r.fail("phi", "must be an array of {t0, z0, rt, rz} objects");
        BumpTestFunction phi;
        for (const char* key : {"t0", "z0", "rt", "rz"})
            if (!item.contains(key) || !item.at(key).is_number())
                r.fail("phi", std::string("entries need a numeric '") + key + "'");
        phi.t0 = item.at("t0").get<double>();
        phi.z0 = item.at("z0").get<double>();
        phi.rt = item.at("rt").get<double>();
        phi.rz = item.at("rz").get<double>();
        out.push_back(phi);
    }
    return out;
}

void require_increasing(const ConfigReader& r, const std::string& key, const std::vector<std::size_t>& list,
                        std::size_t min_entries)
{
    if (list.size() < min_entries)
        r.fail(key, "needs at least " + std::to_string(min_entries) + " entries");
    for (std::size_t j = 0; j < list.size(); ++j) {
        if (list[j] < 2)
            r.fail(key, "entries must be at least 2");
        if (j > 0 && list[j] <= list[j - 1])
            r.fail(key, "must be strictly increasing");
    }
}

} // namespace

ExperimentConfig parse_config(const json& doc, Mode mode, const std::string& source)
{
    if (!doc.is_object())
        throw ConfigError("config must be a JSON object");
    const ConfigReader r(doc, source);
    ExperimentConfig c;

    if (r.has("model")) {
        c.model = r.text("model");
        try {
            (void)model_by_name(c.model);
        } catch (const std::invalid_argument&) {
            r.fail("model", "must be \"greenshields\" or \"quadratic\"");
        }
    }
    parse_initial(r, c);

    if (!r.has("t_end"))
        r.fail("t_end", "is required");
    c.t_end = r.number("t_end");
    if (!(c.t_end > 0.0))
        r.fail("t_end", "must be positive");

    if (r.has("output_times") && r.has("snapshots"))
        r.fail("snapshots", "cannot be combined with output_times");
    if (r.has("output_times")) {
        c.output_times = r.numbers("output_times");
        for (std::size_t j = 0; j < c.output_times.size(); ++j) {
            if (!(c.output_times[j] >= 0.0))
                r.fail("output_times", "must be non-negative");
            if (c.output_times[j] > c.t_end)
                r.fail("output_times", "must not exceed t_end");
            if (j > 0 && !(c.output_times[j] > c.output_times[j - 1]))
                r.fail("output_times", "must be strictly increasing");
        }
    } else {
        const std::size_t n = r.has("snapshots") ? r.count("snapshots") : (mode == Mode::entropy ? 256 : 1);
        if (n == 0)
            r.fail("snapshots", "must be positive");
        for (std::size_t j = 1; j <= n; ++j)
            c.output_times.push_back(j == n ? c.t_end : c.t_end * static_cast<double>(j) / static_cast<double>(n));
    }

    c.cfl_particle = r.number_or("cfl_particle", c.cfl_particle);
    if (!(c.cfl_particle > 0.0 && c.cfl_particle <= 1.0))
        r.fail("cfl_particle", "must lie in (0, 1]");
    c.cfl_grid = r.number_or("cfl_grid", c.cfl_grid);
    if (!(c.cfl_grid > 0.0 && c.cfl_grid <= 1.0))
        r.fail("cfl_grid", "must lie in (0, 1]");

    if (r.has("N")) {
        c.N = r.count("N");
        if (c.N < 2)
            r.fail("N", "must be at least 2");
    }
    if (r.has("N_list"))
        c.N_list = r.counts("N_list");

    switch (mode) {
    case Mode::run:
        if (!r.has("N"))
            r.fail("N", "is required for a single run");
        break;
    case Mode::converge:
        if (!r.has("N_list"))
            r.fail("N_list", "is required for a convergence study");
        require_increasing(r, "N_list", c.N_list, 3);
        break;
    case Mode::entropy:
        if (!r.has("N_list"))
            r.fail("N_list", "is required for the entropy suite");
        require_increasing(r, "N_list", c.N_list, 2);
        break;
    }

    if (r.has("reference_cells")) {
        c.reference_cells = r.count("reference_cells");
        if (c.reference_cells < 8 * c.max_N())
            r.fail("reference_cells", "must be at least 8 times the largest N");
    }

    if (r.has("entropy_ks")) {
        c.entropy_ks = r.numbers("entropy_ks");
        for (double k : c.entropy_ks)
            if (!(k >= 0.0 && k <= 1.0))
                r.fail("entropy_ks", "values must lie in [0, 1]");
    }
    if (r.has("phi")) {
        c.phis = parse_phis(doc, r);
        for (const auto& phi : c.phis) {
            if (!(phi.rt > 0.0 && phi.rz > 0.0))
                r.fail("phi", "radii must be positive");
            if (phi.t_min() < 0.0 || phi.t_max() > c.t_end)
                r.fail("phi", "time support must lie inside [0, t_end]");
        }
    }
    if (mode == Mode::entropy) {
        if (c.entropy_ks.empty())
            r.fail("entropy_ks", "must be a non-empty list for the entropy suite");
        if (c.phis.empty())
            r.fail("phi", "must be a non-empty list for the entropy suite");
    }
    if (r.has("output_dir"))
        c.output_dir = r.text("output_dir");
    return c;
}

ExperimentConfig load_config(const fs::path& path, Mode mode)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string source = buf.str();
    json doc;
    try {
        doc = json::parse(source);
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    try {
        return parse_config(doc, mode, source);
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

// ---------------------------------------------------------------------------
// Invariants

json InvariantReport::to_json() const
{
    json j;
    j["spacing_lower_bound"] = {{"worst_margin", spacing_bounds.worst_lower()}, {"tolerance", 1e-12}, {"pass", spacing_bounds.worst_lower() >= -1e-12}};
    j["spacing_upper_bound"] = {{"worst_margin", spacing_bounds.worst_upper()}, {"tolerance", 1e-8}, {"pass", spacing_bounds.worst_upper() >= -1e-8}};
    j["tv_density_non_increasing"] = {
        {"worst_increase", worst_tv_density_increase}, {"tolerance", 1e-8}, {"pass", worst_tv_density_increase <= 1e-8}};
    j["tv_velocity_non_increasing"] = {{"worst_increase", worst_tv_velocity_increase},
                                       {"tolerance", 1e-8},
                                       {"pass", worst_tv_velocity_increase <= 1e-8}};
    j["mass_conservation"] = {
        {"expected", expected_mass}, {"worst_error", worst_mass_error}, {"tolerance", 1e-10}, {"pass", mass_ok()}};
    j["l1_time_lipschitz"] = {{"constant", lipschitz_constant},
                              {"worst_excess", worst_lipschitz_excess},
                              {"tolerance", 1e-6},
                              {"pass", lipschitz_ok()}};
    j["clamp_events"] = clamp_events;
    j["times"] = times;
    j["tv_density"] = tv_density;
    j["tv_velocity"] = tv_velocity;
    j["mass"] = mass;
    return j;
}

InvariantReport check_invariants(const Trajectory& traj, const VelocityModel& model)
{
    InvariantReport r;
    r.spacing_bounds = check_spacing_bounds(traj, model);
    r.clamp_events = traj.clamp_events;
    if (traj.snapshots.empty())
        return r;

    const FtlState& first = traj.initial();
    r.expected_mass = static_cast<double>(first.cells()) * first.ell;
    r.lipschitz_constant = total_variation(density_field(first)) + velocity_variation(first, model);
    r.worst_lipschitz_excess = -std::numeric_limits<double>::infinity();

    StepFunction previous;
    for (std::size_t s = 0; s < traj.snapshots.size(); ++s) {
        const FtlState& state = traj.snapshots[s];
        StepFunction rho = density_field(state);
        r.times.push_back(state.t);
        r.tv_density.push_back(total_variation(rho));
        r.tv_velocity.push_back(velocity_variation(state, model));
        r.mass.push_back(mass(rho));
        r.worst_mass_error = std::max(r.worst_mass_error, std::abs(r.mass.back() - r.expected_mass));
        if (s > 0) {
            r.worst_tv_density_increase =
                std::max(r.worst_tv_density_increase, r.tv_density[s] - r.tv_density[s - 1]);
            r.worst_tv_velocity_increase =
                std::max(r.worst_tv_velocity_increase, r.tv_velocity[s] - r.tv_velocity[s - 1]);
            const double d = l1_distance(rho, previous);
            r.l1_step.push_back(d);
            const double dt = state.t - traj.snapshots[s - 1].t;
            r.worst_lipschitz_excess = std::max(r.worst_lipschitz_excess, d - dt * r.lipschitz_constant);
        }
        previous = std::move(rho);
    }
    if (r.l1_step.empty())
        r.worst_lipschitz_excess = 0.0;
    return r;
}

// ---------------------------------------------------------------------------
// Output helpers

namespace {

void ensure_dir(const fs::path& dir)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw std::runtime_error("cannot create output directory " + dir.string() + ": " + ec.message());
}

std::ofstream open_out(const fs::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    return out;
}

void write_json(const fs::path& path, const json& j)
{
    auto out = open_out(path);
    out << j.dump(2) << '\n';
}

void write_step_function(const fs::path& path, const StepFunction& f)
{
    auto out = open_out(path);
    out << "z_left,z_right,value\n";
    const auto& b = f.breakpoints();
    for (std::size_t j = 0; j < f.pieces(); ++j)
        out << format_number(b[j]) << ',' << format_number(b[j + 1]) << ',' << format_number(f.values()[j]) << '\n';
}

void write_trajectory(const fs::path& path, const Trajectory& traj, const VelocityModel& model)
{
    auto out = open_out(path);
    out << "t,i,z_left,z_right,y,rho,V\n";
    for (const FtlState& s : traj.snapshots) {
        const std::string t = format_number(s.t);
        const std::size_t n = s.vehicles();
        for (std::size_t i = 1; i < n; ++i) {
            const double y = s.spacing(i);
            out << t << ',' << i << ',' << format_number(s.positions[i - 1]) << ','
                << format_number(s.positions[i]) << ',' << format_number(y) << ',' << format_number(1.0 / y) << ','
                << format_number(model.V_of_y(y)) << '\n';
        }
        // Leader: y_N = inf, rho_N = 0, V_N = 1.
        out << t << ',' << n << ',' << format_number(s.positions[n - 1]) << ",inf,inf,0,1\n";
    }
}

void write_grid(const fs::path& path, const GridSolution& grid, std::size_t snapshot)
{
    auto out = open_out(path);
    out << "t,x_center,rho\n";
    const auto& snap = grid.snapshots.at(snapshot);
    const std::string t = format_number(snap.t);
    for (std::size_t j = 0; j < grid.cells; ++j)
        out << t << ',' << format_number(grid.x_center(j)) << ',' << format_number(snap.averages[j]) << '\n';
}

json config_summary(const ExperimentConfig& c)
{
    json j;
    j["model"] = c.model;
    j["initial"] = c.initial_label;
    j["t_end"] = c.t_end;
    j["output_times"] = c.output_times;
    j["cfl_particle"] = c.cfl_particle;
    if (c.N)
        j["N"] = c.N;
    if (!c.N_list.empty())
        j["N_list"] = c.N_list;
    return j;
}

// Snapshot recorded exactly at time t.
const FtlState& snapshot_at(const Trajectory& traj, double t)
{
    for (const FtlState& s : traj.snapshots)
        if (s.t == t)
            return s;
    throw std::logic_error("no snapshot at t = " + format_number(t));
}

// Runs body(j) for every j in [0, n) on the OpenMP pool; rethrows the first failure.
template <class Body>
void parallel_for_each_index(std::size_t n, Body&& body)
{
    std::exception_ptr error;
    const auto count = static_cast<long>(n);
#pragma omp parallel for schedule(dynamic)
    for (long j = 0; j < count; ++j) {
        try {
            body(static_cast<std::size_t>(j));
        } catch (...) {
#pragma omp critical(ftl2lwr_harness_error)
            if (!error)
                error = std::current_exception();
        }
    }
    if (error)
        std::rethrow_exception(error);
}

// Uniform grid of `count` times on (0, t_end], merged with the output times.
std::vector<double> with_dense_times(const std::vector<double>& output_times, double t_end, std::size_t count)
{
    std::vector<double> times = output_times;
    for (std::size_t j = 1; j <= count; ++j)
        times.push_back(j == count ? t_end : t_end * static_cast<double>(j) / static_cast<double>(count));
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());
    return times;
}

double worst_residual(const Trajectory& traj, const VelocityModel& model, const ExperimentConfig& c)
{
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& phi : c.phis)
        for (double r : kruzkov_residuals(traj, model, c.entropy_ks, phi))
            worst = std::min(worst, r);
    return worst;
}

} // namespace

// ---------------------------------------------------------------------------
// Single run

Outcome run_single(const ExperimentConfig& c, const fs::path& out_dir)
{
    const VelocityModel model = model_by_name(c.model);
    const InitialLayout layout = initial_positions(c.density, c.N);
    const Trajectory traj = simulate(layout, model, c.t_end, c.output_times, c.cfl_particle);
    const InvariantReport inv = check_invariants(traj, model);

    ensure_dir(out_dir);
    write_trajectory(out_dir / "trajectory.csv", traj, model);
    for (const FtlState& s : traj.snapshots)
        write_step_function(out_dir / ("fields_t" + format_number(s.t) + ".csv"), density_field(s));

    Outcome o;
    o.code = inv.all_pass() ? ExitCode::ok : ExitCode::invariant;
    o.report["mode"] = "run";
    o.report["config"] = config_summary(c);
    o.report["ell"] = layout.ell;
    o.report["steps"] = traj.step_count;
    o.report["dt"] = traj.dt_used;
    o.report["invariants"] = inv.to_json();
    o.report["pass"] = inv.all_pass();
    o.report["exit_code"] = static_cast<int>(o.code);
    write_json(out_dir / "report.json", o.report);
    return o;
}

// ---------------------------------------------------------------------------
// Convergence study

std::vector<ConvergenceRow> ConvergenceReport::at_time(double t) const
{
    std::vector<ConvergenceRow> out;
    for (const auto& row : rows)
        if (row.t == t)
            out.push_back(row);
    return out;
}

ConvergenceReport convergence_study(const ExperimentConfig& c)
{
    const VelocityModel model = model_by_name(c.model);
    const std::size_t ref_cells = c.effective_reference_cells();
    std::vector<double> times = c.output_times;

    ConvergenceReport report;
    const bool exact = c.riemann_preset && c.model == "greenshields" &&
                       times.back() <= greenshields_interaction_time(c.density);

    // Reference on the grid the Godunov solver would use.
    if (exact) {
        report.reference = "riemann_exact";
        GridSolution g = empty_grid(c.density, model, ref_cells, c.t_end, c.cfl_grid);
        for (double t : times) {
            GridSnapshot snap{t, std::vector<double>(ref_cells)};
            const PiecewiseLinear solution = t > 0.0 ? greenshields_exact(c.density, t) : PiecewiseLinear();
            for (std::size_t j = 0; j < ref_cells; ++j) {
                const double x = g.x_center(j);
                snap.averages[j] = t > 0.0 ? solution(x) : c.density.profile()(x);
            }
            g.snapshots.push_back(std::move(snap));
        }
        report.reference_grid = std::move(g);
    } else {
        report.reference = "godunov";
        GridSolution g = godunov_solve(c.density, model, ref_cells, c.t_end, times, c.cfl_grid);
        // Keep only the requested times (godunov_solve also records t = 0 and t_end).
        std::vector<GridSnapshot> kept;
        for (double t : times)
            for (const auto& s : g.snapshots)
                if (s.t == t) {
                    kept.push_back(s);
                    break;
                }
        g.snapshots = std::move(kept);
        report.reference_grid = std::move(g);
    }

    const auto reference_error = [&](const StepFunction& rho, std::size_t ti) {
        const double t = times[ti];
        if (!exact)
            return l1_distance(rho, report.reference_grid.field(ti));
        if (t == 0.0)
            return l1_distance(rho, c.density.profile());
        return l1_distance(rho, greenshields_exact(c.density, t));
    };

    const bool with_entropy = !c.phis.empty() && !c.entropy_ks.empty();
    const std::vector<double> sim_times = with_entropy ? with_dense_times(times, c.t_end, 256) : times;

    std::vector<std::vector<ConvergenceRow>> per_n(c.N_list.size());
    parallel_for_each_index(c.N_list.size(), [&](std::size_t n) {
        const std::size_t N = c.N_list[n];
        const InitialLayout layout = initial_positions(c.density, N);
        const Trajectory traj = simulate(layout, model, c.t_end, sim_times, c.cfl_particle);
        const double residual = with_entropy ? worst_residual(traj, model, c) : std::nan("");
        for (std::size_t ti = 0; ti < times.size(); ++ti) {
            const FtlState& s = snapshot_at(traj, times[ti]);
            const StepFunction rho = density_field(s);
            ConvergenceRow row;
            row.N = N;
            row.ell = layout.ell;
            row.t = times[ti];
            row.l1_error = reference_error(rho, ti);
            row.tv_density = total_variation(rho);
            double margin = std::numeric_limits<double>::infinity();
            for (std::size_t i = 1; i < s.vehicles(); ++i)
                margin = std::min(margin, s.spacing(i) - 1.0);
            row.min_spacing_margin = margin;
            row.worst_entropy_residual = residual;
            row.order = std::nan("");
            per_n[n].push_back(row);
        }
    });

    report.strictly_decreasing = true;
    for (std::size_t ti = 0; ti < times.size(); ++ti) {
        for (std::size_t n = 0; n < per_n.size(); ++n) {
            ConvergenceRow row = per_n[n][ti];
            if (n > 0) {
                const ConvergenceRow& prev = per_n[n - 1][ti];
                row.order = std::log(prev.l1_error / row.l1_error) / std::log(prev.ell / row.ell);
                if (!(row.l1_error < prev.l1_error))
                    report.strictly_decreasing = false;
            }
            report.rows.push_back(row);
        }
    }
    return report;
}

Outcome run_convergence(const ExperimentConfig& c, const fs::path& out_dir)
{
    return write_convergence(c, convergence_study(c), out_dir);
}

Outcome write_convergence(const ExperimentConfig& c, const ConvergenceReport& rep, const fs::path& out_dir)
{
    ensure_dir(out_dir);
    {
        auto out = open_out(out_dir / "convergence.csv");
        out << "N,ell,t,l1_error,tv_rho,min_spacing_margin,worst_entropy_residual,order\n";
        for (const auto& r : rep.rows)
            out << r.N << ',' << format_number(r.ell) << ',' << format_number(r.t) << ','
                << format_number(r.l1_error) << ',' << format_number(r.tv_density) << ','
                << format_number(r.min_spacing_margin) << ',' << format_number(r.worst_entropy_residual) << ','
                << format_number(r.order) << '\n';
    }
    for (std::size_t ti = 0; ti < rep.reference_grid.snapshots.size(); ++ti)
        write_grid(out_dir / ("reference_t" + format_number(rep.reference_grid.snapshots[ti].t) + ".csv"),
                   rep.reference_grid, ti);

    Outcome o;
    o.code = rep.strictly_decreasing ? ExitCode::ok : ExitCode::convergence;
    o.report["mode"] = "converge";
    o.report["config"] = config_summary(c);
    o.report["reference"] = rep.reference;
    o.report["reference_cells"] = rep.reference_grid.cells;
    json per_time = json::array();
    for (double t : c.output_times) {
        json entry;
        entry["t"] = t;
        json errors = json::array(), orders = json::array();
        bool decreasing = true;
        const auto rows = rep.at_time(t);
        for (std::size_t n = 0; n < rows.size(); ++n) {
            errors.push_back(rows[n].l1_error);
            if (n > 0) {
                orders.push_back(rows[n].order);
                decreasing = decreasing && rows[n].l1_error < rows[n - 1].l1_error;
            }
        }
        entry["l1_errors"] = errors;
        entry["orders"] = orders;
        entry["strictly_decreasing"] = decreasing;
        per_time.push_back(entry);
    }
    o.report["times"] = per_time;
    o.report["pass"] = rep.strictly_decreasing;
    o.report["exit_code"] = static_cast<int>(o.code);
    write_json(out_dir / "report.json", o.report);
    return o;
}

// ---------------------------------------------------------------------------
// Entropy suite

EntropyReport entropy_study(const ExperimentConfig& c)
{
    const VelocityModel model = model_by_name(c.model);
    const std::size_t nk = c.entropy_ks.size(), nphi = c.phis.size(), nn = c.N_list.size();

    // residual[n][p][k]
    std::vector<std::vector<std::vector<double>>> residual(nn);
    parallel_for_each_index(nn, [&](std::size_t n) {
        const InitialLayout layout = initial_positions(c.density, c.N_list[n]);
        const Trajectory traj = simulate(layout, model, c.t_end, c.output_times, c.cfl_particle);
        for (const auto& phi : c.phis)
            residual[n].push_back(kruzkov_residuals(traj, model, c.entropy_ks, phi));
    });

    EntropyReport rep;
    rep.negative_part_non_increasing = true;
    for (std::size_t p = 0; p < nphi; ++p) {
        for (std::size_t k = 0; k < nk; ++k) {
            double previous = std::numeric_limits<double>::infinity();
            for (std::size_t n = 0; n < nn; ++n) {
                const double r = residual[n][p][k];
                rep.rows.push_back({c.N_list[n], 1.0 / static_cast<double>(c.N_list[n] + 1), c.entropy_ks[k],
                                    c.phis[p], r});
                double negative = std::max(0.0, -r);
                if (negative < kEntropyNoiseFloor)
                    negative = 0.0;
                if (negative > previous)
                    rep.negative_part_non_increasing = false;
                previous = negative;
            }
        }
    }
    return rep;
}

Outcome run_entropy_suite(const ExperimentConfig& c, const fs::path& out_dir)
{
    const EntropyReport rep = entropy_study(c);
    ensure_dir(out_dir);
    {
        auto out = open_out(out_dir / "entropy.csv");
        out << "N,ell,k,phi_center_t,phi_center_z,residual\n";
        for (const auto& r : rep.rows)
            out << r.N << ',' << format_number(r.ell) << ',' << format_number(r.k) << ','
                << format_number(r.phi.t0) << ',' << format_number(r.phi.z0) << ',' << format_number(r.residual)
                << '\n';
    }

    Outcome o;
    o.code = rep.negative_part_non_increasing ? ExitCode::ok : ExitCode::convergence;
    o.report["mode"] = "entropy";
    o.report["config"] = config_summary(c);
    o.report["noise_floor"] = kEntropyNoiseFloor;
    json rows = json::array();
    for (const auto& r : rep.rows)
        rows.push_back({{"N", r.N},
                        {"k", r.k},
                        {"phi", {{"t0", r.phi.t0}, {"z0", r.phi.z0}, {"rt", r.phi.rt}, {"rz", r.phi.rz}}},
                        {"residual", r.residual}});
    o.report["residuals"] = rows;
    o.report["pass"] = rep.negative_part_non_increasing;
    o.report["exit_code"] = static_cast<int>(o.code);
    write_json(out_dir / "report.json", o.report);
    return o;
}

} // namespace ftl2lwr
