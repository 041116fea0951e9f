#include <iomanip>
#include <iostream>

#include "CLI11.hpp"

#include "ftl2lwr/harness.hpp"

namespace ftl2lwr {

namespace {

void print_summary(Mode mode, const Outcome& o)
{
    const auto& r = o.report;
    switch (mode) {
    case Mode::run:
        for (const auto& [name, entry] : r.at("invariants").items())
            if (entry.is_object() && entry.contains("pass"))
                std::cout << std::left << std::setw(28) << name << (entry.at("pass").get<bool>() ? "pass" : "FAIL")
                          << '\n';
        break;
    case Mode::converge:
        std::cout << "reference: " << r.at("reference").get<std::string>() << '\n';
        for (const auto& entry : r.at("times")) {
            std::cout << "t = " << format_number(entry.at("t").get<double>()) << "  errors:";
            for (const auto& e : entry.at("l1_errors"))
                std::cout << ' ' << format_number(e.get<double>());
            std::cout << (entry.at("strictly_decreasing").get<bool>() ? "  decreasing" : "  NOT decreasing") << '\n';
        }
        break;
    case Mode::entropy:
        for (const auto& row : r.at("residuals"))
            std::cout << "N=" << row.at("N").get<std::size_t>() << " k=" << format_number(row.at("k").get<double>())
                      << " residual=" << format_number(row.at("residual").get<double>()) << '\n';
        break;
    }
    std::cout << (r.at("pass").get<bool>() ? "PASS" : "FAIL") << " (exit " << static_cast<int>(o.code) << ")\n";
}

} // namespace

int run_cli(int argc, char** argv)
{
    CLI::App app{"Follow-the-Leader traffic simulation and its LWR continuum limit"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    bool quiet = false;
    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", out_dir, "output directory")->required();
        sub->add_flag("--quiet", quiet, "suppress the summary");
    };
    CLI::App* run = app.add_subcommand("run", "single simulation with invariant checks");
    CLI::App* converge = app.add_subcommand("converge", "L1 convergence study against a reference solution");
    CLI::App* entropy = app.add_subcommand("entropy", "Kruzkov entropy residual suite");
    add_common(run);
    add_common(converge);
    add_common(entropy);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : static_cast<int>(ExitCode::config);
    }

    const Mode mode = run->parsed() ? Mode::run : converge->parsed() ? Mode::converge : Mode::entropy;
    try {
        const ExperimentConfig config = load_config(config_path, mode);
        Outcome o;
        switch (mode) {
        case Mode::run:
            o = run_single(config, out_dir);
            break;
        case Mode::converge:
            o = run_convergence(config, out_dir);
            break;
        case Mode::entropy:
            o = run_entropy_suite(config, out_dir);
            break;
        }
        if (!quiet)
            print_summary(mode, o);
        return static_cast<int>(o.code);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return static_cast<int>(ExitCode::config);
    } catch (const std::invalid_argument& e) {
        // Inputs the parser accepted but a stage rejected (e.g. too few snapshots
        // inside a test function support).
        std::cerr << "config error: " << e.what() << '\n';
        return static_cast<int>(ExitCode::config);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}

} // namespace ftl2lwr
