#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "knd/errors.hpp"
#include "knd/harness.hpp"
#include "knd/scenario.hpp"

int main(int argc, char** argv) {
    CLI::App app{"desk-scale simulator for topology-aware device allocation"};
    app.require_subcommand(1);

    std::string run_scenario;
    std::uint64_t seed = 0;
    std::uint64_t replications = 0;
    std::string out_dir;
    CLI::App* run_cmd = app.add_subcommand("run", "run a scenario and print its report");
    run_cmd->add_option("scenario", run_scenario, "scenario json file")->required();
    CLI::Option* seed_opt = run_cmd->add_option("--seed", seed, "override the scenario seed");
    CLI::Option* reps_opt =
        run_cmd->add_option("--replications", replications, "override the replication count");
    CLI::Option* out_opt =
        run_cmd->add_option("--out", out_dir, "directory to write the csv report into");

    std::string dir_a;
    std::string dir_b;
    CLI::App* compare_cmd =
        app.add_subcommand("compare", "compare two emitted report directories");
    compare_cmd->add_option("report_a", dir_a, "first report directory")->required();
    compare_cmd->add_option("report_b", dir_b, "baseline report directory")->required();

    std::string validate_scenario;
    CLI::App* validate_cmd = app.add_subcommand("validate", "check a scenario file");
    validate_cmd->add_option("scenario", validate_scenario, "scenario json file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1; // a bad command line is a validation failure
    }

    try {
        if (run_cmd->parsed()) {
            knd::Scenario scenario = knd::load_scenario(run_scenario);
            if (seed_opt->count() > 0) {
                scenario.seed = seed;
            }
            if (reps_opt->count() > 0) {
                if (replications < 1) {
                    throw knd::ValidationError("--replications must be >= 1");
                }
                scenario.replications = static_cast<std::size_t>(replications);
            }
            const knd::RunReport report = knd::run(scenario);
            if (out_opt->count() > 0) {
                knd::emit_csv(report, out_dir);
            }
            std::cout << knd::render_report(report);
        } else if (compare_cmd->parsed()) {
            const knd::RunReport a = knd::load_report_csv(dir_a);
            const knd::RunReport b = knd::load_report_csv(dir_b);
            std::cout << knd::render_comparison(knd::compare(a, b));
        } else {
            knd::load_scenario(validate_scenario);
            std::cout << "ok\n";
        }
    } catch (const knd::ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
