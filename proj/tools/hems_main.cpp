#include <CLI11.hpp>

#include "hems/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Home energy management: multiobjective MPC solver and day simulator"};
    app.require_subcommand(1);

    hems::RunManifest manifest;

    auto add_common = [&](CLI::App* cmd, bool needs_files) {
        auto* scenario = cmd->add_option("--scenario", manifest.scenario_path,
                                         "Scenario file (JSON key-value document)");
        auto* series = cmd->add_option("--series", manifest.series_path,
                                       "Exogenous series CSV (slot,price,solar,load)");
        if (needs_files) {
            scenario->required();
            series->required();
        }
        cmd->add_option("--solver", manifest.solvers, "Solver: proposed, penalty or cdom")
            ->capture_default_str();
        cmd->add_option("--seed", manifest.seeds, "Run seed, repeatable")->capture_default_str();
        cmd->add_option("--pop", manifest.population, "Population size")->capture_default_str();
        cmd->add_option("--iters", manifest.iterations, "Generations per solve")
            ->capture_default_str();
        cmd->add_option("--horizon", manifest.horizon, "Prediction horizon M")
            ->capture_default_str();
        cmd->add_option("--laguerre-order", manifest.laguerre_order, "Laguerre order J")
            ->capture_default_str();
        cmd->add_option("--laguerre-pole", manifest.laguerre_pole, "Laguerre pole p in [0,1)")
            ->capture_default_str();
        cmd->add_option("--penalty-weight", manifest.penalty_weight,
                        "Violation weight for the penalty baseline")
            ->capture_default_str();
        cmd->add_option("--error-profile", manifest.error_profiles,
                        "Forecast error profile: 'none' or a JSON path, repeatable")
            ->capture_default_str();
        cmd->add_option("--out", manifest.out_dir, "Output directory")->capture_default_str();
    };

    auto* validate = app.add_subcommand("validate", "Parse and invariant-check inputs");
    add_common(validate, true);

    auto* solve = app.add_subcommand("solve", "One multiobjective solve at a slot");
    add_common(solve, true);
    solve->add_option("--slot", manifest.slot, "Slot to solve at (1-based)")
        ->capture_default_str();
    solve->add_option("--dump-constraints", manifest.dump_constraints,
                      "Also write the stacked constraint system as CSV");

    auto* simulate = app.add_subcommand("simulate", "Receding-horizon day simulation");
    add_common(simulate, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? hems::kExitOk : hems::kExitValidation;
    }

    if (validate->parsed()) return hems::cmd_validate(manifest);
    if (solve->parsed()) return hems::cmd_solve(manifest);
    if (simulate->parsed()) return hems::cmd_simulate(manifest);
    return hems::kExitValidation;
}
