#include "hems/cli.hpp"

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "hems/config.hpp"
#include "hems/errors.hpp"
#include "hems/reports.hpp"

namespace hems {

namespace fs = std::filesystem;

namespace {

std::string profile_tag(const std::string& spec) {
    if (spec == "none" || spec.empty()) return "none";
    return fs::path(spec).stem().string();
}

SolveSettings settings_from(const RunManifest& m) {
    SolveSettings s;
    s.moea.population_size = m.population;
    s.moea.max_iterations = m.iterations;
    s.horizon = m.horizon;
    s.laguerre_order = m.laguerre_order;
    s.laguerre_pole = m.laguerre_pole;
    s.penalty_weight = m.penalty_weight;
    return s;
}

SolverKind parse_solver_or_throw(const std::string& name) {
    const auto kind = parse_solver(name);
    if (!kind)
        throw ValidationError("unknown solver '" + name + "' (expected proposed, penalty or cdom)");
    return *kind;
}

int worker_count(size_t jobs) {
    if (const char* env = std::getenv("HEMS_WORKERS")) {
        const int n = std::atoi(env);
        if (n >= 1) return static_cast<int>(std::min<size_t>(n, jobs));
    }
    return 1;
}

void write_file(const fs::path& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write file: " + path.string());
    out << contents;
}

}  // namespace

int cmd_validate(const RunManifest& manifest) {
    try {
        const Scenario sc = load_scenario(manifest.scenario_path, manifest.series_path);
        for (const auto& spec : manifest.error_profiles) load_error_profile(spec);
        for (const auto& name : manifest.solvers) parse_solver_or_throw(name);

        std::cout << "scenario ok: " << manifest.scenario_path << "\n"
                  << "  slots: " << sc.grid.slot_count << " x " << sc.grid.slot_duration_hours
                  << " h (slot 1 = " << sc.grid.origin_label << ")\n"
                  << "  appliances: " << sc.inflexible.size() << " inflexible, "
                  << sc.time_flexible.size() << " time-flexible, " << sc.power_flexible.size()
                  << " power-flexible\n"
                  << "  battery: per-slot retention " << format_number(sc.battery.leakage_per_slot)
                  << ", rate " << format_number(sc.battery.max_rate) << " kW, capacity ["
                  << format_number(sc.battery.capacity_min) << ", "
                  << format_number(sc.battery.capacity_max) << "] kWh, initial "
                  << format_number(sc.battery.initial_energy) << " kWh\n"
                  << "  tariff: feed-in " << format_number(sc.tariff.feed_in_rate)
                  << ", market price in [" << format_number(*std::min_element(
                         sc.tariff.market_price.begin(), sc.tariff.market_price.end()))
                  << ", " << format_number(*std::max_element(sc.tariff.market_price.begin(),
                                                             sc.tariff.market_price.end()))
                  << "]\n"
                  << "  laguerre: pole " << format_number(manifest.laguerre_pole) << ", order "
                  << manifest.laguerre_order << ", horizon " << manifest.horizon << "\n";
        return kExitOk;
    } catch (const ValidationError& e) {
        std::cerr << e.what() << '\n';
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << e.what() << '\n';
        return kExitRuntime;
    }
}

int cmd_solve(const RunManifest& manifest) {
    try {
        const Scenario sc = load_scenario(manifest.scenario_path, manifest.series_path);
        const SolveSettings settings = settings_from(manifest);
        const SolverKind solver = parse_solver_or_throw(manifest.solvers.front());
        const ErrorProfile profile = load_error_profile(manifest.error_profiles.front());
        const std::uint64_t seed = manifest.seeds.front();
        const int t_now = manifest.slot;
        if (t_now < 1 || t_now > sc.grid.slot_count)
            throw ValidationError("--slot outside the grid");

        const int flex = static_cast<int>(sc.power_flexible.size());
        const LaguerreBasis basis =
            build_basis(settings.laguerre_pole, settings.laguerre_order,
                        std::min(settings.horizon, sc.grid.slot_count));
        const int horizon = std::min(basis.horizon, sc.grid.slot_count - t_now + 1);

        const RandomStream base(seed);
        auto forecast_rng = base.fork("forecast", static_cast<std::uint64_t>(t_now));
        const ForecastBundle forecast = make_forecast(sc, t_now, horizon, profile, forecast_rng);
        const std::vector<std::optional<int>> committed(sc.time_flexible.size());
        const auto bounds = admissible_starts(sc, t_now, committed);
        auto solver_rng = base.fork(solver_name(solver), static_cast<std::uint64_t>(t_now));

        fs::create_directories(manifest.out_dir);

        std::vector<ObjectivePair> front;
        ConvergenceLog log;
        if (solver == SolverKind::Proposed) {
            const StateSpaceModel model =
                make_state_space(sc.battery.leakage_per_slot, sc.grid.slot_duration_hours, flex);
            const PredictionOperators ops = build_prediction(basis, model);
            const FeasibleSet set = build_feasible_set(
                sc, basis, ops, Eigen::Vector2d(sc.battery.initial_energy, 0.0), t_now);
            if (!manifest.dump_constraints.empty()) {
                std::ofstream dump(manifest.dump_constraints, std::ios::binary);
                if (!dump)
                    throw ValidationError("cannot write file: " + manifest.dump_constraints);
                write_feasible_set_csv(set, dump);
            }
            EvolveResult res =
                evolve(sc, set, forecast, basis, settings.moea, bounds, t_now, solver_rng);
            for (const auto& c : res.front) front.push_back(c.pair());
            log = std::move(res.log);
        } else {
            BaselineConfig config;
            config.moea = settings.moea;
            config.penalty_weight = settings.penalty_weight;
            const BaselineKind kind = solver == SolverKind::Penalty
                                          ? BaselineKind::Penalty
                                          : BaselineKind::ConstraintDominated;
            BaselineResult res =
                solve_baseline(kind, sc, forecast, config, bounds, t_now, solver_rng);
            if (res.empty_front)
                std::cerr << "note: no feasible front member after filtering\n";
            for (const auto& c : res.front) front.push_back(c.pair());
            log = std::move(res.log);
        }

        const int knee = front.empty() ? -1 : select_knee(front);
        {
            std::ostringstream os;
            write_pareto_csv(os, front, knee);
            write_file(fs::path(manifest.out_dir) / "pareto.csv", os.str());
        }
        {
            std::ostringstream os;
            write_convergence_csv(os, solver_name(solver), {{t_now, &log}});
            write_file(fs::path(manifest.out_dir) / "convergence.csv", os.str());
        }
        std::cout << "front size " << front.size() << ", outputs in " << manifest.out_dir << '\n';
        return kExitOk;
    } catch (const ValidationError& e) {
        std::cerr << e.what() << '\n';
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << e.what() << '\n';
        return kExitRuntime;
    }
}

namespace {

struct RunSpec {
    SolverKind solver;
    std::string profile_spec;
    std::string tag;
    std::uint64_t seed;
};

void write_run_outputs(const fs::path& dir, const Scenario& sc, SolverKind solver,
                       const SimulationTrace& trace) {
    fs::create_directories(dir);
    {
        std::ostringstream os;
        write_schedule_csv(os, sc, trace);
        write_file(dir / "schedule.csv", os.str());
    }
    std::vector<ConvergenceRow> rows;
    rows.reserve(trace.solves.size());
    for (const auto& solve : trace.solves) {
        std::ostringstream os;
        write_pareto_csv(os, solve.front, solve.knee);
        char name[32];
        std::snprintf(name, sizeof(name), "pareto_%03d.csv", solve.slot);
        write_file(dir / name, os.str());
        rows.push_back({solve.slot, &solve.log});
    }
    std::ostringstream os;
    write_convergence_csv(os, solver_name(solver), rows);
    write_file(dir / "convergence.csv", os.str());
}

}  // namespace

int cmd_simulate(const RunManifest& manifest) {
    try {
        const Scenario sc = load_scenario(manifest.scenario_path, manifest.series_path);
        const SolveSettings settings = settings_from(manifest);
        if (manifest.seeds.empty()) throw ValidationError("at least one --seed required");

        std::vector<RunSpec> specs;
        for (const auto& solver_label : manifest.solvers) {
            const SolverKind solver = parse_solver_or_throw(solver_label);
            for (const auto& profile_spec : manifest.error_profiles) {
                load_error_profile(profile_spec);  // validate early
                for (const auto seed : manifest.seeds)
                    specs.push_back({solver, profile_spec, profile_tag(profile_spec), seed});
            }
        }
        for (size_t i = 0; i < specs.size(); ++i)
            for (size_t j = i + 1; j < specs.size(); ++j)
                if (specs[i].solver == specs[j].solver && specs[i].seed == specs[j].seed &&
                    specs[i].tag == specs[j].tag)
                    throw ValidationError("duplicate run: distinct error profiles share tag '" +
                                          specs[i].tag + "'");

        std::vector<SimulationTrace> traces(specs.size());
        std::atomic<size_t> next{0};
        std::mutex io_mutex;
        std::string failure;

        auto work = [&]() {
            for (;;) {
                const size_t i = next.fetch_add(1);
                if (i >= specs.size()) return;
                const auto& spec = specs[i];
                try {
                    const ErrorProfile profile = load_error_profile(spec.profile_spec);
                    const RandomStream run_rng =
                        RandomStream(spec.seed).fork("simulate", spec.seed);
                    SimulationTrace trace =
                        run_mpc_day(sc, spec.solver, settings, profile, run_rng);
                    std::ostringstream dir_name;
                    dir_name << solver_name(spec.solver) << '_' << spec.tag << "_s" << spec.seed;
                    write_run_outputs(fs::path(manifest.out_dir) / dir_name.str(), sc, spec.solver,
                                      trace);
                    std::lock_guard<std::mutex> lock(io_mutex);
                    std::cout << dir_name.str() << ": cost " << format_number(trace.total_cost)
                              << ", dissatisfaction " << format_number(trace.total_dissatisfaction)
                              << '\n';
                    traces[i] = std::move(trace);
                } catch (const std::exception& e) {
                    std::lock_guard<std::mutex> lock(io_mutex);
                    if (failure.empty()) failure = e.what();
                }
            }
        };

        const int workers = worker_count(specs.size());
        if (workers <= 1) {
            work();
        } else {
            std::vector<std::thread> pool;
            for (int w = 0; w < workers; ++w) pool.emplace_back(work);
            for (auto& th : pool) th.join();
        }
        if (!failure.empty()) throw SolverFailure(failure);

        nlohmann::json summary;
        summary["runs"] = nlohmann::json::array();
        for (size_t i = 0; i < specs.size(); ++i) {
            nlohmann::json run;
            run["solver"] = solver_name(specs[i].solver);
            run["profile"] = specs[i].tag;
            run["seed"] = specs[i].seed;
            run["total_cost"] = traces[i].total_cost;
            run["total_dissatisfaction"] = traces[i].total_dissatisfaction;
            run["committed_starts"] = traces[i].committed_starts;
            run["wall_seconds"] = traces[i].wall_seconds;
            summary["runs"].push_back(run);
        }
        summary["degradation"] = nlohmann::json::array();
        for (size_t i = 0; i < specs.size(); ++i) {
            if (specs[i].tag == "none") continue;
            for (size_t j = 0; j < specs.size(); ++j) {
                if (specs[j].tag != "none" || specs[j].solver != specs[i].solver ||
                    specs[j].seed != specs[i].seed)
                    continue;
                nlohmann::json entry;
                entry["solver"] = solver_name(specs[i].solver);
                entry["profile"] = specs[i].tag;
                entry["seed"] = specs[i].seed;
                entry["percent"] = degradation_percent(traces[i], traces[j]);
                summary["degradation"].push_back(entry);
            }
        }
        fs::create_directories(manifest.out_dir);
        write_file(fs::path(manifest.out_dir) / "summary.json", summary.dump(2) + "\n");
        return kExitOk;
    } catch (const ValidationError& e) {
        std::cerr << e.what() << '\n';
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << e.what() << '\n';
        return kExitRuntime;
    }
}

}  // namespace hems
