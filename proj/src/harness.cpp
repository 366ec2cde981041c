#include "hems/harness.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "hems/errors.hpp"

namespace hems {

ForecastBundle make_forecast(const Scenario& sc, int t_now, int horizon,
                             const ErrorProfile& profile, RandomStream& rng) {
    if (t_now < 1 || horizon < 1 || t_now + horizon - 1 > sc.grid.slot_count)
        throw std::out_of_range("make_forecast: horizon extends past the grid");

    auto corrupt = [&](const std::vector<double>& truth, const SeriesErrorSpec& spec,
                       bool clamp_zero) {
        std::vector<double> series(horizon);
        for (int m = 0; m < horizon; ++m) {
            const double value = truth[t_now - 1 + m];
            if (m == 0) {
                series[m] = value;  // current slot observed exactly
                continue;
            }
            const double bound = spec.bound(m);
            const double err = bound > 0.0 ? rng.uniform(-bound, bound) : 0.0;
            series[m] = value * (1.0 + err);
            if (clamp_zero && series[m] < 0.0) series[m] = 0.0;
        }
        return series;
    };

    ForecastBundle forecast;
    forecast.price = corrupt(sc.tariff.market_price, profile.price, true);
    forecast.renewable = corrupt(sc.renewable_true, profile.renewable, true);
    forecast.inflexible_load = corrupt(sc.inflexible_true, profile.load, false);
    return forecast;
}

const char* solver_name(SolverKind kind) {
    switch (kind) {
        case SolverKind::Proposed: return "proposed";
        case SolverKind::Penalty: return "penalty";
        case SolverKind::ConstraintDominated: return "cdom";
    }
    return "unknown";
}

std::optional<SolverKind> parse_solver(const std::string& name) {
    if (name == "proposed") return SolverKind::Proposed;
    if (name == "penalty") return SolverKind::Penalty;
    if (name == "cdom") return SolverKind::ConstraintDominated;
    return std::nullopt;
}

SimulationTrace run_mpc_day(const Scenario& sc, SolverKind solver, const SolveSettings& settings,
                            const ErrorProfile& profile, const RandomStream& run_rng) {
    validate_or_throw(sc);
    const auto started = std::chrono::steady_clock::now();

    const int slot_count = sc.grid.slot_count;
    const int flex = static_cast<int>(sc.power_flexible.size());
    const double dt = sc.grid.slot_duration_hours;

    const LaguerreBasis basis =
        build_basis(settings.laguerre_pole, settings.laguerre_order,
                    std::min(settings.horizon, slot_count));
    const StateSpaceModel model = make_state_space(sc.battery.leakage_per_slot, dt, flex);
    const PredictionOperators ops = build_prediction(basis, model);

    SimulationTrace trace;
    std::vector<std::optional<int>> committed(sc.time_flexible.size());
    double energy = sc.battery.initial_energy;

    for (int t = 1; t <= slot_count; ++t) {
        const int horizon = std::min(basis.horizon, slot_count - t + 1);
        auto forecast_rng = run_rng.fork("forecast", static_cast<std::uint64_t>(t));
        const ForecastBundle forecast = make_forecast(sc, t, horizon, profile, forecast_rng);
        const auto bounds = admissible_starts(sc, t, committed);
        auto solver_rng = run_rng.fork(solver_name(solver), static_cast<std::uint64_t>(t));

        double u_battery = 0.0;
        std::vector<double> u_flexible(flex, 0.0);  // absolute kW where active
        std::vector<int> knee_starts;
        SolveSnapshot snapshot;
        snapshot.slot = t;

        if (solver == SolverKind::Proposed) {
            // Sustain floors: E(tau) must stay rich enough that coasting
            // (eta = 0) through the rest of the day never dips below the
            // capacity floor, which keeps every reachable state feasible for
            // the next solve's zero anchor.
            std::vector<double> floors(horizon);
            for (int m = 0; m < horizon; ++m) {
                const int tau = t + m + 1;
                floors[m] = sc.battery.capacity_min /
                            std::pow(sc.battery.leakage_per_slot, slot_count + 1 - tau);
            }
            const FeasibleSet set =
                build_feasible_set(sc, basis, ops, Eigen::Vector2d(energy, 0.0), t, floors);
            EvolveResult res =
                evolve(sc, set, forecast, basis, settings.moea, bounds, t, solver_rng);
            if (res.feasibility_failures > 0)
                throw SolverFailure("slot " + std::to_string(t) +
                                    ": operators produced infeasible chromosomes");
            if (res.front.empty())
                throw SolverFailure("slot " + std::to_string(t) + ": empty Pareto front");
            std::vector<ObjectivePair> pairs;
            pairs.reserve(res.front.size());
            for (const auto& c : res.front) pairs.push_back(c.pair());
            const int knee = select_knee(pairs);
            const auto& plan = res.front[knee];
            const Eigen::MatrixXd controls = reconstruct_controls(basis, plan.eta, flex);
            u_battery = controls(0, 0);
            for (int c = 0; c < flex; ++c)
                if (sc.power_flexible[c].active_at(t))
                    u_flexible[c] = sc.power_flexible[c].nominal_power + controls(1 + c, 0);
            knee_starts = plan.starts;
            snapshot.front = std::move(pairs);
            snapshot.knee = knee;
            snapshot.log = std::move(res.log);
        } else {
            BaselineConfig config;
            config.moea = settings.moea;
            config.penalty_weight = settings.penalty_weight;
            const BaselineKind kind = solver == SolverKind::Penalty
                                          ? BaselineKind::Penalty
                                          : BaselineKind::ConstraintDominated;
            Scenario local = sc;
            local.battery.initial_energy = energy;  // solve from the realized state
            BaselineResult res =
                solve_baseline(kind, local, forecast, config, bounds, t, solver_rng);
            if (res.front.empty())
                throw SolverFailure("slot " + std::to_string(t) + ": " +
                                    std::string(solver_name(solver)) +
                                    " produced no feasible plan");
            std::vector<ObjectivePair> pairs;
            pairs.reserve(res.front.size());
            for (const auto& c : res.front) pairs.push_back(c.pair());
            const int knee = select_knee(pairs);
            const auto& plan = res.front[knee];
            u_battery = plan.battery_power(0);
            for (int c = 0; c < flex; ++c)
                if (sc.power_flexible[c].active_at(t)) u_flexible[c] = plan.flexible_power(c, 0);
            knee_starts = plan.starts;
            snapshot.front = std::move(pairs);
            snapshot.knee = knee;
            snapshot.log = std::move(res.log);
        }

        for (size_t b = 0; b < sc.time_flexible.size(); ++b)
            if (!committed[b] && t == sc.time_flexible[b].window.first)
                committed[b] = knee_starts[b];

        // Realized accounting with true series and the applied first control.
        double p_con = sc.inflexible_true[t - 1];
        for (size_t b = 0; b < sc.time_flexible.size(); ++b)
            if (committed[b] && sc.time_flexible[b].runs_at(*committed[b], t))
                p_con += sc.time_flexible[b].rated_power;
        for (int c = 0; c < flex; ++c) p_con += u_flexible[c];

        const double p_total = grid_exchange(p_con, u_battery, sc.renewable_true[t - 1]);
        const double rate = p_total > 0.0 ? sc.tariff.market_price[t - 1]
                                          : sc.tariff.feed_in_rate;
        const double cost = rate * p_total * dt;

        SlotRecord record;
        record.slot = t;
        record.price_true = sc.tariff.market_price[t - 1];
        record.price_forecast_t0 = forecast.price[0];
        record.renewable = sc.renewable_true[t - 1];
        record.inflexible_load = sc.inflexible_true[t - 1];
        record.battery_power = u_battery;
        record.battery_energy = energy;
        record.appliance_power = u_flexible;
        record.p_total = p_total;
        record.slot_cost = cost;
        trace.slots.push_back(std::move(record));
        trace.solves.push_back(std::move(snapshot));

        trace.total_cost += cost;
        for (int c = 0; c < flex; ++c) {
            const auto& app = sc.power_flexible[c];
            if (!app.active_at(t)) continue;
            const double dev = u_flexible[c] - app.nominal_power;
            trace.power_flex_dissatisfaction += app.discomfort_weight * dev * dev;
        }

        energy = step_battery(energy, u_battery, sc.battery, dt);
        if (energy < sc.battery.capacity_min - 1e-9 || energy > sc.battery.capacity_max + 1e-9)
            throw SolverFailure("slot " + std::to_string(t) +
                                ": realized battery energy left its bounds");
    }

    trace.committed_starts.reserve(sc.time_flexible.size());
    for (size_t b = 0; b < sc.time_flexible.size(); ++b) {
        const auto& app = sc.time_flexible[b];
        const int start = committed[b].value_or(app.requested_start);
        trace.committed_starts.push_back(start);
        const int delay = start - app.requested_start;
        trace.time_flex_dissatisfaction +=
            app.discomfort_weight * std::pow(static_cast<double>(delay), app.delay_exponent);
    }
    trace.total_dissatisfaction =
        trace.time_flex_dissatisfaction + trace.power_flex_dissatisfaction;

    trace.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return trace;
}

double degradation_percent(const SimulationTrace& with_errors, const SimulationTrace& perfect) {
    return 100.0 * (with_errors.total_cost - perfect.total_cost) / perfect.total_cost;
}

std::vector<double> manhattan_convergence(const ConvergenceLog& log, ObjectivePair ideal,
                                          ObjectivePair ranges) {
    if (ranges[0] <= 0.0 || ranges[1] <= 0.0)
        throw std::invalid_argument("manhattan_convergence: ranges must be positive");
    std::vector<double> series;
    series.reserve(log.fronts.size());
    double best = std::numeric_limits<double>::infinity();
    for (const auto& front : log.fronts) {
        for (const auto& p : front)
            best = std::min(best, std::abs(p[0] - ideal[0]) / ranges[0] +
                                      std::abs(p[1] - ideal[1]) / ranges[1]);
        series.push_back(best);
    }
    return series;
}

}  // namespace hems
