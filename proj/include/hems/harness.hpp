#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hems/baselines.hpp"
#include "hems/moea.hpp"

namespace hems {

// Forecast-error envelope for one series: the relative error at lead time m
// is drawn uniformly from +/- (base_fraction + growth_per_step * m).
struct SeriesErrorSpec {
    double base_fraction = 0.0;
    double growth_per_step = 0.0;
    double bound(int lead) const { return base_fraction + growth_per_step * lead; }
};

struct ErrorProfile {
    SeriesErrorSpec price;
    SeriesErrorSpec renewable;
    SeriesErrorSpec load;
    bool zero() const {
        return price.base_fraction == 0 && price.growth_per_step == 0 &&
               renewable.base_fraction == 0 && renewable.growth_per_step == 0 &&
               load.base_fraction == 0 && load.growth_per_step == 0;
    }
};

// Forecasts over the clipped horizon starting at t_now. The current slot is
// observed exactly (zero error at lead 0); renewable forecasts are clamped
// at zero.
ForecastBundle make_forecast(const Scenario& scenario, int t_now, int horizon,
                             const ErrorProfile& profile, RandomStream& rng);

enum class SolverKind { Proposed, Penalty, ConstraintDominated };

const char* solver_name(SolverKind kind);
std::optional<SolverKind> parse_solver(const std::string& name);

struct SolveSettings {
    MoeaConfig moea;
    double laguerre_pole = 0.8;
    int laguerre_order = 15;
    int horizon = 20;
    double penalty_weight = 1e4;
};

struct SlotRecord {
    int slot = 0;
    double price_true = 0.0;
    double price_forecast_t0 = 0.0;
    double renewable = 0.0;
    double inflexible_load = 0.0;
    double battery_power = 0.0;
    double battery_energy = 0.0;  // state at the start of the slot
    std::vector<double> appliance_power;
    double p_total = 0.0;
    double slot_cost = 0.0;
};

struct SolveSnapshot {
    int slot = 0;
    std::vector<ObjectivePair> front;  // cost-ascending
    int knee = 0;
    ConvergenceLog log;
};

struct SimulationTrace {
    std::vector<SlotRecord> slots;
    std::vector<SolveSnapshot> solves;
    std::vector<int> committed_starts;
    double total_cost = 0.0;            // realized, true prices
    double total_dissatisfaction = 0.0;  // realized delays and deviations
    double time_flex_dissatisfaction = 0.0;
    double power_flex_dissatisfaction = 0.0;
    double wall_seconds = 0.0;
};

// One full day of receding-horizon control: re-forecast, rebuild constraints
// from the realized state, solve, apply only the first control, advance the
// true dynamics. Paired comparisons stay paired because the forecast noise
// stream depends only on the run seed and slot, never on the solver.
SimulationTrace run_mpc_day(const Scenario& scenario, SolverKind solver,
                            const SolveSettings& settings, const ErrorProfile& profile,
                            const RandomStream& run_rng);

// Percent cost increase of the uncertain run over the perfect-information
// run of the same solver and seed.
double degradation_percent(const SimulationTrace& with_errors, const SimulationTrace& perfect);

// Per-generation normalized Manhattan distance of the best front seen so far
// to an externally chosen ideal vector; non-increasing by construction.
std::vector<double> manhattan_convergence(const ConvergenceLog& log, ObjectivePair ideal,
                                          ObjectivePair ranges);

}  // namespace hems
