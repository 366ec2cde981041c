#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "hems/moea.hpp"

namespace hems {

// Candidate plan over the raw per-slot decision variables of the
// untransformed problem: battery power and absolute appliance powers across
// the horizon, plus start times. Entries of flexible_power outside an
// appliance's window are carried at nominal and never read.
struct RawChromosome {
    std::vector<int> starts;
    Eigen::VectorXd battery_power;   // kW, one per horizon step
    Eigen::MatrixXd flexible_power;  // l x horizon, absolute kW
    double violation = 0.0;
    ObjectiveValues objectives;
    bool evaluated = false;
    ObjectivePair pair() const { return {objectives.cost, objectives.dissatisfaction}; }
};

// Aggregate constraint violation: clamped rate and power-bound excesses plus
// battery-energy excursions under forward simulation. Zero iff the schedule
// honors every physical bound.
double violation_measure(const RawChromosome& raw, const Scenario& scenario, int t_now);

enum class BaselineKind { Penalty, ConstraintDominated };

struct BaselineConfig {
    MoeaConfig moea;
    double penalty_weight = 1e4;
    // Final fronts only admit schedules at least this close to feasibility.
    double front_violation_cap = 1e-6;
};

struct BaselineResult {
    std::vector<RawChromosome> front;  // feasible non-dominated set, cost-ascending
    ConvergenceLog log;
    bool empty_front = false;  // reported, not fatal
    long long evaluations = 0;
};

BaselineResult solve_baseline(BaselineKind kind, const Scenario& scenario,
                              const ForecastBundle& forecast, const BaselineConfig& config,
                              std::span<const StartBounds> start_bounds, int t_now,
                              RandomStream& rng);

// NSGA-II over raw variables with violation-penalized objectives.
BaselineResult solve_penalty(const Scenario& scenario, const ForecastBundle& forecast,
                             const BaselineConfig& config,
                             std::span<const StartBounds> start_bounds, int t_now,
                             RandomStream& rng);

// NSGA-II over raw variables with constraint domination: feasible beats
// infeasible, smaller violation beats larger, feasible compare by Pareto
// dominance.
BaselineResult solve_constraint_dominated(const Scenario& scenario,
                                          const ForecastBundle& forecast,
                                          const BaselineConfig& config,
                                          std::span<const StartBounds> start_bounds, int t_now,
                                          RandomStream& rng);

// Ranking used by the constraint-dominated variant, exposed for tests:
// feasible points (violation <= tol) rank by Pareto dominance; infeasible
// points rank below all feasible ones, ordered by violation.
std::vector<int> constrained_sort(const std::vector<ObjectivePair>& values,
                                  const std::vector<double>& violations, double tol = 1e-9);

}  // namespace hems
