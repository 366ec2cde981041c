#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "hems/constraints.hpp"
#include "hems/objectives.hpp"
#include "hems/random.hpp"
#include "hems/sampler.hpp"

namespace hems {

using ObjectivePair = std::array<double, 2>;  // (cost, dissatisfaction), both minimized

// Candidate plan: one start slot per time-flexible appliance plus the stacked
// Laguerre coefficient vector.
struct Chromosome {
    std::vector<int> starts;
    Eigen::VectorXd eta;
    ObjectiveValues objectives;
    bool evaluated = false;
    ObjectivePair pair() const { return {objectives.cost, objectives.dissatisfaction}; }
};

// Admissible start range for one appliance at the current slot; collapses to
// a single value once the start has been committed.
struct StartBounds {
    int lo = 1;
    int hi = 1;
};

std::vector<StartBounds> admissible_starts(const Scenario& scenario, int t_now,
                                           std::span<const std::optional<int>> committed);

struct Population {
    std::vector<Chromosome> members;
    std::vector<Chromosome> reserve;  // crossover-support pool of extreme coefficient vectors
    int iteration = 0;
};

struct MoeaConfig {
    int population_size = 200;
    int max_iterations = 1000;
    double crossover_rate = 0.2;
    double mutation_rate = 0.8;
};

Population initialize(const FeasibleSet& set, const MoeaConfig& config,
                      std::span<const StartBounds> start_bounds, RandomStream& rng);

std::pair<Chromosome, Chromosome> crossover(const Population& pop,
                                            std::span<const StartBounds> start_bounds,
                                            RandomStream& rng);

Chromosome mutate(const Population& pop, const FeasibleSet& set, long iteration,
                  RandomStream& rng);

// Rank 0 = non-dominated set; dominance is <= on both objectives with < on at
// least one.
std::vector<int> nondominated_sort(const std::vector<ObjectivePair>& values);

// Standard crowding distance within one rank class: boundary points get
// infinity, interior points the normalized neighbour-gap sum per objective.
// Fronts with fewer than three points are all infinite.
std::vector<double> crowding_distance(const std::vector<ObjectivePair>& front);

// Dominated 2-D hypervolume w.r.t. a reference point (contributions clipped
// at the reference).
double hypervolume2d(const std::vector<ObjectivePair>& points, const ObjectivePair& reference);

// Index of the knee: minimizer of the sum of per-objective values normalized
// to the front's own range; ties broken by lower cost, then lower index.
int select_knee(const std::vector<ObjectivePair>& front);

// All-time non-dominated staircase; insertion rejects weakly dominated points
// and evicts points the newcomer dominates.
template <class Sol>
class ParetoArchive {
public:
    struct Entry {
        double dissatisfaction;
        Sol solution;
    };

    bool insert(double cost, double dissatisfaction, Sol solution) {
        auto next = entries_.upper_bound(cost);
        if (next != entries_.begin()) {
            auto prev = std::prev(next);
            if (prev->second.dissatisfaction <= dissatisfaction) return false;
        }
        for (auto it = entries_.lower_bound(cost);
             it != entries_.end() && it->second.dissatisfaction >= dissatisfaction;)
            it = entries_.erase(it);
        entries_.emplace(cost, Entry{dissatisfaction, std::move(solution)});
        return true;
    }

    bool empty() const { return entries_.empty(); }
    size_t size() const { return entries_.size(); }
    const std::map<double, Entry>& entries() const { return entries_; }

    std::vector<ObjectivePair> pairs() const {
        std::vector<ObjectivePair> out;
        out.reserve(entries_.size());
        for (const auto& [cost, entry] : entries_) out.push_back({cost, entry.dissatisfaction});
        return out;
    }

    // Staircase order makes the extremes the first and last entries.
    ObjectivePair ideal() const {
        return {entries_.begin()->first, entries_.rbegin()->second.dissatisfaction};
    }
    ObjectivePair nadir() const {
        return {entries_.rbegin()->first, entries_.begin()->second.dissatisfaction};
    }

private:
    std::map<double, Entry> entries_;
};

struct GenerationRecord {
    int generation = 0;
    int front_size = 0;          // archive size after the generation
    ObjectivePair ideal{0, 0};   // archive per-objective minima
    ObjectivePair nadir{0, 0};   // archive per-objective maxima
    double manhattan = 0.0;      // normalized L1 distance of the archive to its own ideal
    double hypervolume = 0.0;    // vs. a reference fixed at the first non-empty generation
};

struct ConvergenceLog {
    std::vector<GenerationRecord> records;
    // Non-dominated set of each generation's merged population, kept for
    // post-hoc convergence metrics against externally chosen ideal/ranges.
    std::vector<std::vector<ObjectivePair>> fronts;
};

struct EvolveResult {
    std::vector<Chromosome> front;  // accumulated Pareto set, cost-ascending
    ConvergenceLog log;
    long long evaluations = 0;
    long long feasibility_checks = 0;
    long long feasibility_failures = 0;  // expected zero; operators preserve feasibility
};

EvolveResult evolve(const Scenario& scenario, const FeasibleSet& set,
                    const ForecastBundle& forecast, const LaguerreBasis& basis,
                    const MoeaConfig& config, std::span<const StartBounds> start_bounds,
                    int t_now, RandomStream& rng);

}  // namespace hems
