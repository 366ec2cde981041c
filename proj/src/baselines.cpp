#include "hems/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace hems {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kFeasibleTol = 1e-9;

int ceil_count(double rate, int n) { return static_cast<int>(std::ceil(rate * n - 1e-9)); }

struct Problem {
    const Scenario* sc;
    int t_now;
    int horizon;
    int flex;

    bool active(int c, int m) const { return sc->power_flexible[c].active_at(t_now + m); }
};

Eigen::MatrixXd deviations(const Problem& pb, const RawChromosome& raw) {
    Eigen::MatrixXd dev(1 + pb.flex, pb.horizon);
    dev.row(0) = raw.battery_power.transpose();
    for (int c = 0; c < pb.flex; ++c)
        dev.row(1 + c) = raw.flexible_power.row(c).array() - pb.sc->power_flexible[c].nominal_power;
    return dev;
}

std::vector<int> draw_starts(std::span<const StartBounds> bounds, RandomStream& rng) {
    std::vector<int> starts(bounds.size());
    for (size_t b = 0; b < bounds.size(); ++b)
        starts[b] = bounds[b].lo == bounds[b].hi ? bounds[b].lo
                                                 : rng.uniform_int(bounds[b].lo, bounds[b].hi);
    return starts;
}

RawChromosome nominal_plan(const Problem& pb, std::span<const StartBounds> bounds) {
    RawChromosome raw;
    raw.starts.resize(bounds.size());
    for (size_t b = 0; b < bounds.size(); ++b) raw.starts[b] = bounds[b].lo;
    raw.battery_power = Eigen::VectorXd::Zero(pb.horizon);
    raw.flexible_power.resize(pb.flex, pb.horizon);
    for (int c = 0; c < pb.flex; ++c)
        raw.flexible_power.row(c).setConstant(pb.sc->power_flexible[c].nominal_power);
    return raw;
}

// Trickle-charges exactly against leakage so the energy level holds still;
// feasible from any state inside the capacity bounds.
RawChromosome sustain_plan(const Problem& pb, std::span<const StartBounds> bounds) {
    RawChromosome raw = nominal_plan(pb, bounds);
    const auto& bat = pb.sc->battery;
    const double hold = std::clamp(bat.initial_energy * (1.0 - bat.leakage_per_slot) /
                                       pb.sc->grid.slot_duration_hours,
                                   -bat.max_rate, bat.max_rate);
    raw.battery_power.setConstant(hold);
    return raw;
}

RawChromosome random_plan(const Problem& pb, std::span<const StartBounds> bounds,
                          RandomStream& rng) {
    RawChromosome raw = nominal_plan(pb, bounds);
    raw.starts = draw_starts(bounds, rng);
    const double s_max = pb.sc->battery.max_rate;
    for (int m = 0; m < pb.horizon; ++m) raw.battery_power(m) = rng.uniform(-s_max, s_max);
    for (int c = 0; c < pb.flex; ++c) {
        const auto& app = pb.sc->power_flexible[c];
        for (int m = 0; m < pb.horizon; ++m)
            if (pb.active(c, m)) raw.flexible_power(c, m) = rng.uniform(app.min_power, app.max_power);
    }
    return raw;
}

void uniform_crossover(const Problem& pb, const RawChromosome& a, const RawChromosome& b,
                       RawChromosome& child1, RawChromosome& child2, RandomStream& rng) {
    child1 = a;
    child2 = b;
    child1.evaluated = child2.evaluated = false;
    for (size_t s = 0; s < a.starts.size(); ++s)
        if (rng.coin()) std::swap(child1.starts[s], child2.starts[s]);
    for (int m = 0; m < pb.horizon; ++m)
        if (rng.coin()) std::swap(child1.battery_power(m), child2.battery_power(m));
    for (int c = 0; c < pb.flex; ++c)
        for (int m = 0; m < pb.horizon; ++m)
            if (pb.active(c, m) && rng.coin())
                std::swap(child1.flexible_power(c, m), child2.flexible_power(c, m));
}

// Gaussian perturbation with sigma = 5% of each variable's range, clamped to
// the box bounds but deliberately not repaired against the storage dynamics.
RawChromosome gaussian_mutation(const Problem& pb, const RawChromosome& parent,
                                std::span<const StartBounds> bounds, RandomStream& rng) {
    RawChromosome child = parent;
    child.evaluated = false;
    int n_vars = pb.horizon;
    for (int c = 0; c < pb.flex; ++c)
        for (int m = 0; m < pb.horizon; ++m)
            if (pb.active(c, m)) ++n_vars;
    const double pm = 1.0 / n_vars;
    const double s_max = pb.sc->battery.max_rate;

    bool touched = false;
    for (int m = 0; m < pb.horizon; ++m) {
        if (rng.uniform() >= pm) continue;
        touched = true;
        const double sigma = 0.05 * (2.0 * s_max);
        child.battery_power(m) =
            std::clamp(child.battery_power(m) + sigma * rng.gaussian(), -s_max, s_max);
    }
    for (int c = 0; c < pb.flex; ++c) {
        const auto& app = pb.sc->power_flexible[c];
        const double sigma = 0.05 * (app.max_power - app.min_power);
        for (int m = 0; m < pb.horizon; ++m) {
            if (!pb.active(c, m)) continue;
            if (rng.uniform() >= pm) continue;
            touched = true;
            child.flexible_power(c, m) = std::clamp(child.flexible_power(c, m) +
                                                        sigma * rng.gaussian(),
                                                    app.min_power, app.max_power);
        }
    }
    if (!touched && pb.horizon > 0) {
        const int m = rng.uniform_int(0, pb.horizon - 1);
        const double sigma = 0.05 * (2.0 * s_max);
        child.battery_power(m) =
            std::clamp(child.battery_power(m) + sigma * rng.gaussian(), -s_max, s_max);
    }
    for (size_t s = 0; s < bounds.size(); ++s)
        if (bounds[s].lo != bounds[s].hi && rng.uniform() < 1.0 / bounds.size())
            child.starts[s] = rng.uniform_int(bounds[s].lo, bounds[s].hi);
    return child;
}

}  // namespace

double violation_measure(const RawChromosome& raw, const Scenario& sc, int t_now) {
    const int horizon = static_cast<int>(raw.battery_power.size());
    const int flex = static_cast<int>(sc.power_flexible.size());
    if (raw.flexible_power.rows() != flex || raw.flexible_power.cols() != horizon)
        throw std::invalid_argument("violation_measure: power matrix shape mismatch");
    if (t_now < 1 || t_now + horizon - 1 > sc.grid.slot_count)
        throw std::out_of_range("violation_measure: horizon extends past the grid");

    const auto& bat = sc.battery;
    double total = 0.0;
    for (int m = 0; m < horizon; ++m)
        total += std::max(0.0, std::abs(raw.battery_power(m)) - bat.max_rate);
    for (int c = 0; c < flex; ++c) {
        const auto& app = sc.power_flexible[c];
        for (int m = 0; m < horizon; ++m) {
            if (!app.active_at(t_now + m)) continue;
            total += std::max(0.0, app.min_power - raw.flexible_power(c, m));
            total += std::max(0.0, raw.flexible_power(c, m) - app.max_power);
        }
    }
    double energy = bat.initial_energy;
    const double dt = sc.grid.slot_duration_hours;
    for (int m = 0; m < horizon; ++m) {
        energy = bat.leakage_per_slot * energy + raw.battery_power(m) * dt;
        total += std::max(0.0, energy - bat.capacity_max);
        total += std::max(0.0, bat.capacity_min - energy);
    }
    return total;
}

std::vector<int> constrained_sort(const std::vector<ObjectivePair>& values,
                                  const std::vector<double>& violations, double tol) {
    if (values.size() != violations.size())
        throw std::invalid_argument("constrained_sort: size mismatch");
    const int n = static_cast<int>(values.size());
    std::vector<int> rank(n, 0);

    std::vector<int> feasible, infeasible;
    for (int i = 0; i < n; ++i)
        (violations[i] <= tol ? feasible : infeasible).push_back(i);

    int next_rank = 0;
    if (!feasible.empty()) {
        std::vector<ObjectivePair> sub;
        sub.reserve(feasible.size());
        for (int i : feasible) sub.push_back(values[i]);
        const auto sub_rank = nondominated_sort(sub);
        for (size_t k = 0; k < feasible.size(); ++k) rank[feasible[k]] = sub_rank[k];
        next_rank = 1 + *std::max_element(sub_rank.begin(), sub_rank.end());
    }
    std::sort(infeasible.begin(), infeasible.end(), [&](int a, int b) {
        if (violations[a] != violations[b]) return violations[a] < violations[b];
        return a < b;
    });
    double last = -1.0;
    int current = next_rank - 1;
    for (int i : infeasible) {
        if (violations[i] != last) {
            ++current;
            last = violations[i];
        }
        rank[i] = current;
    }
    return rank;
}

namespace {

struct BaselineTracker {
    ParetoArchive<RawChromosome> archive;
    bool have_reference = false;
    ObjectivePair reference{0, 0};
    double violation_cap;

    explicit BaselineTracker(double cap) : violation_cap(cap) {}

    void admit(const RawChromosome& raw) {
        if (raw.violation <= violation_cap)
            archive.insert(raw.objectives.cost, raw.objectives.dissatisfaction, raw);
    }

    void note(ConvergenceLog& log, int generation, std::vector<ObjectivePair> front) {
        GenerationRecord rec;
        rec.generation = generation;
        rec.front_size = static_cast<int>(archive.size());
        if (archive.empty()) {
            rec.ideal = {std::nan(""), std::nan("")};
            rec.nadir = rec.ideal;
            rec.manhattan = kInf;
            rec.hypervolume = 0.0;
        } else {
            rec.ideal = archive.ideal();
            rec.nadir = archive.nadir();
            if (!have_reference) {
                for (int k = 0; k < 2; ++k) {
                    const double range = rec.nadir[k] - rec.ideal[k];
                    reference[k] = rec.nadir[k] + std::max(0.1 * range, 1e-6);
                }
                have_reference = true;
            }
            const double r0 = std::max(rec.nadir[0] - rec.ideal[0], 1e-12);
            const double r1 = std::max(rec.nadir[1] - rec.ideal[1], 1e-12);
            double best = kInf;
            for (const auto& [cost, entry] : archive.entries())
                best = std::min(best, (cost - rec.ideal[0]) / r0 +
                                          (entry.dissatisfaction - rec.ideal[1]) / r1);
            rec.manhattan = best;
            rec.hypervolume = hypervolume2d(archive.pairs(), reference);
        }
        log.records.push_back(rec);
        log.fronts.push_back(std::move(front));
    }
};

}  // namespace

BaselineResult solve_baseline(BaselineKind kind, const Scenario& sc,
                              const ForecastBundle& forecast, const BaselineConfig& config,
                              std::span<const StartBounds> start_bounds, int t_now,
                              RandomStream& rng) {
    const Problem pb{&sc, t_now, forecast.horizon(),
                     static_cast<int>(sc.power_flexible.size())};
    const auto& mc = config.moea;
    if (mc.population_size < 4) throw std::invalid_argument("population_size must be >= 4");

    BaselineResult result;
    BaselineTracker tracker(config.front_violation_cap);

    auto evaluate_raw = [&](RawChromosome& raw) {
        raw.violation = violation_measure(raw, sc, t_now);
        const Eigen::MatrixXd dev = deviations(pb, raw);
        raw.objectives.cost = evaluate_cost(sc, forecast, dev, raw.starts, t_now);
        const auto parts = evaluate_dissatisfaction(sc, dev, raw.starts, t_now);
        raw.objectives.time_flex = parts.time_flex;
        raw.objectives.power_flex = parts.power_flex;
        raw.objectives.dissatisfaction = parts.total;
        raw.evaluated = true;
        ++result.evaluations;
        tracker.admit(raw);
    };

    // Sorting keys: penalty adds the weighted violation to both objectives;
    // constraint domination keeps raw values and ranks by feasibility.
    auto sort_pairs = [&](const std::vector<RawChromosome>& pool) {
        std::vector<ObjectivePair> pairs;
        pairs.reserve(pool.size());
        for (const auto& raw : pool) {
            if (kind == BaselineKind::Penalty) {
                const double shift = config.penalty_weight * raw.violation;
                pairs.push_back({raw.objectives.cost + shift,
                                 raw.objectives.dissatisfaction + shift});
            } else {
                pairs.push_back(raw.pair());
            }
        }
        return pairs;
    };
    auto rank_pool = [&](const std::vector<RawChromosome>& pool,
                         const std::vector<ObjectivePair>& pairs) {
        if (kind == BaselineKind::Penalty) return nondominated_sort(pairs);
        std::vector<double> violations;
        violations.reserve(pool.size());
        for (const auto& raw : pool) violations.push_back(raw.violation);
        return constrained_sort(pairs, violations, kFeasibleTol);
    };

    // The trivial do-nothing schedule and the leakage-compensating hold plan
    // anchor the population; the remainder is drawn uniformly in the variable
    // boxes and typically starts out violating the storage dynamics.
    std::vector<RawChromosome> members;
    members.reserve(mc.population_size);
    members.push_back(nominal_plan(pb, start_bounds));
    members.push_back(sustain_plan(pb, start_bounds));
    for (int n = 2; n < mc.population_size; ++n)
        members.push_back(random_plan(pb, start_bounds, rng));
    for (auto& raw : members) evaluate_raw(raw);

    // Logged fronts carry raw objective values of near-feasible rank-0
    // members, so convergence metrics stay comparable across solvers.
    auto log_generation = [&](int generation, const std::vector<RawChromosome>& pool,
                              const std::vector<int>& ranks) {
        std::vector<ObjectivePair> front;
        for (size_t i = 0; i < pool.size(); ++i)
            if (ranks[i] == 0 && pool[i].violation <= config.front_violation_cap)
                front.push_back(pool[i].pair());
        tracker.note(result.log, generation, std::move(front));
    };

    {
        const auto pairs = sort_pairs(members);
        const auto ranks = rank_pool(members, pairs);
        log_generation(0, members, ranks);
    }

    const int crossover_pairs = ceil_count(mc.crossover_rate, mc.population_size);
    const int mutation_count = ceil_count(mc.mutation_rate, mc.population_size);

    for (int it = 1; it <= mc.max_iterations; ++it) {
        std::vector<RawChromosome> offspring;
        offspring.reserve(2 * crossover_pairs + mutation_count);
        for (int k = 0; k < crossover_pairs; ++k) {
            const auto& a = members[rng.uniform_int(0, static_cast<int>(members.size()) - 1)];
            const auto& b = members[rng.uniform_int(0, static_cast<int>(members.size()) - 1)];
            RawChromosome c1, c2;
            uniform_crossover(pb, a, b, c1, c2, rng);
            offspring.push_back(std::move(c1));
            offspring.push_back(std::move(c2));
        }
        for (int k = 0; k < mutation_count; ++k) {
            const auto& parent = members[rng.uniform_int(0, static_cast<int>(members.size()) - 1)];
            offspring.push_back(gaussian_mutation(pb, parent, start_bounds, rng));
        }
        for (auto& raw : offspring) evaluate_raw(raw);

        std::vector<RawChromosome> merged = members;
        for (auto& raw : offspring) merged.push_back(std::move(raw));

        const auto pairs = sort_pairs(merged);
        const auto ranks = rank_pool(merged, pairs);

        const int max_rank = *std::max_element(ranks.begin(), ranks.end());
        std::vector<std::vector<int>> classes(max_rank + 1);
        for (size_t i = 0; i < merged.size(); ++i) classes[ranks[i]].push_back(static_cast<int>(i));

        std::vector<RawChromosome> survivors;
        survivors.reserve(mc.population_size);
        for (const auto& cls : classes) {
            if (static_cast<int>(survivors.size()) >= mc.population_size) break;
            const int room = mc.population_size - static_cast<int>(survivors.size());
            if (static_cast<int>(cls.size()) <= room) {
                for (int idx : cls) survivors.push_back(merged[idx]);
                continue;
            }
            std::vector<ObjectivePair> class_values;
            class_values.reserve(cls.size());
            for (int idx : cls) class_values.push_back(pairs[idx]);
            const auto crowd = crowding_distance(class_values);
            std::vector<int> order(cls.size());
            std::iota(order.begin(), order.end(), 0);
            std::stable_sort(order.begin(), order.end(),
                             [&](int a, int b) { return crowd[a] > crowd[b]; });
            for (int i = 0; i < room; ++i) survivors.push_back(merged[cls[order[i]]]);
        }
        members = std::move(survivors);

        log_generation(it, merged, ranks);
    }

    result.front.reserve(tracker.archive.size());
    for (const auto& [cost, entry] : tracker.archive.entries())
        result.front.push_back(entry.solution);
    result.empty_front = result.front.empty();
    return result;
}

BaselineResult solve_penalty(const Scenario& sc, const ForecastBundle& forecast,
                             const BaselineConfig& config,
                             std::span<const StartBounds> start_bounds, int t_now,
                             RandomStream& rng) {
    return solve_baseline(BaselineKind::Penalty, sc, forecast, config, start_bounds, t_now, rng);
}

BaselineResult solve_constraint_dominated(const Scenario& sc, const ForecastBundle& forecast,
                                          const BaselineConfig& config,
                                          std::span<const StartBounds> start_bounds, int t_now,
                                          RandomStream& rng) {
    return solve_baseline(BaselineKind::ConstraintDominated, sc, forecast, config, start_bounds,
                          t_now, rng);
}

}  // namespace hems
