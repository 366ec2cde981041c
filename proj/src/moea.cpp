#include "hems/moea.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "hems/errors.hpp"

namespace hems {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int ceil_count(double rate, int n) {
    // Nudge against representation noise (0.2 * 200 must give 40, not 41).
    return static_cast<int>(std::ceil(rate * n - 1e-9));
}

std::vector<int> draw_starts(std::span<const StartBounds> bounds, RandomStream& rng) {
    std::vector<int> starts(bounds.size());
    for (size_t b = 0; b < bounds.size(); ++b)
        starts[b] = bounds[b].lo == bounds[b].hi ? bounds[b].lo
                                                 : rng.uniform_int(bounds[b].lo, bounds[b].hi);
    return starts;
}

std::vector<int> shuffled_coordinates(int dim, RandomStream& rng) {
    std::vector<int> coords(dim);
    std::iota(coords.begin(), coords.end(), 0);
    for (int i = dim - 1; i > 0; --i) std::swap(coords[i], coords[rng.uniform_int(0, i)]);
    return coords;
}

// Crowding over arbitrary-dimension points, used for parameter-space
// truncation of the reserve pool.
std::vector<double> crowding_nd(const std::vector<Eigen::VectorXd>& points) {
    const int n = static_cast<int>(points.size());
    std::vector<double> distance(n, 0.0);
    if (n < 3) {
        std::fill(distance.begin(), distance.end(), kInf);
        return distance;
    }
    const int dim = static_cast<int>(points.front().size());
    std::vector<int> order(n);
    for (int d = 0; d < dim; ++d) {
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            if (points[a](d) != points[b](d)) return points[a](d) < points[b](d);
            return a < b;
        });
        const double range = points[order.back()](d) - points[order.front()](d);
        distance[order.front()] = kInf;
        distance[order.back()] = kInf;
        if (range <= 0.0) continue;
        for (int i = 1; i + 1 < n; ++i)
            if (distance[order[i]] != kInf)
                distance[order[i]] += (points[order[i + 1]](d) - points[order[i - 1]](d)) / range;
    }
    return distance;
}

bool dominates(const ObjectivePair& a, const ObjectivePair& b) {
    return a[0] <= b[0] && a[1] <= b[1] && (a[0] < b[0] || a[1] < b[1]);
}

}  // namespace

std::vector<StartBounds> admissible_starts(const Scenario& sc, int t_now,
                                           std::span<const std::optional<int>> committed) {
    if (committed.size() != sc.time_flexible.size())
        throw std::invalid_argument("admissible_starts: one commitment slot per appliance");
    std::vector<StartBounds> bounds(sc.time_flexible.size());
    for (size_t b = 0; b < sc.time_flexible.size(); ++b) {
        const auto& app = sc.time_flexible[b];
        if (committed[b]) {
            bounds[b] = {*committed[b], *committed[b]};
            continue;
        }
        const int lo = std::max(t_now, app.requested_start);
        const int hi = app.latest_start();
        if (lo > hi)
            throw ConstraintViolation(app.name + ": no admissible start left at slot " +
                                      std::to_string(t_now));
        bounds[b] = {lo, hi};
    }
    return bounds;
}

Population initialize(const FeasibleSet& set, const MoeaConfig& config,
                      std::span<const StartBounds> start_bounds, RandomStream& rng) {
    if (config.population_size < 4) throw std::invalid_argument("population_size must be >= 4");
    const int dim = static_cast<int>(set.dim());
    const Eigen::VectorXd origin = initial_point(set);

    Population pop;
    pop.members.reserve(config.population_size);
    for (int n = 0; n < config.population_size; ++n) {
        Chromosome member;
        member.starts = draw_starts(start_bounds, rng);
        member.eta = sampler_one(set, origin, shuffled_coordinates(dim, rng), 1, rng);
        pop.members.push_back(std::move(member));
    }

    // Vertex-biased pool supporting crossover: one coordinate sweep in {0,1}
    // mode lands on per-coordinate extremes. Generate twice the target size,
    // keep the most spread-out half (parameter-space crowding).
    const int candidates = 2 * config.population_size;
    std::vector<Chromosome> raw;
    std::vector<Eigen::VectorXd> points;
    raw.reserve(candidates);
    points.reserve(candidates);
    for (int n = 0; n < candidates; ++n) {
        Chromosome member;
        member.starts = draw_starts(start_bounds, rng);
        member.eta = sampler_one(set, origin, shuffled_coordinates(dim, rng), 0, rng);
        points.push_back(member.eta);
        raw.push_back(std::move(member));
    }
    const auto spread = crowding_nd(points);
    std::vector<int> order(candidates);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return spread[a] > spread[b]; });
    pop.reserve.reserve(config.population_size);
    for (int i = 0; i < config.population_size; ++i) pop.reserve.push_back(raw[order[i]]);
    return pop;
}

std::pair<Chromosome, Chromosome> crossover(const Population& pop,
                                            std::span<const StartBounds> start_bounds,
                                            RandomStream& rng) {
    if (pop.members.empty()) throw std::invalid_argument("crossover: empty population");
    const auto& first = pop.members[rng.uniform_int(0, static_cast<int>(pop.members.size()) - 1)];
    const int pool = static_cast<int>(pop.members.size() + pop.reserve.size());
    const int pick = rng.uniform_int(0, pool - 1);
    const auto& second = pick < static_cast<int>(pop.members.size())
                             ? pop.members[pick]
                             : pop.reserve[pick - pop.members.size()];

    const double blend = rng.uniform();
    Chromosome a, b;
    a.eta = blend * first.eta + (1.0 - blend) * second.eta;
    b.eta = (1.0 - blend) * first.eta + blend * second.eta;
    a.starts = draw_starts(start_bounds, rng);
    b.starts = draw_starts(start_bounds, rng);
    return {std::move(a), std::move(b)};
}

Chromosome mutate(const Population& pop, const FeasibleSet& set, long iteration,
                  RandomStream& rng) {
    if (pop.members.empty()) throw std::invalid_argument("mutate: empty population");
    const auto& parent = pop.members[rng.uniform_int(0, static_cast<int>(pop.members.size()) - 1)];
    Chromosome child;
    child.starts = parent.starts;
    if (rng.coin()) {
        child.eta = sampler_two(set, parent.eta, rng);
    } else {
        const auto coords = mutation_coordinates(static_cast<int>(set.dim()), rng);
        child.eta = sampler_one(set, parent.eta, coords, iteration, rng);
    }
    return child;
}

std::vector<int> nondominated_sort(const std::vector<ObjectivePair>& values) {
    const int n = static_cast<int>(values.size());
    std::vector<int> rank(n, 0);
    if (n == 0) return rank;

    std::vector<std::vector<int>> dominated(n);
    std::vector<int> domination_count(n, 0);
    std::vector<int> current;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            if (dominates(values[i], values[j]))
                dominated[i].push_back(j);
            else if (dominates(values[j], values[i]))
                ++domination_count[i];
        }
        if (domination_count[i] == 0) {
            rank[i] = 0;
            current.push_back(i);
        }
    }
    int level = 0;
    while (!current.empty()) {
        std::vector<int> next;
        for (int i : current)
            for (int j : dominated[i])
                if (--domination_count[j] == 0) {
                    rank[j] = level + 1;
                    next.push_back(j);
                }
        ++level;
        current = std::move(next);
    }
    return rank;
}

std::vector<double> crowding_distance(const std::vector<ObjectivePair>& front) {
    const int n = static_cast<int>(front.size());
    std::vector<double> distance(n, 0.0);
    if (n < 3) {
        std::fill(distance.begin(), distance.end(), kInf);
        return distance;
    }
    std::vector<int> order(n);
    for (int obj = 0; obj < 2; ++obj) {
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            if (front[a][obj] != front[b][obj]) return front[a][obj] < front[b][obj];
            return a < b;
        });
        distance[order.front()] = kInf;
        distance[order.back()] = kInf;
        const double range = front[order.back()][obj] - front[order.front()][obj];
        if (range <= 0.0) continue;
        for (int i = 1; i + 1 < n; ++i)
            if (distance[order[i]] != kInf)
                distance[order[i]] += (front[order[i + 1]][obj] - front[order[i - 1]][obj]) / range;
    }
    return distance;
}

double hypervolume2d(const std::vector<ObjectivePair>& points, const ObjectivePair& reference) {
    std::vector<ObjectivePair> inside;
    for (const auto& p : points)
        if (p[0] < reference[0] && p[1] < reference[1]) inside.push_back(p);
    if (inside.empty()) return 0.0;
    std::sort(inside.begin(), inside.end());
    double volume = 0.0;
    double ceiling = reference[1];
    for (const auto& p : inside) {
        if (p[1] >= ceiling) continue;  // dominated within the sweep
        volume += (reference[0] - p[0]) * (ceiling - p[1]);
        ceiling = p[1];
    }
    return volume;
}

int select_knee(const std::vector<ObjectivePair>& front) {
    if (front.empty()) throw std::invalid_argument("select_knee: empty front");
    ObjectivePair lo{kInf, kInf}, hi{-kInf, -kInf};
    for (const auto& p : front)
        for (int k = 0; k < 2; ++k) {
            lo[k] = std::min(lo[k], p[k]);
            hi[k] = std::max(hi[k], p[k]);
        }
    int best = 0;
    double best_score = kInf;
    for (int i = 0; i < static_cast<int>(front.size()); ++i) {
        double score = 0.0;
        for (int k = 0; k < 2; ++k) {
            const double range = hi[k] - lo[k];
            if (range > 0.0) score += (front[i][k] - lo[k]) / range;
        }
        const bool better = score < best_score ||
                            (score == best_score && front[i][0] < front[best][0]);
        if (better) {
            best = i;
            best_score = score;
        }
    }
    return best;
}

namespace {

struct ArchiveTracker {
    ParetoArchive<Chromosome> archive;
    bool have_reference = false;
    ObjectivePair reference{0, 0};

    void note(ConvergenceLog& log, int generation, std::vector<ObjectivePair> merged_front) {
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
                // Fix the hypervolume reference the first time the front is
                // non-empty so later records are comparable within the run.
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
        log.fronts.push_back(std::move(merged_front));
    }
};

}  // namespace

EvolveResult evolve(const Scenario& scenario, const FeasibleSet& set,
                    const ForecastBundle& forecast, const LaguerreBasis& basis,
                    const MoeaConfig& config, std::span<const StartBounds> start_bounds,
                    int t_now, RandomStream& rng) {
    EvolveResult result;
    Population pop = initialize(set, config, start_bounds, rng);

    auto check = [&](const Chromosome& c) {
        ++result.feasibility_checks;
        if (is_feasible(set, c.eta).feasible) return true;
        ++result.feasibility_failures;
        return false;
    };
    auto evaluate_in_place = [&](Chromosome& c) {
        c.objectives = evaluate(scenario, forecast, basis, c.starts, c.eta, t_now);
        c.evaluated = true;
        ++result.evaluations;
    };

    ArchiveTracker tracker;
    for (auto& member : pop.members) {
        check(member);
        evaluate_in_place(member);
        tracker.archive.insert(member.objectives.cost, member.objectives.dissatisfaction, member);
    }
    for (const auto& member : pop.reserve) check(member);

    {
        std::vector<ObjectivePair> values;
        for (const auto& m : pop.members) values.push_back(m.pair());
        const auto ranks = nondominated_sort(values);
        std::vector<ObjectivePair> front;
        for (size_t i = 0; i < values.size(); ++i)
            if (ranks[i] == 0) front.push_back(values[i]);
        tracker.note(result.log, 0, std::move(front));
    }

    const int crossover_pairs = ceil_count(config.crossover_rate, config.population_size);
    const int mutation_count = ceil_count(config.mutation_rate, config.population_size);

    for (int it = 1; it <= config.max_iterations; ++it) {
        std::vector<Chromosome> offspring;
        offspring.reserve(2 * crossover_pairs + mutation_count);
        for (int k = 0; k < crossover_pairs; ++k) {
            auto [a, b] = crossover(pop, start_bounds, rng);
            offspring.push_back(std::move(a));
            offspring.push_back(std::move(b));
        }
        for (int k = 0; k < mutation_count; ++k)
            offspring.push_back(mutate(pop, set, it, rng));

        std::vector<Chromosome> merged = pop.members;
        for (auto& child : offspring) {
            if (!check(child)) continue;  // unreachable when operators preserve feasibility
            evaluate_in_place(child);
            tracker.archive.insert(child.objectives.cost, child.objectives.dissatisfaction, child);
            merged.push_back(std::move(child));
        }

        std::vector<ObjectivePair> values;
        values.reserve(merged.size());
        for (const auto& m : merged) values.push_back(m.pair());
        const auto ranks = nondominated_sort(values);

        // Environmental selection by (rank, crowding).
        const int max_rank = *std::max_element(ranks.begin(), ranks.end());
        std::vector<std::vector<int>> classes(max_rank + 1);
        for (size_t i = 0; i < merged.size(); ++i) classes[ranks[i]].push_back(static_cast<int>(i));

        std::vector<Chromosome> survivors;
        survivors.reserve(config.population_size);
        for (const auto& cls : classes) {
            if (static_cast<int>(survivors.size()) >= config.population_size) break;
            const int room = config.population_size - static_cast<int>(survivors.size());
            if (static_cast<int>(cls.size()) <= room) {
                for (int idx : cls) survivors.push_back(merged[idx]);
                continue;
            }
            std::vector<ObjectivePair> class_values;
            class_values.reserve(cls.size());
            for (int idx : cls) class_values.push_back(values[idx]);
            const auto crowd = crowding_distance(class_values);
            std::vector<int> order(cls.size());
            std::iota(order.begin(), order.end(), 0);
            std::stable_sort(order.begin(), order.end(),
                             [&](int a, int b) { return crowd[a] > crowd[b]; });
            for (int i = 0; i < room; ++i) survivors.push_back(merged[cls[order[i]]]);
        }
        pop.members = std::move(survivors);
        pop.iteration = it;

        std::vector<ObjectivePair> front;
        for (size_t i = 0; i < merged.size(); ++i)
            if (ranks[i] == 0) front.push_back(values[i]);
        tracker.note(result.log, it, std::move(front));
    }

    result.front.reserve(tracker.archive.size());
    for (const auto& [cost, entry] : tracker.archive.entries())
        result.front.push_back(entry.solution);
    return result;
}

}  // namespace hems
