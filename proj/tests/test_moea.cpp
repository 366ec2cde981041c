#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hems/moea.hpp"
#include "support.hpp"

using namespace hems;

namespace {

// Brute-force rank assignment by repeated extraction of the non-dominated
// subset; the oracle the production sort must agree with.
std::vector<int> brute_force_ranks(const std::vector<ObjectivePair>& values) {
    const int n = static_cast<int>(values.size());
    std::vector<int> rank(n, -1);
    auto dominated = [&](int i, const std::vector<int>& pool) {
        for (int j : pool) {
            if (j == i) continue;
            const auto& a = values[j];
            const auto& b = values[i];
            if (a[0] <= b[0] && a[1] <= b[1] && (a[0] < b[0] || a[1] < b[1])) return true;
        }
        return false;
    };
    std::vector<int> remaining(n);
    std::iota(remaining.begin(), remaining.end(), 0);
    int level = 0;
    while (!remaining.empty()) {
        std::vector<int> front, rest;
        for (int i : remaining)
            (dominated(i, remaining) ? rest : front).push_back(i);
        for (int i : front) rank[i] = level;
        remaining = std::move(rest);
        ++level;
    }
    return rank;
}

struct TinyProblem {
    Scenario sc;
    LaguerreBasis basis;
    PredictionOperators ops;
    FeasibleSet set;
    ForecastBundle forecast;
    std::vector<StartBounds> bounds;
};

// One power-flexible appliance, short day, tiny coefficient space.
TinyProblem tiny_problem() {
    TinyProblem p;
    p.sc.grid = {8, 1.0, "00:00"};
    p.sc.power_flexible = {{"c1", 0.0, 2.0, {1, 8}, 0.5, 1.2}};
    p.sc.battery = {1.0, 2.0, 1.0, 6.0, 3.0};
    p.sc.tariff.feed_in_rate = 0.01;
    p.sc.tariff.market_price = {0.1, 0.3, 0.5, 0.4, 0.2, 0.1, 0.3, 0.2};
    p.sc.renewable_true = std::vector<double>(8, 0.3);
    p.sc.inflexible_true = std::vector<double>(8, 0.5);

    p.basis = build_basis(0.5, 2, 3);
    p.ops = build_prediction(p.basis, make_state_space(1.0, 1.0, 1));
    p.set = build_feasible_set(p.sc, p.basis, p.ops,
                               Eigen::Vector2d(p.sc.battery.initial_energy, 0.0), 1);
    for (int m = 0; m < 3; ++m) {
        p.forecast.price.push_back(p.sc.tariff.market_price[m]);
        p.forecast.renewable.push_back(p.sc.renewable_true[m]);
        p.forecast.inflexible_load.push_back(p.sc.inflexible_true[m]);
    }
    return p;
}

FeasibleSet table2_set(LaguerreBasis& basis_out, const Scenario& sc) {
    basis_out = build_basis(0.8, 6, 10);
    const auto ops = build_prediction(
        basis_out, make_state_space(sc.battery.leakage_per_slot, 1.0,
                                    static_cast<int>(sc.power_flexible.size())));
    return build_feasible_set(sc, basis_out, ops,
                              Eigen::Vector2d(sc.battery.initial_energy, 0.0), 1);
}

ForecastBundle truth_forecast(const Scenario& sc, int t_now, int horizon) {
    ForecastBundle f;
    for (int m = 0; m < horizon; ++m) {
        f.price.push_back(sc.tariff.market_price[t_now - 1 + m]);
        f.renewable.push_back(sc.renewable_true[t_now - 1 + m]);
        f.inflexible_load.push_back(sc.inflexible_true[t_now - 1 + m]);
    }
    return f;
}

}  // namespace

TEST_CASE("dominance examples") {
    const std::vector<ObjectivePair> values = {{1, 2}, {2, 1}, {2, 2}};
    CHECK(nondominated_sort(values) == std::vector<int>{0, 0, 1});

    const std::vector<ObjectivePair> ties = {{1, 1}, {1, 1}, {1, 1}};
    CHECK(nondominated_sort(ties) == std::vector<int>{0, 0, 0});
}

TEST_CASE("sort agrees with the brute-force comparator") {
    RandomStream rng(60);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<ObjectivePair> values(200);
        for (auto& v : values) {
            v[0] = rng.uniform(0, 10);
            v[1] = rng.uniform(0, 10);
        }
        REQUIRE(nondominated_sort(values) == brute_force_ranks(values));
    }
}

TEST_CASE("crowding distance on hand-checked fronts") {
    const std::vector<ObjectivePair> collinear = {{0, 2}, {1, 1}, {2, 0}};
    const auto d = crowding_distance(collinear);
    CHECK(std::isinf(d[0]));
    CHECK(std::isinf(d[2]));
    CHECK(d[1] == doctest::Approx(2.0));

    const auto pair = crowding_distance({{0, 1}, {1, 0}});
    CHECK(std::isinf(pair[0]));
    CHECK(std::isinf(pair[1]));
}

TEST_CASE("crowding truncation keeps both extremes") {
    RandomStream rng(61);
    std::vector<ObjectivePair> front;
    for (int i = 0; i < 30; ++i) {
        const double x = rng.uniform(0, 1);
        front.push_back({x, 1.0 - x});
    }
    const auto d = crowding_distance(front);
    std::vector<int> order(front.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return d[a] > d[b]; });
    const auto extreme_lo =
        std::min_element(front.begin(), front.end()) - front.begin();
    const auto extreme_hi =
        std::max_element(front.begin(), front.end()) - front.begin();
    // Both extremes appear among any truncation of at least two members.
    CHECK((order[0] == extreme_lo || order[0] == extreme_hi));
    CHECK((order[1] == extreme_lo || order[1] == extreme_hi));
}

TEST_CASE("hypervolume of a staircase") {
    const std::vector<ObjectivePair> front = {{1, 3}, {2, 2}, {3, 1}};
    const ObjectivePair ref = {4, 4};
    // Rectangles: (4-1)(4-3) + (4-2)(3-2) + (4-3)(2-1) = 3 + 2 + 1.
    CHECK(hypervolume2d(front, ref) == doctest::Approx(6.0));
    // Points beyond the reference contribute nothing.
    CHECK(hypervolume2d({{5, 5}}, ref) == 0.0);
    // Dominated points do not change the volume.
    auto padded = front;
    padded.push_back({2.5, 2.5});
    CHECK(hypervolume2d(padded, ref) == doctest::Approx(6.0));
}

TEST_CASE("knee selection on hand-checked fronts") {
    CHECK(select_knee({{5, 7}}) == 0);
    CHECK(select_knee({{0, 1}, {1, 0}, {0.2, 0.2}}) == 2);

    // Positive rescaling of one objective leaves the knee unchanged.
    std::vector<ObjectivePair> front = {{1, 9}, {2, 4}, {4, 2}, {9, 1}};
    const int knee = select_knee(front);
    for (double scale : {0.01, 3.0, 1000.0}) {
        auto scaled = front;
        for (auto& p : scaled) p[1] *= scale;
        REQUIRE(select_knee(scaled) == knee);
    }
}

TEST_CASE("admissible start ranges track the clock and commitments") {
    const Scenario sc = test::table2_scenario();
    std::vector<std::optional<int>> committed(1);

    auto bounds = admissible_starts(sc, 1, committed);
    CHECK(bounds[0].lo == 11);  // requested start
    CHECK(bounds[0].hi == 22);  // latest start

    bounds = admissible_starts(sc, 15, committed);
    CHECK(bounds[0].lo == 15);  // horizon passed the request
    CHECK(bounds[0].hi == 22);

    committed[0] = 13;
    bounds = admissible_starts(sc, 20, committed);
    CHECK(bounds[0].lo == 13);
    CHECK(bounds[0].hi == 13);
}

TEST_CASE("initialization produces feasible members and reserve") {
    const Scenario sc = test::table2_scenario();
    LaguerreBasis basis;
    const auto set = table2_set(basis, sc);
    MoeaConfig config;
    config.population_size = 10;
    config.max_iterations = 0;
    const std::vector<StartBounds> bounds = {{11, 22}};

    RandomStream rng(62);
    const auto pop = initialize(set, config, bounds, rng);
    REQUIRE(pop.members.size() == 10);
    REQUIRE(pop.reserve.size() == 10);
    for (const auto& m : pop.members) {
        REQUIRE(is_feasible(set, m.eta).feasible);
        REQUIRE(m.starts.size() == 1);
        REQUIRE(m.starts[0] >= 11);
        REQUIRE(m.starts[0] <= 22);
    }
    for (const auto& r : pop.reserve) REQUIRE(is_feasible(set, r.eta).feasible);

    RandomStream rng_b(62);
    const auto again = initialize(set, config, bounds, rng_b);
    for (size_t i = 0; i < pop.members.size(); ++i) {
        REQUIRE(pop.members[i].starts == again.members[i].starts);
        REQUIRE((pop.members[i].eta - again.members[i].eta).norm() == 0.0);
    }
}

TEST_CASE("scenario without time-flexible appliances has empty start genes") {
    const auto p = tiny_problem();
    MoeaConfig config;
    config.population_size = 6;
    RandomStream rng(63);
    const auto pop = initialize(p.set, config, {}, rng);
    for (const auto& m : pop.members) CHECK(m.starts.empty());
}

TEST_CASE("crossover blends coefficients and redraws start times") {
    const Scenario sc = test::table2_scenario();
    LaguerreBasis basis;
    const auto set = table2_set(basis, sc);
    MoeaConfig config;
    config.population_size = 8;
    const std::vector<StartBounds> bounds = {{11, 22}};
    RandomStream rng(64);
    auto pop = initialize(set, config, bounds, rng);

    for (int trial = 0; trial < 200; ++trial) {
        const auto [a, b] = crossover(pop, bounds, rng);
        REQUIRE(is_feasible(set, a.eta).feasible);
        REQUIRE(is_feasible(set, b.eta).feasible);
        REQUIRE(a.starts[0] >= 11);
        REQUIRE(a.starts[0] <= 22);
        // The blend preserves the coefficient sum of the two parents.
        bool matched = false;
        for (const auto& p : pop.members) {
            for (const auto& q : pop.members) {
                if (((a.eta + b.eta) - (p.eta + q.eta)).norm() < 1e-9) matched = true;
            }
            for (const auto& q : pop.reserve) {
                if (((a.eta + b.eta) - (p.eta + q.eta)).norm() < 1e-9) matched = true;
            }
        }
        REQUIRE(matched);
    }

    // Identical parents blend to themselves for any mixing coefficient.
    Population clones;
    clones.members = {pop.members[0], pop.members[0]};
    const auto [c, d] = crossover(clones, bounds, rng);
    CHECK((c.eta - pop.members[0].eta).norm() < 1e-12);
    CHECK((d.eta - pop.members[0].eta).norm() < 1e-12);
}

TEST_CASE("mutation keeps the start genes and stays feasible") {
    const Scenario sc = test::table2_scenario();
    LaguerreBasis basis;
    const auto set = table2_set(basis, sc);
    MoeaConfig config;
    config.population_size = 8;
    const std::vector<StartBounds> bounds = {{11, 22}};
    RandomStream rng(65);
    auto pop = initialize(set, config, bounds, rng);

    int changed_eta = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const auto child = mutate(pop, set, trial + 1, rng);
        REQUIRE(is_feasible(set, child.eta).feasible);
        bool start_matches = false;
        bool eta_is_new = true;
        for (const auto& m : pop.members) {
            if (child.starts == m.starts) start_matches = true;
            if ((child.eta - m.eta).norm() == 0.0) eta_is_new = false;
        }
        REQUIRE(start_matches);
        if (eta_is_new) ++changed_eta;
    }
    CHECK(changed_eta > 900);
}

TEST_CASE("mutation draws both samplers about equally") {
    // The first stream draw selects the sampler; count the coin directly.
    RandomStream rng(66);
    int heads = 0;
    for (int i = 0; i < 1000; ++i)
        if (rng.coin()) ++heads;
    CHECK(heads > 450);
    CHECK(heads < 550);
}

TEST_CASE("degenerate evolve returns the initial non-dominated set") {
    const auto p = tiny_problem();
    MoeaConfig config;
    config.population_size = 12;
    config.max_iterations = 0;
    RandomStream rng(67);
    const auto result = evolve(p.sc, p.set, p.forecast, p.basis, config, p.bounds, 1, rng);
    REQUIRE(result.log.records.size() == 1);
    REQUIRE(!result.front.empty());
    // Archive equals the non-dominated subset of the evaluated members.
    CHECK(static_cast<int>(result.front.size()) == result.log.records[0].front_size);
    CHECK(result.feasibility_failures == 0);
    CHECK(result.evaluations == 12);
}

TEST_CASE("offspring counts follow the configured rates") {
    const auto p = tiny_problem();
    MoeaConfig config;
    config.population_size = 20;
    config.max_iterations = 3;
    config.crossover_rate = 0.2;
    config.mutation_rate = 0.8;
    RandomStream rng(68);
    const auto result = evolve(p.sc, p.set, p.forecast, p.basis, config, p.bounds, 1, rng);
    // 20 initial + 3 * (2 * ceil(4) + ceil(16)).
    CHECK(result.evaluations == 20 + 3 * (8 + 16));
}

TEST_CASE("evolve is deterministic, elitist, and hypervolume never decreases") {
    const auto p = tiny_problem();
    MoeaConfig config;
    config.population_size = 16;
    config.max_iterations = 40;
    RandomStream rng_a(69), rng_b(69);
    const auto a = evolve(p.sc, p.set, p.forecast, p.basis, config, p.bounds, 1, rng_a);
    const auto b = evolve(p.sc, p.set, p.forecast, p.basis, config, p.bounds, 1, rng_b);

    REQUIRE(a.front.size() == b.front.size());
    for (size_t i = 0; i < a.front.size(); ++i) {
        REQUIRE(a.front[i].objectives.cost == b.front[i].objectives.cost);
        REQUIRE((a.front[i].eta - b.front[i].eta).norm() == 0.0);
    }

    for (size_t g = 1; g < a.log.records.size(); ++g)
        REQUIRE(a.log.records[g].hypervolume >= a.log.records[g - 1].hypervolume - 1e-12);

    // Elitism: no member of a later front is dominated by an earlier front.
    for (size_t g = 1; g < a.log.fronts.size(); ++g)
        for (const auto& later : a.log.fronts[g])
            for (const auto& earlier : a.log.fronts[g - 1]) {
                const bool dominated = earlier[0] <= later[0] && earlier[1] <= later[1] &&
                                       (earlier[0] < later[0] || earlier[1] < later[1]);
                REQUIRE(!dominated);
            }

    CHECK(a.feasibility_failures == 0);
}

TEST_CASE("evolved front weakly dominates a large random-sampling reference") {
    const auto p = tiny_problem();
    MoeaConfig config;
    config.population_size = 20;
    config.max_iterations = 200;
    RandomStream rng(70);
    const auto result = evolve(p.sc, p.set, p.forecast, p.basis, config, p.bounds, 1, rng);

    // Reference front from one million random feasible samples.
    RandomStream sampler_rng(71);
    Eigen::VectorXd point = initial_point(p.set);
    ParetoArchive<int> reference;
    for (int i = 0; i < 1000000; ++i) {
        point = sampler_two(p.set, point, sampler_rng);
        const auto values = evaluate(p.sc, p.forecast, p.basis, {}, point, 1);
        reference.insert(values.cost, values.dissatisfaction, 0);
    }

    std::vector<ObjectivePair> evolved;
    for (const auto& c : result.front) evolved.push_back(c.pair());
    int covered = 0, total = 0;
    for (const auto& [cost, entry] : reference.entries()) {
        ++total;
        for (const auto& f : evolved)
            if (f[0] <= cost + 1e-9 && f[1] <= entry.dissatisfaction + 1e-9) {
                ++covered;
                break;
            }
    }
    CHECK(covered == total);
}
