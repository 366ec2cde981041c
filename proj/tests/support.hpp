#pragma once

#include <cmath>
#include <vector>

#include "hems/domain.hpp"
#include "hems/random.hpp"

namespace hems::test {

// The six-appliance household used throughout the tests, paired with the
// bundled synthetic day series.
inline Scenario table2_scenario() {
    Scenario sc;
    sc.grid = {24, 1.0, "08:00"};
    sc.inflexible = {
        {"a1", 0.2, {{1, 24}}},
        {"a2", 1.2, {{24, 24}}},
        {"a3", 1.2, {{1, 1}, {10, 10}, {13, 13}}},
    };
    sc.time_flexible = {{"b1", 0.7, {11, 23}, 2, 11, 0.001, 3.0}};
    sc.power_flexible = {
        {"c1", 0.2, 0.8, {11, 16}, 1.0, 0.8},
        {"c2", 0.0, 1.4, {1, 24}, 0.4, 1.4},
    };
    sc.battery = {std::pow(0.9, 1.0 / 24.0), 3.0, 3.0, 10.0, 4.0};

    sc.tariff.feed_in_rate = 0.05;
    sc.tariff.market_price.resize(24);
    sc.renewable_true.resize(24);
    for (int t = 1; t <= 24; ++t) {
        sc.tariff.market_price[t - 1] = 0.20 + 0.13 * std::cos(2.0 * M_PI * (t - 6) / 24.0);
        sc.renewable_true[t - 1] =
            t <= 13 ? 1.8 * std::exp(-std::pow((t - 5.5) / 3.2, 2.0)) : 0.0;
    }
    sc.inflexible_true = appliance_base_load(sc);
    return sc;
}

// Small random household for property tests. Invariant-correct by
// construction.
inline Scenario random_scenario(RandomStream& rng) {
    Scenario sc;
    const int slots = rng.uniform_int(6, 30);
    sc.grid = {slots, rng.coin() ? 1.0 : 0.5, "00:00"};

    const int n_inflex = rng.uniform_int(0, 3);
    for (int i = 0; i < n_inflex; ++i) {
        InflexibleAppliance app;
        app.name = "a" + std::to_string(i + 1);
        app.rated_power = rng.uniform(0.0, 2.0);
        const int first = rng.uniform_int(1, slots);
        app.windows.push_back({first, rng.uniform_int(first, slots)});
        sc.inflexible.push_back(app);
    }
    const int n_tf = rng.uniform_int(0, 2);
    for (int i = 0; i < n_tf; ++i) {
        TimeFlexibleAppliance app;
        app.name = "b" + std::to_string(i + 1);
        app.rated_power = rng.uniform(0.1, 1.5);
        const int duration = rng.uniform_int(1, std::max(1, slots / 3));
        const int first = rng.uniform_int(1, slots - duration + 1);
        const int last = rng.uniform_int(first + duration - 1, slots);
        app.window = {first, last};
        app.duration = duration;
        app.requested_start = rng.uniform_int(first, last - duration + 1);
        app.discomfort_weight = rng.uniform(0.0, 0.01);
        app.delay_exponent = rng.uniform(1.0, 3.0);
        sc.time_flexible.push_back(app);
    }
    const int n_pf = rng.uniform_int(0, 2);
    for (int i = 0; i < n_pf; ++i) {
        PowerFlexibleAppliance app;
        app.name = "c" + std::to_string(i + 1);
        app.min_power = rng.uniform(0.0, 0.5);
        app.max_power = app.min_power + rng.uniform(0.2, 1.5);
        app.nominal_power = rng.uniform(app.min_power, app.max_power);
        const int first = rng.uniform_int(1, slots);
        app.window = {first, rng.uniform_int(first, slots)};
        app.discomfort_weight = rng.uniform(0.0, 2.0);
        sc.power_flexible.push_back(app);
    }

    sc.battery.leakage_per_slot = rng.coin() ? 1.0 : rng.uniform(0.994, 1.0);
    sc.battery.max_rate = rng.uniform(1.0, 4.0);
    sc.battery.capacity_min = rng.uniform(0.0, 3.0);
    sc.battery.capacity_max = sc.battery.capacity_min + rng.uniform(3.0, 8.0);
    // Leave coasting room so eta = 0 stays feasible over any tested horizon.
    sc.battery.initial_energy =
        std::min(sc.battery.capacity_max,
                 sc.battery.capacity_min / std::pow(sc.battery.leakage_per_slot, slots) +
                     rng.uniform(0.3, 2.0));

    sc.tariff.feed_in_rate = 0.02;
    for (int t = 0; t < slots; ++t) {
        sc.tariff.market_price.push_back(rng.uniform(0.05, 0.4));
        sc.renewable_true.push_back(rng.uniform(0.0, 2.0));
    }
    sc.inflexible_true = appliance_base_load(sc);
    return sc;
}

}  // namespace hems::test
