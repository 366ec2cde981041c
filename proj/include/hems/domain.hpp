#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace hems {

// Slots are 1-based everywhere in public interfaces, matching the external
// file formats (slot 1 = first interval of the day).

struct TimeGrid {
    int slot_count = 24;
    double slot_duration_hours = 1.0;
    std::string origin_label = "08:00";
};

struct SlotWindow {
    int first = 1;
    int last = 1;  // inclusive
    bool contains(int slot) const { return slot >= first && slot <= last; }
};

struct InflexibleAppliance {
    std::string name;
    double rated_power = 0.0;  // kW
    std::vector<SlotWindow> windows;
    bool active_at(int slot) const {
        for (const auto& w : windows)
            if (w.contains(slot)) return true;
        return false;
    }
};

struct TimeFlexibleAppliance {
    std::string name;
    double rated_power = 0.0;  // kW
    SlotWindow window;
    int duration = 1;  // consecutive slots once started
    int requested_start = 1;
    double discomfort_weight = 0.0;
    double delay_exponent = 1.0;

    int latest_start() const { return window.last - duration + 1; }
    bool runs_at(int start, int slot) const { return slot >= start && slot < start + duration; }
};

struct PowerFlexibleAppliance {
    std::string name;
    double min_power = 0.0;  // kW
    double max_power = 0.0;
    SlotWindow window;
    double discomfort_weight = 0.0;  // 1/kW^2
    double nominal_power = 0.0;      // kW, the comfort target
    bool active_at(int slot) const { return window.contains(slot); }
};

struct Battery {
    double leakage_per_slot = 1.0;  // retention factor per slot, in (0, 1]
    double max_rate = 0.0;          // kW, charge/discharge limit (0 disables the battery)
    double capacity_min = 0.0;      // kWh
    double capacity_max = 0.0;
    double initial_energy = 0.0;
};

struct Tariff {
    std::vector<double> market_price;  // currency/kWh, one entry per slot
    double feed_in_rate = 0.0;         // currency/kWh paid for exports
};

// A full household instance: appliances, battery, tariff, and the true
// exogenous series the simulator perturbs into forecasts.
struct Scenario {
    TimeGrid grid;
    std::vector<InflexibleAppliance> inflexible;
    std::vector<TimeFlexibleAppliance> time_flexible;
    std::vector<PowerFlexibleAppliance> power_flexible;
    Battery battery;
    Tariff tariff;
    std::vector<double> renewable_true;   // kW per slot
    std::vector<double> inflexible_true;  // kW per slot, base load used by the simulator
    std::string notes;
};

// Converts a whole-day retention factor (e.g. 0.9) into the per-slot factor.
double per_slot_retention(double daily_retention, double slot_hours);

// All invariant violations, empty when the scenario is sound.
std::vector<std::string> validate(const Scenario& scenario);
// Throws ValidationError listing every violation.
void validate_or_throw(const Scenario& scenario);

// Base load implied by the inflexible appliance list, one value per slot.
std::vector<double> appliance_base_load(const Scenario& scenario);

// Sum of inflexible appliance power at a slot.
double inflexible_load(const Scenario& scenario, int slot);

// Sum of time-flexible appliance power at a slot given each appliance's
// start; starts must lie in [window.first, latest_start()].
double time_flexible_load(std::span<const TimeFlexibleAppliance> appliances,
                          std::span<const int> starts, int slot);

// Total appliance consumption at a slot. flexible_powers is one row per
// power-flexible appliance and one column per grid slot (absolute kW);
// entries outside an appliance's window are masked out.
double total_consumption(const Scenario& scenario, std::span<const int> starts,
                         const Eigen::MatrixXd& flexible_powers, int slot);

// Net grid draw: consumption plus battery charging minus renewable supply.
// Negative values are exports.
double grid_exchange(double p_con, double p_storage, double p_renewable) noexcept;

// One step of the storage dynamics: E' = rho * E + P * dt. Capacity bounds
// are the caller's responsibility; the rate bound is enforced here.
double step_battery(double energy, double p_storage, const Battery& battery, double dt);

}  // namespace hems
