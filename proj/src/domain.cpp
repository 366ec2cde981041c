#include "hems/domain.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "hems/errors.hpp"

namespace hems {

double per_slot_retention(double daily_retention, double slot_hours) {
    if (daily_retention <= 0.0 || daily_retention > 1.0)
        throw std::invalid_argument("daily retention must lie in (0, 1]");
    if (slot_hours <= 0.0) throw std::invalid_argument("slot duration must be positive");
    return std::pow(daily_retention, slot_hours / 24.0);
}

namespace {

void check_window(std::vector<std::string>& out, const std::string& owner, const SlotWindow& w,
                  int slot_count) {
    if (w.first < 1 || w.last > slot_count || w.first > w.last) {
        std::ostringstream msg;
        msg << owner << ": window [" << w.first << ", " << w.last << "] outside grid 1.."
            << slot_count;
        out.push_back(msg.str());
    }
}

void check_series(std::vector<std::string>& out, const std::string& name, size_t size,
                  int slot_count) {
    if (static_cast<int>(size) != slot_count) {
        std::ostringstream msg;
        msg << name << ": series length " << size << " != slot_count " << slot_count;
        out.push_back(msg.str());
    }
}

}  // namespace

std::vector<std::string> validate(const Scenario& sc) {
    std::vector<std::string> out;
    const int n = sc.grid.slot_count;

    if (n < 1) out.push_back("grid: slot_count must be >= 1");
    if (sc.grid.slot_duration_hours <= 0.0) out.push_back("grid: slot_duration must be > 0");

    for (const auto& a : sc.inflexible) {
        if (a.rated_power < 0) out.push_back(a.name + ": rated_power must be >= 0");
        if (a.windows.empty()) out.push_back(a.name + ": needs at least one window");
        for (const auto& w : a.windows) check_window(out, a.name, w, n);
        for (size_t i = 0; i < a.windows.size(); ++i)
            for (size_t j = i + 1; j < a.windows.size(); ++j)
                if (a.windows[i].first <= a.windows[j].last &&
                    a.windows[j].first <= a.windows[i].last)
                    out.push_back(a.name + ": windows overlap");
    }

    for (const auto& b : sc.time_flexible) {
        if (b.rated_power < 0) out.push_back(b.name + ": rated_power must be >= 0");
        check_window(out, b.name, b.window, n);
        if (b.duration < 1) out.push_back(b.name + ": duration must be >= 1");
        if (b.window.first + b.duration - 1 > b.window.last)
            out.push_back(b.name + ": no valid start exists (window shorter than duration)");
        if (b.requested_start < b.window.first || b.requested_start > b.latest_start())
            out.push_back(b.name + ": requested_start outside admissible range");
        if (b.discomfort_weight < 0) out.push_back(b.name + ": discomfort_weight must be >= 0");
        if (b.delay_exponent < 1.0) out.push_back(b.name + ": delay_exponent must be >= 1");
    }

    for (const auto& c : sc.power_flexible) {
        if (c.min_power < 0) out.push_back(c.name + ": min_power must be >= 0");
        if (c.min_power > c.max_power) out.push_back(c.name + ": min_power exceeds max_power");
        if (c.nominal_power < c.min_power || c.nominal_power > c.max_power)
            out.push_back(c.name + ": nominal_power outside [min_power, max_power]");
        check_window(out, c.name, c.window, n);
        if (c.discomfort_weight < 0) out.push_back(c.name + ": discomfort_weight must be >= 0");
    }

    const auto& bat = sc.battery;
    if (bat.leakage_per_slot <= 0.0 || bat.leakage_per_slot > 1.0)
        out.push_back("battery: leakage_per_slot must lie in (0, 1]");
    if (bat.max_rate < 0) out.push_back("battery: max_rate must be >= 0");
    if (bat.capacity_min < 0) out.push_back("battery: capacity_min must be >= 0");
    if (bat.capacity_min > bat.capacity_max)
        out.push_back("battery: capacity_min exceeds capacity_max");
    if (bat.initial_energy < bat.capacity_min || bat.initial_energy > bat.capacity_max)
        out.push_back("battery: initial_energy outside [capacity_min, capacity_max]");

    check_series(out, "tariff.market_price", sc.tariff.market_price.size(), n);
    check_series(out, "renewable", sc.renewable_true.size(), n);
    check_series(out, "inflexible load", sc.inflexible_true.size(), n);

    double min_price = std::numeric_limits<double>::infinity();
    for (double p : sc.tariff.market_price) {
        if (p < 0) out.push_back("tariff: market prices must be >= 0");
        min_price = std::min(min_price, p);
    }
    if (sc.tariff.feed_in_rate < 0) out.push_back("tariff: feed_in_rate must be >= 0");
    if (!sc.tariff.market_price.empty() && sc.tariff.feed_in_rate > min_price)
        out.push_back("tariff: feed_in_rate must not exceed the minimum market price");
    for (double r : sc.renewable_true)
        if (r < 0) out.push_back("renewable: values must be >= 0");

    return out;
}

void validate_or_throw(const Scenario& sc) {
    auto issues = validate(sc);
    if (issues.empty()) return;
    std::ostringstream msg;
    msg << "scenario invalid (" << issues.size() << " issue(s)):";
    for (const auto& s : issues) msg << "\n  - " << s;
    throw ValidationError(msg.str());
}

std::vector<double> appliance_base_load(const Scenario& sc) {
    std::vector<double> load(static_cast<size_t>(sc.grid.slot_count), 0.0);
    for (int t = 1; t <= sc.grid.slot_count; ++t) load[t - 1] = inflexible_load(sc, t);
    return load;
}

double inflexible_load(const Scenario& sc, int slot) {
    if (slot < 1 || slot > sc.grid.slot_count)
        throw std::out_of_range("inflexible_load: slot outside grid");
    double total = 0.0;
    for (const auto& a : sc.inflexible)
        if (a.active_at(slot)) total += a.rated_power;
    return total;
}

double time_flexible_load(std::span<const TimeFlexibleAppliance> appliances,
                          std::span<const int> starts, int slot) {
    if (appliances.size() != starts.size())
        throw std::invalid_argument("time_flexible_load: one start per appliance required");
    double total = 0.0;
    for (size_t i = 0; i < appliances.size(); ++i) {
        const auto& b = appliances[i];
        if (starts[i] < b.window.first || starts[i] > b.latest_start())
            throw ConstraintViolation(b.name + ": start " + std::to_string(starts[i]) +
                                      " outside admissible range [" +
                                      std::to_string(b.window.first) + ", " +
                                      std::to_string(b.latest_start()) + "]");
        if (b.runs_at(starts[i], slot)) total += b.rated_power;
    }
    return total;
}

double total_consumption(const Scenario& sc, std::span<const int> starts,
                         const Eigen::MatrixXd& flexible_powers, int slot) {
    if (flexible_powers.rows() != static_cast<Eigen::Index>(sc.power_flexible.size()) ||
        flexible_powers.cols() != sc.grid.slot_count)
        throw std::invalid_argument("total_consumption: flexible power matrix has wrong shape");
    double total = inflexible_load(sc, slot) +
                   time_flexible_load(sc.time_flexible, starts, slot);
    for (size_t c = 0; c < sc.power_flexible.size(); ++c)
        if (sc.power_flexible[c].active_at(slot))
            total += flexible_powers(static_cast<Eigen::Index>(c), slot - 1);
    return total;
}

double grid_exchange(double p_con, double p_storage, double p_renewable) noexcept {
    return p_con + p_storage - p_renewable;
}

double step_battery(double energy, double p_storage, const Battery& battery, double dt) {
    const double tol = 1e-9 * std::max(1.0, battery.max_rate);
    if (std::abs(p_storage) > battery.max_rate + tol)
        throw ConstraintViolation("step_battery: |" + std::to_string(p_storage) +
                                  "| kW exceeds max_rate " + std::to_string(battery.max_rate));
    return battery.leakage_per_slot * energy + p_storage * dt;
}

}  // namespace hems
