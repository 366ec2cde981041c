#include "hems/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "hems/errors.hpp"

namespace hems {

namespace {

using nlohmann::json;

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open file: " + path);
    try {
        return json::parse(in, nullptr, true, true);  // allow comments
    } catch (const json::parse_error& e) {
        throw ValidationError(path + ": " + e.what());
    }
}

double get_number(const json& j, const std::string& key, const std::string& context) {
    if (!j.contains(key))
        throw ValidationError(context + ": missing field '" + key + "'");
    if (!j[key].is_number())
        throw ValidationError(context + ": field '" + key + "' must be a number");
    return j[key].get<double>();
}

int get_int(const json& j, const std::string& key, const std::string& context) {
    if (!j.contains(key))
        throw ValidationError(context + ": missing field '" + key + "'");
    if (!j[key].is_number_integer())
        throw ValidationError(context + ": field '" + key + "' must be an integer");
    return j[key].get<int>();
}

SlotWindow get_window(const json& j, const std::string& key, const std::string& context) {
    if (!j.contains(key) || !j[key].is_array() || j[key].size() != 2)
        throw ValidationError(context + ": field '" + key + "' must be a [first, last] pair");
    return {j[key][0].get<int>(), j[key][1].get<int>()};
}

std::string get_name(const json& j, const std::string& fallback) {
    return j.contains("name") ? j["name"].get<std::string>() : fallback;
}

void parse_series_csv(const std::string& path, int slot_count, std::vector<double>& price,
                      std::vector<double>& solar, std::vector<double>& load) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open series file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw ValidationError(path + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "slot,price,solar,load")
        throw ValidationError(path + ": header must be 'slot,price,solar,load', got '" + line + "'");

    price.assign(slot_count, 0.0);
    solar.assign(slot_count, 0.0);
    load.assign(slot_count, 0.0);
    int expected = 1;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string cell;
        double values[4];
        for (int k = 0; k < 4; ++k) {
            if (!std::getline(row, cell, ',')) {
                std::ostringstream msg;
                msg << path << ":" << line_no << ": expected 4 columns";
                throw ValidationError(msg.str());
            }
            try {
                values[k] = std::stod(cell);
            } catch (const std::exception&) {
                std::ostringstream msg;
                msg << path << ":" << line_no << ": cannot parse '" << cell << "'";
                throw ValidationError(msg.str());
            }
        }
        const int slot = static_cast<int>(values[0]);
        if (slot != expected) {
            std::ostringstream msg;
            msg << path << ":" << line_no << ": expected slot " << expected << ", got " << slot;
            throw ValidationError(msg.str());
        }
        price[slot - 1] = values[1];
        solar[slot - 1] = values[2];
        load[slot - 1] = values[3];
        ++expected;
    }
    if (expected != slot_count + 1) {
        std::ostringstream msg;
        msg << path << ": expected " << slot_count << " rows, got " << expected - 1;
        throw ValidationError(msg.str());
    }
}

}  // namespace

Scenario load_scenario(const std::string& scenario_path, const std::string& series_path) {
    const json root = load_json(scenario_path);
    Scenario sc;

    if (root.contains("grid")) {
        const auto& g = root["grid"];
        sc.grid.slot_count = get_int(g, "slot_count", "grid");
        sc.grid.slot_duration_hours = get_number(g, "slot_duration_hours", "grid");
        if (g.contains("origin_label")) sc.grid.origin_label = g["origin_label"].get<std::string>();
    }

    int index = 0;
    for (const auto& a : root.value("inflexible", json::array())) {
        InflexibleAppliance app;
        app.name = get_name(a, "a" + std::to_string(++index));
        app.rated_power = get_number(a, "rated_power", app.name);
        if (a.contains("windows")) {
            for (const auto& w : a["windows"]) {
                if (!w.is_array() || w.size() != 2)
                    throw ValidationError(app.name + ": each window must be a [first, last] pair");
                app.windows.push_back({w[0].get<int>(), w[1].get<int>()});
            }
        } else {
            app.windows.push_back(get_window(a, "window", app.name));
        }
        sc.inflexible.push_back(std::move(app));
    }

    index = 0;
    for (const auto& b : root.value("time_flexible", json::array())) {
        TimeFlexibleAppliance app;
        app.name = get_name(b, "b" + std::to_string(++index));
        app.rated_power = get_number(b, "rated_power", app.name);
        app.window = get_window(b, "window", app.name);
        app.duration = get_int(b, "duration", app.name);
        app.requested_start = get_int(b, "requested_start", app.name);
        app.discomfort_weight = get_number(b, "discomfort_weight", app.name);
        app.delay_exponent = get_number(b, "delay_exponent", app.name);
        sc.time_flexible.push_back(std::move(app));
    }

    index = 0;
    for (const auto& c : root.value("power_flexible", json::array())) {
        PowerFlexibleAppliance app;
        app.name = get_name(c, "c" + std::to_string(++index));
        app.min_power = get_number(c, "min_power", app.name);
        app.max_power = get_number(c, "max_power", app.name);
        app.window = get_window(c, "window", app.name);
        app.discomfort_weight = get_number(c, "discomfort_weight", app.name);
        app.nominal_power = get_number(c, "nominal_power", app.name);
        sc.power_flexible.push_back(std::move(app));
    }

    if (!root.contains("battery")) throw ValidationError(scenario_path + ": missing 'battery'");
    {
        const auto& b = root["battery"];
        const double retention = get_number(b, "daily_retention", "battery");
        sc.battery.leakage_per_slot = per_slot_retention(retention, sc.grid.slot_duration_hours);
        sc.battery.max_rate = get_number(b, "max_rate", "battery");
        sc.battery.capacity_min = get_number(b, "capacity_min", "battery");
        sc.battery.capacity_max = get_number(b, "capacity_max", "battery");
        sc.battery.initial_energy = get_number(b, "initial_energy", "battery");
    }

    if (!root.contains("tariff")) throw ValidationError(scenario_path + ": missing 'tariff'");
    sc.tariff.feed_in_rate = get_number(root["tariff"], "feed_in_rate", "tariff");

    if (root.contains("notes")) sc.notes = root["notes"].get<std::string>();

    parse_series_csv(series_path, sc.grid.slot_count, sc.tariff.market_price, sc.renewable_true,
                     sc.inflexible_true);

    validate_or_throw(sc);
    return sc;
}

ErrorProfile load_error_profile(const std::string& spec) {
    ErrorProfile profile;
    if (spec == "none" || spec.empty()) return profile;
    const json root = load_json(spec);
    auto read = [&](const char* key) {
        SeriesErrorSpec s;
        if (root.contains(key)) {
            s.base_fraction = get_number(root[key], "base_fraction", key);
            s.growth_per_step = get_number(root[key], "growth_per_step", key);
            if (s.base_fraction < 0 || s.growth_per_step < 0)
                throw ValidationError(std::string(key) + ": error fractions must be >= 0");
        }
        return s;
    };
    profile.price = read("price");
    profile.renewable = read("renewable");
    profile.load = read("load");
    return profile;
}

}  // namespace hems
