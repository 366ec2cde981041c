#include "hems/reports.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

namespace hems {

std::string format_number(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.10g", value);
    return buffer;
}

void write_schedule_csv(std::ostream& os, const Scenario& sc, const SimulationTrace& trace) {
    os << "slot,price_true,price_forecast_t0,renewable,inflexible_load,battery_power,"
          "battery_energy";
    for (const auto& app : sc.power_flexible) os << ",power_" << app.name;
    os << ",p_total,slot_cost\n";
    for (const auto& row : trace.slots) {
        os << row.slot << ',' << format_number(row.price_true) << ','
           << format_number(row.price_forecast_t0) << ',' << format_number(row.renewable) << ','
           << format_number(row.inflexible_load) << ',' << format_number(row.battery_power) << ','
           << format_number(row.battery_energy);
        for (double p : row.appliance_power) os << ',' << format_number(p);
        os << ',' << format_number(row.p_total) << ',' << format_number(row.slot_cost) << '\n';
    }
}

void write_pareto_csv(std::ostream& os, const std::vector<ObjectivePair>& front, int knee) {
    os << "cost,dissatisfaction,knee\n";
    for (size_t i = 0; i < front.size(); ++i)
        os << format_number(front[i][0]) << ',' << format_number(front[i][1]) << ','
           << (static_cast<int>(i) == knee ? 1 : 0) << '\n';
}

void write_convergence_csv(std::ostream& os, const std::string& solver,
                           const std::vector<ConvergenceRow>& rows) {
    os << "solver,slot,generation,front_size,ideal_cost,ideal_dissatisfaction,"
          "nadir_cost,nadir_dissatisfaction,manhattan,hypervolume\n";
    for (const auto& row : rows) {
        for (const auto& rec : row.log->records) {
            os << solver << ',' << row.slot << ',' << rec.generation << ',' << rec.front_size
               << ',' << format_number(rec.ideal[0]) << ',' << format_number(rec.ideal[1]) << ','
               << format_number(rec.nadir[0]) << ',' << format_number(rec.nadir[1]) << ','
               << format_number(rec.manhattan) << ',' << format_number(rec.hypervolume) << '\n';
        }
    }
}

}  // namespace hems
