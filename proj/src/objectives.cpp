#include "hems/objectives.hpp"

#include <cmath>
#include <stdexcept>

#include "hems/errors.hpp"

namespace hems {

namespace {

void check_dimensions(const Scenario& sc, const Eigen::MatrixXd& controls, int horizon,
                      std::span<const int> starts, int t_now) {
    const int flex = static_cast<int>(sc.power_flexible.size());
    if (controls.rows() != 1 + flex)
        throw std::invalid_argument("controls must have one row per signal (1 + flexible count)");
    if (controls.cols() != horizon)
        throw std::invalid_argument("controls and forecast horizons differ");
    if (starts.size() != sc.time_flexible.size())
        throw std::invalid_argument("one start time per time-flexible appliance required");
    if (t_now < 1 || t_now + horizon - 1 > sc.grid.slot_count)
        throw std::out_of_range("horizon extends past the end of the grid");
}

}  // namespace

double evaluate_cost(const Scenario& sc, const ForecastBundle& forecast,
                     const Eigen::MatrixXd& controls_dev, std::span<const int> starts,
                     int t_now) {
    const int horizon = forecast.horizon();
    if (static_cast<int>(forecast.renewable.size()) != horizon ||
        static_cast<int>(forecast.inflexible_load.size()) != horizon)
        throw std::invalid_argument("forecast series have inconsistent lengths");
    check_dimensions(sc, controls_dev, horizon, starts, t_now);

    const double dt = sc.grid.slot_duration_hours;
    double cost = 0.0;
    for (int m = 0; m < horizon; ++m) {
        const int slot = t_now + m;
        double p_con = forecast.inflexible_load[m] +
                       time_flexible_load(sc.time_flexible, starts, slot);
        for (size_t c = 0; c < sc.power_flexible.size(); ++c) {
            const auto& app = sc.power_flexible[c];
            if (app.active_at(slot))
                p_con += app.nominal_power + controls_dev(static_cast<Eigen::Index>(1 + c), m);
        }
        const double p_total = grid_exchange(p_con, controls_dev(0, m), forecast.renewable[m]);
        const double rate = p_total > 0.0 ? forecast.price[m] : sc.tariff.feed_in_rate;
        cost += rate * p_total * dt;
    }
    return cost;
}

DissatisfactionParts evaluate_dissatisfaction(const Scenario& sc,
                                              const Eigen::MatrixXd& controls_dev,
                                              std::span<const int> starts, int t_now) {
    const int horizon = static_cast<int>(controls_dev.cols());
    check_dimensions(sc, controls_dev, horizon, starts, t_now);

    DissatisfactionParts parts;
    for (size_t b = 0; b < sc.time_flexible.size(); ++b) {
        const auto& app = sc.time_flexible[b];
        const int delay = starts[b] - app.requested_start;
        if (delay < 0)
            throw ConstraintViolation(app.name + ": start precedes the requested slot");
        parts.time_flex += app.discomfort_weight *
                           std::pow(static_cast<double>(delay), app.delay_exponent);
    }
    for (int m = 0; m < horizon; ++m) {
        const int slot = t_now + m;
        for (size_t c = 0; c < sc.power_flexible.size(); ++c) {
            const auto& app = sc.power_flexible[c];
            if (!app.active_at(slot)) continue;
            const double dev = controls_dev(static_cast<Eigen::Index>(1 + c), m);
            parts.power_flex += app.discomfort_weight * dev * dev;
        }
    }
    parts.total = parts.time_flex + parts.power_flex;
    return parts;
}

ObjectiveValues evaluate(const Scenario& sc, const ForecastBundle& forecast,
                         const LaguerreBasis& basis, std::span<const int> starts,
                         const Eigen::VectorXd& eta, int t_now) {
    const int horizon = forecast.horizon();
    if (horizon > basis.horizon)
        throw std::invalid_argument("forecast horizon exceeds the basis horizon");
    const int flex = static_cast<int>(sc.power_flexible.size());
    const Eigen::MatrixXd controls =
        reconstruct_controls(basis, eta, flex).leftCols(horizon);

    ObjectiveValues values;
    values.cost = evaluate_cost(sc, forecast, controls, starts, t_now);
    const auto parts = evaluate_dissatisfaction(sc, controls, starts, t_now);
    values.time_flex = parts.time_flex;
    values.power_flex = parts.power_flex;
    values.dissatisfaction = parts.total;
    return values;
}

}  // namespace hems
