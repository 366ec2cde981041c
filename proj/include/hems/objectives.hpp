#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "hems/domain.hpp"
#include "hems/laguerre.hpp"

namespace hems {

// Exogenous forecasts over the (clipped) horizon, one value per step.
struct ForecastBundle {
    std::vector<double> price;            // currency/kWh
    std::vector<double> renewable;        // kW
    std::vector<double> inflexible_load;  // kW
    int horizon() const { return static_cast<int>(price.size()); }
};

struct ObjectiveValues {
    double cost = 0.0;             // currency over the horizon
    double time_flex = 0.0;        // delay discomfort
    double power_flex = 0.0;       // Taguchi loss
    double dissatisfaction = 0.0;  // time_flex + power_flex
};

// Horizon energy cost with feed-in switching. controls_dev is the deviation
// control matrix from reconstruct_controls, clipped to the forecast horizon:
// row 0 = battery power, row 1+c = deviation of appliance c from nominal.
// Import slots are billed at the forecast market price, exports earn the
// feed-in rate.
double evaluate_cost(const Scenario& scenario, const ForecastBundle& forecast,
                     const Eigen::MatrixXd& controls_dev, std::span<const int> starts, int t_now);

struct DissatisfactionParts {
    double time_flex = 0.0;
    double power_flex = 0.0;
    double total = 0.0;
};

// Delay discomfort plus Taguchi loss over the horizon. Power deviations count
// only on slots where the appliance is active.
DissatisfactionParts evaluate_dissatisfaction(const Scenario& scenario,
                                              const Eigen::MatrixXd& controls_dev,
                                              std::span<const int> starts, int t_now);

// Full evaluation of a candidate plan (start times + Laguerre coefficients).
ObjectiveValues evaluate(const Scenario& scenario, const ForecastBundle& forecast,
                         const LaguerreBasis& basis, std::span<const int> starts,
                         const Eigen::VectorXd& eta, int t_now);

}  // namespace hems
