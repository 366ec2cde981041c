#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "hems/domain.hpp"
#include "hems/laguerre.hpp"

namespace hems {

struct RowLabel {
    enum class Kind { RateUpper, RateLower, ApplianceUpper, ApplianceLower, EnergyUpper, EnergyLower };
    Kind kind = Kind::RateUpper;
    // Rate/appliance rows carry the horizon offset m of the control they
    // bound; energy rows carry the predicted slot index (m+1).
    int step = 0;
    int appliance = 0;  // 1-based index into the power-flexible list
    std::string str() const;
};

// Stacked linear system A * eta <= b describing every feasible coefficient
// vector for one solve: battery rate bounds, window-masked appliance bounds,
// and predicted battery energy bounds over the horizon.
struct FeasibleSet {
    Eigen::MatrixXd A;
    Eigen::VectorXd b;
    std::vector<RowLabel> labels;
    double tolerance = 1e-9;
    // Per-coordinate half-widths of the heuristic sampling box used by the
    // random-direction sampler; empty means "use the step cap".
    Eigen::VectorXd sample_halfwidth;

    Eigen::Index rows() const { return A.rows(); }
    Eigen::Index dim() const { return A.cols(); }
};

// Builds the feasible set for state x0 = [battery energy, cumulative power]
// at slot t_now. The horizon is clipped at the end of the day. Throws
// InfeasibleScenario when eta = 0 violates a row.
FeasibleSet build_feasible_set(const Scenario& scenario, const LaguerreBasis& basis,
                               const PredictionOperators& ops, const Eigen::Vector2d& x0,
                               int t_now);

// Same, with per-step lower bounds on the predicted battery energy:
// energy_floor[m] replaces capacity_min in the row for E(t_now + m + 1).
// The receding-horizon loop passes sustain floors here so that every state
// it can reach keeps eta = 0 feasible at the next solve.
FeasibleSet build_feasible_set(const Scenario& scenario, const LaguerreBasis& basis,
                               const PredictionOperators& ops, const Eigen::Vector2d& x0,
                               int t_now, std::span<const double> energy_floor);

struct FeasibilityReport {
    bool feasible = true;
    int worst_row = -1;
    double worst_violation = 0.0;  // max(A*eta - b), negative when interior
    std::string worst_label() const { return label; }
    std::string label;
};

FeasibilityReport is_feasible(const FeasibleSet& set, const Eigen::VectorXd& eta);

// b - A*eta; all entries >= -tolerance for feasible eta.
Eigen::VectorXd row_slacks(const FeasibleSet& set, const Eigen::VectorXd& eta);

// Debug dump, one row per constraint: label, coefficients, bound.
void write_feasible_set_csv(const FeasibleSet& set, std::ostream& os);

}  // namespace hems
