#include "hems/constraints.hpp"

#include <cmath>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "hems/errors.hpp"

namespace hems {

std::string RowLabel::str() const {
    std::ostringstream os;
    switch (kind) {
        case Kind::RateUpper: os << "rate-upper(" << step << ")"; break;
        case Kind::RateLower: os << "rate-lower(" << step << ")"; break;
        case Kind::ApplianceUpper: os << "appliance-upper(" << appliance << "," << step << ")"; break;
        case Kind::ApplianceLower: os << "appliance-lower(" << appliance << "," << step << ")"; break;
        case Kind::EnergyUpper: os << "energy-upper(" << step << ")"; break;
        case Kind::EnergyLower: os << "energy-lower(" << step << ")"; break;
    }
    return os.str();
}

FeasibleSet build_feasible_set(const Scenario& sc, const LaguerreBasis& basis,
                               const PredictionOperators& ops, const Eigen::Vector2d& x0,
                               int t_now) {
    return build_feasible_set(sc, basis, ops, x0, t_now, {});
}

FeasibleSet build_feasible_set(const Scenario& sc, const LaguerreBasis& basis,
                               const PredictionOperators& ops, const Eigen::Vector2d& x0,
                               int t_now, std::span<const double> energy_floor) {
    if (t_now < 1 || t_now > sc.grid.slot_count)
        throw std::out_of_range("build_feasible_set: t_now outside grid");
    const auto& bat = sc.battery;
    if (x0(0) < bat.capacity_min - 1e-9 || x0(0) > bat.capacity_max + 1e-9)
        throw ConstraintViolation("build_feasible_set: battery energy outside capacity bounds");
    const int flex = static_cast<int>(sc.power_flexible.size());
    if (ops.flexible_count != flex || ops.order != basis.order)
        throw std::invalid_argument("build_feasible_set: operators do not match scenario/basis");

    const int steps = std::min(basis.horizon, sc.grid.slot_count - t_now + 1);
    const int dim = (1 + flex) * basis.order;
    if (!energy_floor.empty() && static_cast<int>(energy_floor.size()) < steps)
        throw std::invalid_argument("build_feasible_set: energy_floor shorter than the horizon");

    int row_count = 0;
    for (int m = 0; m < steps; ++m) {
        row_count += 4;  // two rate rows, two energy rows
        for (const auto& c : sc.power_flexible)
            if (c.active_at(t_now + m)) row_count += 2;
    }

    FeasibleSet set;
    set.A = Eigen::MatrixXd::Zero(row_count, dim);
    set.b = Eigen::VectorXd::Zero(row_count);
    set.labels.resize(row_count);

    int r = 0;
    for (int m = 0; m < steps; ++m) {
        const auto lag = basis.vectors.col(m).transpose();

        set.A.block(r, 0, 1, basis.order) = lag;
        set.b(r) = bat.max_rate;
        set.labels[r] = {RowLabel::Kind::RateUpper, m, 0};
        ++r;
        set.A.block(r, 0, 1, basis.order) = -lag;
        set.b(r) = bat.max_rate;
        set.labels[r] = {RowLabel::Kind::RateLower, m, 0};
        ++r;

        for (int c = 0; c < flex; ++c) {
            const auto& app = sc.power_flexible[c];
            if (!app.active_at(t_now + m)) continue;
            const int col = (1 + c) * basis.order;
            set.A.block(r, col, 1, basis.order) = lag;
            set.b(r) = app.max_power - app.nominal_power;
            set.labels[r] = {RowLabel::Kind::ApplianceUpper, m, c + 1};
            ++r;
            set.A.block(r, col, 1, basis.order) = -lag;
            set.b(r) = app.nominal_power - app.min_power;
            set.labels[r] = {RowLabel::Kind::ApplianceLower, m, c + 1};
            ++r;
        }

        // Energy rows bound the first controllable state, E(t_now + m + 1).
        const auto energy_row = ops.phi[m + 1].row(0);
        const double decayed = ops.state_powers[m + 1](0, 0) * x0(0);
        const double floor = energy_floor.empty() ? bat.capacity_min : energy_floor[m];
        set.A.row(r) = energy_row;
        set.b(r) = bat.capacity_max - decayed;
        set.labels[r] = {RowLabel::Kind::EnergyUpper, m + 1, 0};
        ++r;
        set.A.row(r) = -energy_row;
        set.b(r) = decayed - floor;
        set.labels[r] = {RowLabel::Kind::EnergyLower, m + 1, 0};
        ++r;
    }

    // eta = 0 must be feasible for every validly built set; the deviation
    // parameterization makes b the zero-point slack vector.
    Eigen::Index worst;
    const double min_b = set.b.minCoeff(&worst);
    if (min_b < -set.tolerance) {
        std::ostringstream msg;
        msg << "zero coefficient vector infeasible: row " << set.labels[worst].str()
            << " violated by " << -min_b;
        throw InfeasibleScenario(msg.str(), set.labels[worst].str());
    }

    set.sample_halfwidth = Eigen::VectorXd::Zero(dim);
    for (int j = 0; j < basis.order; ++j) {
        const double reach = basis.vectors.row(j).leftCols(steps).cwiseAbs().maxCoeff();
        const double width = reach > 1e-12 ? bat.max_rate / reach : 0.0;
        for (int k = 0; k < 1 + flex; ++k) set.sample_halfwidth(k * basis.order + j) = width;
    }
    return set;
}

FeasibilityReport is_feasible(const FeasibleSet& set, const Eigen::VectorXd& eta) {
    if (eta.size() != set.dim()) throw std::invalid_argument("is_feasible: eta dimension mismatch");
    FeasibilityReport report;
    if (set.rows() == 0) return report;
    Eigen::VectorXd excess = set.A * eta - set.b;
    Eigen::Index worst;
    report.worst_violation = excess.maxCoeff(&worst);
    report.worst_row = static_cast<int>(worst);
    report.label = set.labels[worst].str();
    report.feasible = report.worst_violation <= set.tolerance;
    return report;
}

Eigen::VectorXd row_slacks(const FeasibleSet& set, const Eigen::VectorXd& eta) {
    if (eta.size() != set.dim()) throw std::invalid_argument("row_slacks: eta dimension mismatch");
    return set.b - set.A * eta;
}

void write_feasible_set_csv(const FeasibleSet& set, std::ostream& os) {
    os << "label";
    for (Eigen::Index j = 0; j < set.dim(); ++j) os << ",a" << j;
    os << ",b\n";
    os.precision(17);
    for (Eigen::Index r = 0; r < set.rows(); ++r) {
        os << set.labels[r].str();
        for (Eigen::Index j = 0; j < set.dim(); ++j) os << ',' << set.A(r, j);
        os << ',' << set.b(r) << '\n';
    }
}

}  // namespace hems
