#include "hems/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hems/errors.hpp"

namespace hems {

namespace {

constexpr double kDirectionEps = 1e-14;  // rows with |A_r . d| below this do not bind

void require_feasible(const FeasibleSet& set, const Eigen::VectorXd& slacks) {
    if (slacks.size() == 0) return;
    Eigen::Index worst;
    const double min_slack = slacks.minCoeff(&worst);
    if (min_slack < -set.tolerance)
        throw ConstraintViolation("sampler: input point infeasible at row " +
                                  set.labels[worst].str());
}

}  // namespace

StepBounds line_bounds(const FeasibleSet& set, const Eigen::VectorXd& eta,
                       const Eigen::VectorXd& direction, double step_cap) {
    if (direction.size() != set.dim())
        throw std::invalid_argument("line_bounds: direction dimension mismatch");
    const Eigen::VectorXd slacks = row_slacks(set, eta);
    require_feasible(set, slacks);

    const Eigen::VectorXd along = set.A * direction;
    StepBounds bounds{step_cap, step_cap};
    for (Eigen::Index r = 0; r < along.size(); ++r) {
        const double a = along(r);
        if (a > kDirectionEps)
            bounds.forward = std::min(bounds.forward, std::max(0.0, slacks(r) / a));
        else if (a < -kDirectionEps)
            bounds.backward = std::min(bounds.backward, std::max(0.0, slacks(r) / -a));
    }
    return bounds;
}

Eigen::VectorXd sampler_one(const FeasibleSet& set, Eigen::VectorXd eta,
                            std::span<const int> coordinates, long iteration,
                            RandomStream& rng) {
    if (eta.size() != set.dim()) throw std::invalid_argument("sampler_one: eta dimension mismatch");
    Eigen::VectorXd slacks = row_slacks(set, eta);
    require_feasible(set, slacks);
    const bool vertex_jump = (iteration % 5) == 0;

    for (int i : coordinates) {
        if (i < 0 || i >= set.dim()) throw std::out_of_range("sampler_one: coordinate index");
        const auto column = set.A.col(i);
        double forward = kStepCap, backward = kStepCap;
        for (Eigen::Index r = 0; r < column.size(); ++r) {
            const double a = column(r);
            if (a > kDirectionEps)
                forward = std::min(forward, std::max(0.0, slacks(r) / a));
            else if (a < -kDirectionEps)
                backward = std::min(backward, std::max(0.0, slacks(r) / -a));
        }
        const double pick = vertex_jump ? (rng.coin() ? 1.0 : 0.0) : rng.uniform();
        const double step = -backward + (forward + backward) * pick;
        if (step != 0.0) {
            eta(i) += step;
            slacks -= step * column;
        }
    }
    return eta;
}

Eigen::VectorXd sampler_two(const FeasibleSet& set, const Eigen::VectorXd& eta,
                            RandomStream& rng) {
    if (eta.size() != set.dim()) throw std::invalid_argument("sampler_two: eta dimension mismatch");
    require_feasible(set, row_slacks(set, eta));

    const Eigen::Index dim = set.dim();
    for (int attempt = 0; attempt < 8; ++attempt) {
        Eigen::VectorXd target(dim);
        for (Eigen::Index j = 0; j < dim; ++j) {
            double width = kStepCap;
            if (set.sample_halfwidth.size() == dim && set.sample_halfwidth(j) > 0.0)
                width = set.sample_halfwidth(j);
            target(j) = rng.uniform(-width, width);
        }
        const Eigen::VectorXd direction = target - eta;
        if (direction.norm() < 1e-12) continue;
        const StepBounds bounds = line_bounds(set, eta, direction);
        const double pick = rng.uniform();
        const double step = -bounds.backward + (bounds.forward + bounds.backward) * pick;
        return eta + step * direction;
    }
    return eta;
}

Eigen::VectorXd initial_point(const FeasibleSet& set) {
    Eigen::VectorXd zero = Eigen::VectorXd::Zero(set.dim());
    const auto report = is_feasible(set, zero);
    if (!report.feasible)
        throw InfeasibleScenario("initial_point: zero vector infeasible at row " + report.label,
                                 report.label);
    return zero;
}

Eigen::VectorXd initial_point(const FeasibleSet& set, RandomStream& rng, int diversify_steps) {
    Eigen::VectorXd point = initial_point(set);
    for (int s = 0; s < diversify_steps; ++s) point = sampler_two(set, point, rng);
    return point;
}

std::vector<int> mutation_coordinates(int dim, RandomStream& rng) {
    std::vector<int> coords;
    const double keep = std::min(1.0, 3.0 / dim);
    for (int i = 0; i < dim; ++i)
        if (rng.uniform() < keep) coords.push_back(i);
    if (coords.empty()) coords.push_back(rng.uniform_int(0, dim - 1));
    return coords;
}

}  // namespace hems
