#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "hems/constraints.hpp"
#include "hems/random.hpp"

namespace hems {

// Largest feasible steps from a point along +/- a direction. Any step in
// [-backward, forward] stays inside the polytope.
struct StepBounds {
    double forward = 0.0;   // d_pos
    double backward = 0.0;  // d_neg
};

// Steps along directions no constraint row caps are clamped here; the home
// polytope is bounded along every direction the rate rows touch, so the cap
// is a safety net for degenerate inputs.
inline constexpr double kStepCap = 1e3;

StepBounds line_bounds(const FeasibleSet& set, const Eigen::VectorXd& eta,
                       const Eigen::VectorXd& direction, double step_cap = kStepCap);

// Coordinate-wise convex sampler. Visits the given coordinates in order and
// resamples each inside the bounds seen from the current point; every fifth
// iteration draws from {0, 1} instead of [0, 1], jumping to a coordinate
// extreme. The result is always feasible.
Eigen::VectorXd sampler_one(const FeasibleSet& set, Eigen::VectorXd eta,
                            std::span<const int> coordinates, long iteration, RandomStream& rng);

// Random-direction convex sampler: draws a random point in the heuristic
// sampling box, moves a uniform fraction of the feasible chord along the
// direction towards it. Degenerate directions are redrawn a few times, after
// which the input is returned unchanged.
Eigen::VectorXd sampler_two(const FeasibleSet& set, const Eigen::VectorXd& eta,
                            RandomStream& rng);

// The guaranteed feasible point eta = 0.
Eigen::VectorXd initial_point(const FeasibleSet& set);
// Same, then diversified by a fixed number of random-direction steps.
Eigen::VectorXd initial_point(const FeasibleSet& set, RandomStream& rng, int diversify_steps);

// Coordinate subset for mutation: each index kept with probability 3/dim,
// at least one forced.
std::vector<int> mutation_coordinates(int dim, RandomStream& rng);

}  // namespace hems
