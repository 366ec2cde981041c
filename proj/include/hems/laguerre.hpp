#pragma once

#include <vector>

#include <Eigen/Core>

namespace hems {

// Discrete Laguerre network: `order` orthonormal sequences generated by a
// pole in [0, 1), tabulated over `horizon` steps. Column m of `vectors` is
// L(m) = [l_1(m) ... l_J(m)]^T.
struct LaguerreBasis {
    double pole = 0.8;
    int order = 15;
    int horizon = 20;
    Eigen::MatrixXd vectors;  // order x horizon

    Eigen::VectorXd column(int m) const { return vectors.col(m); }
};

// State transition of the Laguerre network, L(m+1) = A_la * L(m).
Eigen::MatrixXd laguerre_transition(double pole, int order);

LaguerreBasis build_basis(double pole, int order, int horizon);

// Block-diagonal map from stacked coefficients to the control vector at step
// m: u(t+m) = G(m) * eta, with 1 + flexible_count signal blocks.
Eigen::MatrixXd control_map(const LaguerreBasis& basis, int m, int flexible_count);

// Control deviations over the horizon: row 0 is the battery power signal,
// rows 1..l are the power-flexible deviations from nominal. eta is the
// stacked coefficient vector [eta_s, eta_1, ..., eta_l].
Eigen::MatrixXd reconstruct_controls(const LaguerreBasis& basis, const Eigen::VectorXd& eta,
                                     int flexible_count);

// Two-state model: x = [battery energy, cumulative flexible power].
struct StateSpaceModel {
    double leakage = 1.0;
    double dt = 1.0;
    int flexible_count = 0;
    Eigen::Matrix2d A;
    Eigen::MatrixXd B;  // 2 x (1 + flexible_count)
};

StateSpaceModel make_state_space(double leakage, double dt, int flexible_count);

// phi[m] maps coefficients to the state displacement after m steps:
// x(t+m) = A^m x(t) + phi[m] * eta. Built by the recurrence
// phi[m+1] = A * phi[m] + B * G(m), phi[0] = 0.
struct PredictionOperators {
    int horizon = 0;
    int order = 0;
    int flexible_count = 0;
    std::vector<Eigen::Matrix2d> state_powers;  // A^m for m = 0..horizon
    std::vector<Eigen::MatrixXd> phi;           // 2 x dim for m = 0..horizon
};

PredictionOperators build_prediction(const LaguerreBasis& basis, const StateSpaceModel& model);

Eigen::Vector2d predict_state(const PredictionOperators& ops, const Eigen::Vector2d& x0,
                              const Eigen::VectorXd& eta, int m);

}  // namespace hems
