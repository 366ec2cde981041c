#include "hems/laguerre.hpp"

#include <cmath>
#include <stdexcept>

namespace hems {

Eigen::MatrixXd laguerre_transition(double pole, int order) {
    if (pole < 0.0 || pole >= 1.0) throw std::invalid_argument("laguerre pole must lie in [0, 1)");
    if (order < 1) throw std::invalid_argument("laguerre order must be >= 1");
    const double gain = 1.0 - pole * pole;
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(order, order);
    for (int i = 0; i < order; ++i) {
        a(i, i) = pole;
        for (int j = 0; j < i; ++j) a(i, j) = std::pow(-pole, i - j - 1) * gain;
    }
    return a;
}

LaguerreBasis build_basis(double pole, int order, int horizon) {
    if (horizon < 1) throw std::invalid_argument("laguerre horizon must be >= 1");
    const Eigen::MatrixXd a = laguerre_transition(pole, order);

    Eigen::VectorXd l0(order);
    const double scale = std::sqrt(1.0 - pole * pole);
    double power = 1.0;
    for (int j = 0; j < order; ++j) {
        l0(j) = scale * power;
        power *= -pole;
    }

    LaguerreBasis basis{pole, order, horizon, Eigen::MatrixXd(order, horizon)};
    basis.vectors.col(0) = l0;
    for (int m = 1; m < horizon; ++m) basis.vectors.col(m) = a * basis.vectors.col(m - 1);
    return basis;
}

Eigen::MatrixXd control_map(const LaguerreBasis& basis, int m, int flexible_count) {
    if (m < 0 || m >= basis.horizon) throw std::out_of_range("control_map: step outside horizon");
    const int signals = 1 + flexible_count;
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(signals, signals * basis.order);
    for (int k = 0; k < signals; ++k)
        g.block(k, k * basis.order, 1, basis.order) = basis.vectors.col(m).transpose();
    return g;
}

Eigen::MatrixXd reconstruct_controls(const LaguerreBasis& basis, const Eigen::VectorXd& eta,
                                     int flexible_count) {
    const int signals = 1 + flexible_count;
    if (eta.size() != static_cast<Eigen::Index>(signals) * basis.order)
        throw std::invalid_argument("reconstruct_controls: eta must have (1+l)*J entries");
    Eigen::MatrixXd controls(signals, basis.horizon);
    for (int k = 0; k < signals; ++k) {
        const auto block = eta.segment(k * basis.order, basis.order);
        controls.row(k) = block.transpose() * basis.vectors;
    }
    return controls;
}

StateSpaceModel make_state_space(double leakage, double dt, int flexible_count) {
    if (flexible_count < 0) throw std::invalid_argument("flexible_count must be >= 0");
    StateSpaceModel model;
    model.leakage = leakage;
    model.dt = dt;
    model.flexible_count = flexible_count;
    model.A << leakage, 0.0, 0.0, 1.0;
    model.B = Eigen::MatrixXd::Zero(2, 1 + flexible_count);
    model.B(0, 0) = dt;
    for (int c = 0; c < flexible_count; ++c) model.B(1, 1 + c) = 1.0;
    return model;
}

PredictionOperators build_prediction(const LaguerreBasis& basis, const StateSpaceModel& model) {
    const int signals = 1 + model.flexible_count;
    const int dim = signals * basis.order;
    PredictionOperators ops;
    ops.horizon = basis.horizon;
    ops.order = basis.order;
    ops.flexible_count = model.flexible_count;
    ops.state_powers.resize(basis.horizon + 1);
    ops.phi.resize(basis.horizon + 1);
    ops.state_powers[0] = Eigen::Matrix2d::Identity();
    ops.phi[0] = Eigen::MatrixXd::Zero(2, dim);
    for (int m = 0; m < basis.horizon; ++m) {
        ops.state_powers[m + 1] = model.A * ops.state_powers[m];
        ops.phi[m + 1] = model.A * ops.phi[m] + model.B * control_map(basis, m, model.flexible_count);
    }
    return ops;
}

Eigen::Vector2d predict_state(const PredictionOperators& ops, const Eigen::Vector2d& x0,
                              const Eigen::VectorXd& eta, int m) {
    if (m < 0 || m > ops.horizon) throw std::out_of_range("predict_state: step outside horizon");
    if (eta.size() != ops.phi[0].cols())
        throw std::invalid_argument("predict_state: eta dimension mismatch");
    return ops.state_powers[m] * x0 + ops.phi[m] * eta;
}

}  // namespace hems
