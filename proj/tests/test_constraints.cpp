#include <doctest.h>

#include <cmath>
#include <sstream>

#include "hems/constraints.hpp"
#include "hems/errors.hpp"
#include "support.hpp"

using namespace hems;

namespace {

struct Built {
    LaguerreBasis basis;
    PredictionOperators ops;
    FeasibleSet set;
};

Built build_for(const Scenario& sc, int t_now, double pole, int order, int horizon,
                double energy = -1.0) {
    Built out;
    out.basis = build_basis(pole, order, horizon);
    out.ops = build_prediction(out.basis, make_state_space(sc.battery.leakage_per_slot,
                                                           sc.grid.slot_duration_hours,
                                                           static_cast<int>(sc.power_flexible.size())));
    const double e0 = energy < 0 ? sc.battery.initial_energy : energy;
    out.set = build_feasible_set(sc, out.basis, out.ops, Eigen::Vector2d(e0, 0.0), t_now);
    return out;
}

// Time-domain oracle: reconstruct the controls and check every physical
// bound by forward simulation, with the same tolerance semantics.
bool time_domain_feasible(const Scenario& sc, const LaguerreBasis& basis,
                          const Eigen::VectorXd& eta, double e0, int t_now, double tol) {
    const int flex = static_cast<int>(sc.power_flexible.size());
    const int steps = std::min(basis.horizon, sc.grid.slot_count - t_now + 1);
    const Eigen::MatrixXd controls = reconstruct_controls(basis, eta, flex);
    const auto& bat = sc.battery;
    double energy = e0;
    for (int m = 0; m < steps; ++m) {
        if (std::abs(controls(0, m)) > bat.max_rate + tol) return false;
        for (int c = 0; c < flex; ++c) {
            const auto& app = sc.power_flexible[c];
            if (!app.active_at(t_now + m)) continue;
            const double absolute = app.nominal_power + controls(1 + c, m);
            if (absolute < app.min_power - tol || absolute > app.max_power + tol) return false;
        }
        energy = bat.leakage_per_slot * energy + controls(0, m) * sc.grid.slot_duration_hours;
        if (energy < bat.capacity_min - tol || energy > bat.capacity_max + tol) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("zero vector satisfies every row on the table2 set") {
    const Scenario sc = test::table2_scenario();
    const auto built = build_for(sc, 1, 0.8, 8, 20);
    const auto report = is_feasible(built.set, Eigen::VectorXd::Zero(built.set.dim()));
    CHECK(report.feasible);
    // Direct row evaluation: at eta = 0 the slack vector is b itself.
    const Eigen::VectorXd slacks = row_slacks(built.set, Eigen::VectorXd::Zero(built.set.dim()));
    CHECK((slacks - built.set.b).cwiseAbs().maxCoeff() == 0.0);
    CHECK(slacks.minCoeff() >= 0.0);
    // Deepest energy row: rho^20 * 4 stays above the 3 kWh floor.
    CHECK(std::pow(sc.battery.leakage_per_slot, 20) * 4.0 > 3.0);
}

TEST_CASE("leaky battery at the floor makes the zero vector infeasible") {
    Scenario sc = test::table2_scenario();
    sc.battery.initial_energy = sc.battery.capacity_min;
    try {
        build_for(sc, 1, 0.8, 8, 20);
        FAIL("expected InfeasibleScenario");
    } catch (const InfeasibleScenario& e) {
        CHECK(e.violated_row() == "energy-lower(1)");
    }
}

TEST_CASE("minimal instance has exactly the four hand-enumerated rows") {
    Scenario sc = test::table2_scenario();
    sc.power_flexible.clear();
    const auto built = build_for(sc, 1, 0.0, 1, 1);
    REQUIRE(built.set.rows() == 4);
    REQUIRE(built.set.dim() == 1);

    // l1(0) = 1 at p = 0.
    CHECK(built.set.labels[0].str() == "rate-upper(0)");
    CHECK(built.set.A(0, 0) == doctest::Approx(1.0));
    CHECK(built.set.b(0) == doctest::Approx(3.0));
    CHECK(built.set.labels[1].str() == "rate-lower(0)");
    CHECK(built.set.A(1, 0) == doctest::Approx(-1.0));
    CHECK(built.set.b(1) == doctest::Approx(3.0));

    const double rho = sc.battery.leakage_per_slot;
    CHECK(built.set.labels[2].str() == "energy-upper(1)");
    CHECK(built.set.A(2, 0) == doctest::Approx(1.0));  // phi(1) = dt * l1(0)
    CHECK(built.set.b(2) == doctest::Approx(10.0 - rho * 4.0));
    CHECK(built.set.labels[3].str() == "energy-lower(1)");
    CHECK(built.set.A(3, 0) == doctest::Approx(-1.0));
    CHECK(built.set.b(3) == doctest::Approx(rho * 4.0 - 3.0));
}

TEST_CASE("is_feasible reports the violated row") {
    Scenario sc = test::table2_scenario();
    sc.power_flexible.clear();
    const auto built = build_for(sc, 1, 0.0, 1, 1);

    Eigen::VectorXd eta(1);
    eta << 30.0;  // ten times the rate bound
    const auto report = is_feasible(built.set, eta);
    CHECK(!report.feasible);
    CHECK(report.label == "rate-upper(0)");

    eta << 3.0;  // boundary point, slack exactly zero
    CHECK(is_feasible(built.set, eta).feasible);
}

TEST_CASE("row slacks are b - A eta and vanish on the boundary") {
    const Scenario sc = test::table2_scenario();
    const auto built = build_for(sc, 3, 0.8, 4, 8);
    Eigen::VectorXd eta = Eigen::VectorXd::Zero(built.set.dim());
    // Push the first battery coefficient to the rate-upper boundary at m=0.
    eta(0) = built.set.b(0) / built.set.A(0, 0);
    const Eigen::VectorXd slacks = row_slacks(built.set, eta);
    CHECK(std::abs(slacks(0)) < 1e-12);
    CHECK(slacks.minCoeff() >= -built.set.tolerance);
}

TEST_CASE("feasibility equivalence with time-domain bounds over random vectors") {
    const Scenario sc = test::table2_scenario();
    RandomStream rng(31);
    int feasible_count = 0, infeasible_count = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const int t_now = rng.uniform_int(1, 24);
        const auto built = build_for(sc, t_now, 0.8, 5, 12);
        Eigen::VectorXd eta(built.set.dim());
        const double scale = trial % 3 == 0 ? 0.4 : (trial % 3 == 1 ? 1.5 : 4.0);
        for (int i = 0; i < eta.size(); ++i) eta(i) = scale * rng.uniform(-1.5, 1.5);

        const bool lag = is_feasible(built.set, eta).feasible;
        const bool time = time_domain_feasible(sc, built.basis, eta, sc.battery.initial_energy,
                                               t_now, built.set.tolerance);
        REQUIRE(lag == time);
        (lag ? feasible_count : infeasible_count)++;
    }
    // The sample must actually exercise both outcomes.
    CHECK(feasible_count > 50);
    CHECK(infeasible_count > 50);
}

TEST_CASE("feasible set is convex: blends of feasible points stay feasible") {
    const Scenario sc = test::table2_scenario();
    const auto built = build_for(sc, 1, 0.8, 6, 10);
    RandomStream rng(32);
    Eigen::VectorXd a = Eigen::VectorXd::Zero(built.set.dim());
    Eigen::VectorXd b = Eigen::VectorXd::Zero(built.set.dim());
    b(0) = built.set.b(0) / built.set.A(0, 0);  // boundary point
    for (int trial = 0; trial < 200; ++trial) {
        const double alpha = rng.uniform();
        REQUIRE(is_feasible(built.set, alpha * a + (1 - alpha) * b).feasible);
    }
}

TEST_CASE("constraint system ignores time-flexible start times") {
    const Scenario sc = test::table2_scenario();
    const auto one = build_for(sc, 1, 0.8, 6, 10);
    const auto two = build_for(sc, 1, 0.8, 6, 10);
    CHECK((one.set.A - two.set.A).cwiseAbs().maxCoeff() == 0.0);
    CHECK((one.set.b - two.set.b).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("appliance rows appear only on active slots") {
    const Scenario sc = test::table2_scenario();
    // At t_now = 1 with horizon 8, c1 (window [11,16]) is never active, so
    // only c2 contributes appliance rows.
    const auto built = build_for(sc, 1, 0.8, 4, 8);
    int c1_rows = 0, c2_rows = 0;
    for (const auto& label : built.set.labels) {
        if (label.kind == RowLabel::Kind::ApplianceUpper ||
            label.kind == RowLabel::Kind::ApplianceLower) {
            if (label.appliance == 1) ++c1_rows;
            if (label.appliance == 2) ++c2_rows;
        }
    }
    CHECK(c1_rows == 0);
    CHECK(c2_rows == 16);
    // 2 rate + 2 energy + 2 c2 rows per step.
    CHECK(built.set.rows() == 8 * 6);
}

TEST_CASE("custom energy floors raise the lower rows") {
    const Scenario sc = test::table2_scenario();
    const auto basis = build_basis(0.8, 4, 6);
    const auto ops = build_prediction(
        basis, make_state_space(sc.battery.leakage_per_slot, 1.0, 2));
    const std::vector<double> floors(6, 3.5);
    const auto set =
        build_feasible_set(sc, basis, ops, Eigen::Vector2d(4.0, 0.0), 1, floors);
    for (Eigen::Index r = 0; r < set.rows(); ++r)
        if (set.labels[r].kind == RowLabel::Kind::EnergyLower) {
            const int k = set.labels[r].step;
            const double decayed = std::pow(sc.battery.leakage_per_slot, k) * 4.0;
            REQUIRE(set.b(r) == doctest::Approx(decayed - 3.5));
        }
}

TEST_CASE("csv dump has the documented shape") {
    Scenario sc = test::table2_scenario();
    sc.power_flexible.clear();
    const auto built = build_for(sc, 1, 0.0, 1, 1);
    std::ostringstream os;
    write_feasible_set_csv(built.set, os);
    std::istringstream in(os.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "label,a0,b");
    int rows = 0;
    while (std::getline(in, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 4);
}
