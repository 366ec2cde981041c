#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hems/cli.hpp"
#include "hems/config.hpp"
#include "hems/errors.hpp"
#include "hems/moea.hpp"
#include "support.hpp"

using namespace hems;
namespace fs = std::filesystem;

namespace {

const std::string kDataDir = HEMS_DATA_DIR;
const std::string kScenario = kDataDir + "/table2.scenario";
const std::string kSeries = kDataDir + "/synthetic_day.csv";

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

fs::path temp_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("hems_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

RunManifest smoke_manifest(const std::string& out) {
    RunManifest m;
    m.scenario_path = kScenario;
    m.series_path = kSeries;
    m.population = 12;
    m.iterations = 15;
    m.horizon = 6;
    m.laguerre_order = 4;
    m.out_dir = out;
    return m;
}

}  // namespace

TEST_CASE("bundled scenario loads and matches the in-code builder") {
    const Scenario sc = load_scenario(kScenario, kSeries);
    const Scenario built = test::table2_scenario();
    CHECK(sc.grid.slot_count == 24);
    CHECK(sc.inflexible.size() == 3);
    CHECK(sc.time_flexible.size() == 1);
    CHECK(sc.power_flexible.size() == 2);
    CHECK(sc.battery.leakage_per_slot == doctest::Approx(built.battery.leakage_per_slot));
    CHECK(sc.battery.max_rate == 3.0);
    CHECK(sc.power_flexible[0].nominal_power == 0.8);
    CHECK(sc.inflexible_true[0] == doctest::Approx(1.4));
    CHECK(sc.inflexible_true[1] == doctest::Approx(0.2));
    // Series CSV carries the rounded synthetic curves.
    for (int t = 0; t < 24; ++t) {
        CHECK(std::abs(sc.tariff.market_price[t] - built.tariff.market_price[t]) < 5e-5);
        CHECK(std::abs(sc.renewable_true[t] - built.renewable_true[t]) < 5e-5);
    }
}

TEST_CASE("missing files and bad fields give validation errors naming the cause") {
    CHECK_THROWS_WITH_AS(load_scenario(kScenario, "/nonexistent/series.csv"),
                         doctest::Contains("/nonexistent/series.csv"), ValidationError);

    const fs::path dir = temp_dir("badcfg");
    const fs::path bad = dir / "bad.scenario";
    {
        std::ofstream out(bad);
        out << R"({"grid": {"slot_count": 4, "slot_duration_hours": 1.0},
                   "power_flexible": [{"min_power": 0.9, "max_power": 0.5,
                                       "window": [1, 4], "discomfort_weight": 1,
                                       "nominal_power": 0.7}],
                   "battery": {"daily_retention": 0.9, "max_rate": 1, "capacity_min": 0,
                                "capacity_max": 5, "initial_energy": 2},
                   "tariff": {"feed_in_rate": 0.01}})";
    }
    const fs::path series = dir / "series.csv";
    {
        std::ofstream out(series);
        out << "slot,price,solar,load\n1,0.1,0,0\n2,0.1,0,0\n3,0.1,0,0\n4,0.1,0,0\n";
    }
    CHECK_THROWS_WITH_AS(load_scenario(bad.string(), series.string()),
                         doctest::Contains("c1"), ValidationError);
}

TEST_CASE("series header and slot order are enforced") {
    const fs::path dir = temp_dir("badseries");
    const fs::path series = dir / "series.csv";
    {
        std::ofstream out(series);
        out << "slot,price,solar,load\n2,0.1,0,0\n";
    }
    CHECK_THROWS_WITH_AS(load_scenario(kScenario, series.string()),
                         doctest::Contains("expected slot 1"), ValidationError);
}

TEST_CASE("error profile loading") {
    CHECK(load_error_profile("none").zero());
    const auto p = load_error_profile(kDataDir + "/profiles/moderate.json");
    CHECK(p.price.base_fraction == 0.01);
    CHECK(p.renewable.growth_per_step == 0.01);
    CHECK(p.load.growth_per_step == 0.0075);
}

TEST_CASE("validate command reports the normalized parameters") {
    RunManifest m = smoke_manifest((temp_dir("validate") / "out").string());
    CHECK(cmd_validate(m) == kExitOk);

    m.series_path = "/missing/series.csv";
    CHECK(cmd_validate(m) == kExitValidation);
}

TEST_CASE("solve command writes a mutually non-dominated pareto csv") {
    const fs::path out = temp_dir("solve");
    RunManifest m = smoke_manifest(out.string());
    m.dump_constraints = (out / "rows.csv").string();
    REQUIRE(cmd_solve(m) == kExitOk);

    std::ifstream pareto(out / "pareto.csv");
    REQUIRE(pareto);
    std::string header;
    std::getline(pareto, header);
    CHECK(header == "cost,dissatisfaction,knee");
    std::vector<ObjectivePair> rows;
    int knees = 0;
    std::string line;
    while (std::getline(pareto, line)) {
        std::istringstream cells(line);
        std::string cost, dis, knee;
        std::getline(cells, cost, ',');
        std::getline(cells, dis, ',');
        std::getline(cells, knee, ',');
        rows.push_back({std::stod(cost), std::stod(dis)});
        knees += knee == "1" ? 1 : 0;
    }
    REQUIRE(!rows.empty());
    CHECK(knees == 1);
    const auto ranks = nondominated_sort(rows);
    for (int r : ranks) REQUIRE(r == 0);

    const std::string convergence = read_file(out / "convergence.csv");
    CHECK(convergence.rfind("solver,slot,generation,front_size,ideal_cost,"
                            "ideal_dissatisfaction,nadir_cost,nadir_dissatisfaction,"
                            "manhattan,hypervolume\n", 0) == 0);
    const std::string rows_csv = read_file(out / "rows.csv");
    CHECK(rows_csv.rfind("label,a0,", 0) == 0);
}

TEST_CASE("repeated seeds give byte-identical outputs") {
    const fs::path out_a = temp_dir("det_a");
    const fs::path out_b = temp_dir("det_b");
    RunManifest a = smoke_manifest(out_a.string());
    RunManifest b = smoke_manifest(out_b.string());
    a.seeds = {1234};
    b.seeds = {1234};
    REQUIRE(cmd_solve(a) == kExitOk);
    REQUIRE(cmd_solve(b) == kExitOk);
    CHECK(read_file(out_a / "pareto.csv") == read_file(out_b / "pareto.csv"));
    CHECK(read_file(out_a / "convergence.csv") == read_file(out_b / "convergence.csv"));
}

TEST_CASE("simulate command writes schedule, pareto and summary files") {
    const fs::path out = temp_dir("simulate");
    RunManifest m = smoke_manifest(out.string());
    m.solvers = {"proposed", "cdom"};
    m.seeds = {7};
    m.error_profiles = {"none", kDataDir + "/profiles/moderate.json"};
    REQUIRE(cmd_simulate(m) == kExitOk);

    for (const std::string run : {"proposed_none_s7", "proposed_moderate_s7", "cdom_none_s7",
                                  "cdom_moderate_s7"}) {
        const fs::path dir = out / run;
        REQUIRE(fs::exists(dir / "schedule.csv"));
        REQUIRE(fs::exists(dir / "pareto_001.csv"));
        REQUIRE(fs::exists(dir / "pareto_024.csv"));
        REQUIRE(fs::exists(dir / "convergence.csv"));
        const std::string schedule = read_file(dir / "schedule.csv");
        CHECK(schedule.rfind("slot,price_true,price_forecast_t0,renewable,inflexible_load,"
                             "battery_power,battery_energy,power_c1,power_c2,p_total,slot_cost\n",
                             0) == 0);
    }
    const std::string summary = read_file(out / "summary.json");
    CHECK(summary.find("\"degradation\"") != std::string::npos);
    CHECK(summary.find("\"percent\"") != std::string::npos);

    // Unknown solver name fails validation.
    m.solvers = {"annealing"};
    CHECK(cmd_simulate(m) == kExitValidation);
}
