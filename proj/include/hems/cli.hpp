#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hems/harness.hpp"

namespace hems {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitRuntime = 3;

struct RunManifest {
    std::string scenario_path;
    std::string series_path;
    std::vector<std::string> solvers{"proposed"};
    std::vector<std::uint64_t> seeds{1};
    int population = 200;
    int iterations = 1000;
    int horizon = 20;
    int laguerre_order = 15;
    double laguerre_pole = 0.8;
    double penalty_weight = 1e4;
    std::vector<std::string> error_profiles{"none"};
    std::string out_dir = "out";
    int slot = 1;                       // cmd_solve only
    std::string dump_constraints;       // cmd_solve only, optional path
};

int cmd_validate(const RunManifest& manifest);
int cmd_solve(const RunManifest& manifest);
int cmd_simulate(const RunManifest& manifest);

}  // namespace hems
