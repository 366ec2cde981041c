#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "hems/harness.hpp"

namespace hems {

// Stable number formatting shared by every CSV writer, so identical runs
// produce byte-identical files.
std::string format_number(double value);

void write_schedule_csv(std::ostream& os, const Scenario& scenario, const SimulationTrace& trace);

void write_pareto_csv(std::ostream& os, const std::vector<ObjectivePair>& front, int knee);

// One row per (slot, generation); cmd_solve writes a single slot.
struct ConvergenceRow {
    int slot;
    const ConvergenceLog* log;
};
void write_convergence_csv(std::ostream& os, const std::string& solver,
                           const std::vector<ConvergenceRow>& rows);

}  // namespace hems
