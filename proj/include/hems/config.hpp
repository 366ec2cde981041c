#pragma once

#include <string>

#include "hems/domain.hpp"
#include "hems/harness.hpp"

namespace hems {

// Scenario file (JSON) plus exogenous series CSV with header
// slot,price,solar,load and 1-based slots in ascending order. Validates the
// assembled scenario and throws ValidationError with the offending field or
// path in the message.
Scenario load_scenario(const std::string& scenario_path, const std::string& series_path);

// "none" gives the all-zero profile; anything else is a JSON file path.
ErrorProfile load_error_profile(const std::string& spec);

}  // namespace hems
