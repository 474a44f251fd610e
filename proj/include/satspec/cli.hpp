#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "satspec/galerkin.hpp"
#include "satspec/interaction.hpp"

namespace satspec {

/// Runs one subcommand. Exit codes: 0 success, 1 verification mismatch or failed run, 2 usage error.
int parse_and_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int parse_and_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Floats with 17 significant digits; integers and strings as usual.
std::string dump_json(const nlohmann::json& j);
std::string format_double(double x);

/// [{j, k: [k1,k2,k3], value}, ...] in mode order.
nlohmann::json expansion_to_json(const FieldExpansion& e);
/// Throws std::invalid_argument on malformed records or inadmissible modes.
FieldExpansion expansion_from_json(const nlohmann::json& j);

/// {"segments": [{"duration": d, "values": [{j, k, value}, ...]}, ...]}
nlohmann::json schedule_to_json(const GalerkinSystem& sys, const ControlSchedule& s);
/// Values on modes outside the control set are rejected.
ControlSchedule schedule_from_json(const GalerkinSystem& sys, const nlohmann::json& j);

}  // namespace satspec
