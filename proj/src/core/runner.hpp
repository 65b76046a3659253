#pragma once
// JSON-config batch runner backing the CLI and the shared-library entry
// point.  A run executes one named command, writes its CSV/JSON artifacts
// into an output directory, and always finishes with a summary.json of the
// shape {command, passed, metrics, seed, versions}.  Configuration problems
// (unknown command, malformed values, out-of-range knobs) throw ConfigError
// before any artifact is written; check failures are reported through
// `passed`, never through exceptions.

#include "grid.hpp"
#include "symbols.hpp"

#include <json.hpp>

#include <stdexcept>
#include <string>

namespace ndsym {

inline constexpr const char* kVersion = "0.1.0";

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunResult {
    bool passed = true;
    nlohmann::json summary;
};

// {"type": "zero"|"quadratic"|"stable"|"relativistic"|"triplet", ...}
Psi psi_from_json(const nlohmann::json& spec);

// {"kind": "multiplier"|"separable"|"triplet_multiplier", "psi": {...},
//  "phi": {"amp":.., "freq":..}, "offset":.., "m":.., "m_lower":.., "g":..}
TimeDependentSymbol symbol_from_json(const nlohmann::json& spec);

// {"d":.., "n":.., "L":..}
TorusGrid grid_from_json(const nlohmann::json& spec);

// {"type":"gaussian","sigma":..,"center":..} | {"type":"constant","value":..}
// | {"type":"mode","k":..}
GridFunction u0_from_json(const nlohmann::json& spec, const TorusGrid& g);

// executes config["command"] and writes artifacts + summary.json under
// out_dir (created if missing)
RunResult run_command(const nlohmann::json& config, const std::string& out_dir);

} // namespace ndsym
