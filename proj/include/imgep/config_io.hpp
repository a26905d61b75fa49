#pragma once

#include <json.hpp>

#include "imgep/explorer.hpp"
#include "imgep/system.hpp"

// JSON <-> config structs shared by the experiment plans and the service.
// Parsers throw ValidationError naming the offending field; unknown keys are rejected.
namespace imgep::config_io {

using nlohmann::json;

// {"system": "gray_scott", "gray_scott": {...}, "lenia": {...}}; sub-objects optional.
SystemSpec system_spec_from_json(const json& j);
json system_spec_to_json(const SystemSpec& spec);

// Either {"constraints": [{"feature", "lo", "hi"}, ...]} or the shorthand {"volume": [0.6, 0.7], ...}.
explorer::Roi roi_from_json(const json& j);
json roi_to_json(const explorer::Roi& roi);

// Keys: n_init, budget, balance_prob, subspace_dims, method, mutation_sigmas, seed. Missing keys keep
// the defaults in `base`.
explorer::ExplorerConfig explorer_config_from_json(const json& j, explorer::ExplorerConfig base = {});
json explorer_config_to_json(const explorer::ExplorerConfig& c);

}  // namespace imgep::config_io
