#pragma once

#include <json.hpp>

#include "netent/network.hpp"

namespace netent {

// {"input_dim": d, "layers": [{"weights": [[...], ...], "bias": [...]}, ...]}
nlohmann::ordered_json to_json(const NetworkConfig& cfg);
NetworkConfig network_from_json(const nlohmann::ordered_json& j);

}  // namespace netent
