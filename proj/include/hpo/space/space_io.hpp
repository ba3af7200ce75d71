#pragma once

#include <string>

#include <json.hpp>

#include "hpo/space/search_space.hpp"

namespace hpo {

// Space document:
//   {"params": [{"name": "k", "type": "real", "lower": 0, "upper": 3.91, "trafo": "exp_floor",
//                "condition": {"parent": "kernel", "values": ["rbf"]}},
//               {"name": "kernel", "type": "categorical", "levels": ["lin", "rbf"]}]}

nlohmann::json space_to_json(const SearchSpace& space);
/// Throws ConfigError with a JSON-pointer field on schema violations.
SearchSpace space_from_json(const nlohmann::json& doc, const std::string& where = "");

nlohmann::json config_to_json(const Config& cfg);
Config config_from_json(const nlohmann::json& doc);

}  // namespace hpo
