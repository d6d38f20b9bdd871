#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "gnls/bounds.hpp"
#include "gnls/dynamics.hpp"
#include "gnls/hamiltonian.hpp"
#include "gnls/measures.hpp"

namespace gnls {

/// Parses the flat TOML subset used by the config files: [section] and
/// [a.b] headers, key = value with numbers, booleans, "strings" and
/// single-line arrays of those, and # comments. Anything else is a ConfigError.
nlohmann::json parse_toml(const std::string& text);
nlohmann::json load_toml(const std::filesystem::path& path);

/// Reads a length that may be written as a number or as "<x>pi", e.g. "2pi".
double parse_length(const nlohmann::json& v);

/// "norm_powers" or "squared_norm".
RadiusRule parse_radius_rule(const std::string& name);

// Each reader starts from `base` and overrides the keys that are present.
ModelParams read_model(const nlohmann::json& section, ModelParams base = {});
ChainConfig read_chain(const nlohmann::json& section, ChainConfig base = {});
BoundOptions read_bounds(const nlohmann::json& section, BoundOptions base = {});
SimConfig read_sim(const nlohmann::json& section, SimConfig base = {});

nlohmann::json to_json(const ModelParams& mp);

}  // namespace gnls
