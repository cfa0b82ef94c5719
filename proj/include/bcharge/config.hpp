#pragma once

#include <json.hpp>

#include <string>
#include <string_view>

#include "bcharge/models.hpp"

namespace bcharge {

/// Flat key/value form: {"model": "free", "L": 8, "t0": 1, ..., "boundary_on": true}.
void to_json(nlohmann::json& j, const ModelSpec& spec);
/// Missing keys keep their defaults; unknown keys throw ConfigError.
void from_json(const nlohmann::json& j, ModelSpec& spec);

/// INI-like text: one `key = value` per line, `#`/`;` comments, optional
/// `[model]` section header.
std::string to_ini(const ModelSpec& spec);
ModelSpec model_from_ini(std::string_view text);

/// Applies one key of the flat form (numeric keys, "model", "boundary_on", "periodic").
void apply_model_key(ModelSpec& spec, std::string_view key, std::string_view value);

}  // namespace bcharge
