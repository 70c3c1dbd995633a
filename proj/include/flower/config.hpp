#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "flower/inference.hpp"
#include "flower/sampler.hpp"
#include "flower/type_class.hpp"

namespace flower {

/// Fully resolved settings of one analysis run.
struct RunConfig {
    InferenceConfig inference;
    SamplerConfig sampler;             ///< rows_min and seed mirror `inference`
    std::optional<Dialect> dialect;    ///< unset: the source's natural dialect
    bool timing = false;               ///< record per-stage wall time in the report

    /// Throws ConfigError on any out-of-range value.
    void validate() const;
};

/// Keys accepted in config files and override objects.
const std::vector<std::string>& config_keys();

/// Defaults, then `file` (a JSON object), then `overrides`, each layer
/// replacing the keys it sets. Throws ConfigError listing unknown keys or
/// naming a key with an invalid value.
RunConfig load_config(const std::optional<std::filesystem::path>& file, const nlohmann::json& overrides);

/// Applies one layer of settings onto `config`.
void apply_config_layer(RunConfig& config, const nlohmann::json& layer, const std::string& origin);

/// Every setting, keys sorted; feeding it back through load_config
/// reproduces the same RunConfig.
nlohmann::json config_echo(const RunConfig& config);

}  // namespace flower
