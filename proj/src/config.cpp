#include "flower/config.hpp"

#include <algorithm>
#include <fstream>

#include "flower/error.hpp"

namespace flower {

void RunConfig::validate() const {
    inference.validate();
    sampler.validate();
}

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys = {
        "confidence",     "confidence_coeff", "dialect", "histogram_bins", "lang",   "mode",
        "pk_fallback",    "policy",           "rows_min", "same_table_pairs", "seed", "timing",
    };
    return keys;
}

namespace {

template <typename T>
T get_as(const nlohmann::json& value, const std::string& key, const std::string& origin) {
    try {
        return value.get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ConfigError(origin + ": invalid value for '" + key + "': " + value.dump());
    }
}

std::uint64_t get_count(const nlohmann::json& value, const std::string& key, const std::string& origin) {
    if (!value.is_number_integer() || (value.is_number_integer() && value.get<std::int64_t>() < 0 && !value.is_number_unsigned())) {
        throw ConfigError(origin + ": '" + key + "' must be a non-negative integer, got " + value.dump());
    }
    return value.get<std::uint64_t>();
}

}  // namespace

void apply_config_layer(RunConfig& config, const nlohmann::json& layer, const std::string& origin) {
    if (layer.is_null()) return;
    if (!layer.is_object()) throw ConfigError(origin + ": configuration must be a JSON object");

    std::vector<std::string> unknown;
    for (const auto& [key, value] : layer.items()) {
        const auto& keys = config_keys();
        if (std::find(keys.begin(), keys.end(), key) == keys.end()) unknown.push_back(key);
    }
    if (!unknown.empty()) {
        std::sort(unknown.begin(), unknown.end());
        std::string list;
        for (const auto& k : unknown) list += (list.empty() ? "" : ", ") + k;
        throw ConfigError(origin + ": unknown key(s): " + list);
    }

    for (const auto& [key, value] : layer.items()) {
        if (key == "confidence") {
            if (!value.is_number()) throw ConfigError(origin + ": 'confidence' must be a number in [0, 1]");
            config.inference.confidence = value.get<double>();
            if (!(config.inference.confidence >= 0.0 && config.inference.confidence <= 1.0)) {
                throw ConfigError(origin + ": --confidence must be within [0, 1], got " + value.dump());
            }
        } else if (key == "confidence_coeff") {
            if (!value.is_number()) throw ConfigError(origin + ": 'confidence_coeff' must be a number > 0");
            config.inference.confidence_coeff = value.get<double>();
            if (!(config.inference.confidence_coeff > 0.0)) {
                throw ConfigError(origin + ": --confidence-coeff must be > 0, got " + value.dump());
            }
        } else if (key == "rows_min") {
            auto n = get_count(value, key, origin);
            if (n < 1) throw ConfigError(origin + ": --rows-min must be >= 1, got " + value.dump());
            config.inference.rows_min = n;
            config.sampler.rows_min = n;
        } else if (key == "mode") {
            config.inference.mode = parse_mode(get_as<std::string>(value, key, origin));
        } else if (key == "lang") {
            config.inference.language = get_as<std::string>(value, key, origin);
            if (config.inference.language.empty()) throw ConfigError(origin + ": --lang must not be empty");
        } else if (key == "seed") {
            auto seed = get_count(value, key, origin);
            config.inference.seed = seed;
            config.sampler.seed = seed;
        } else if (key == "policy") {
            config.sampler.policy = SamplingPolicy::parse(get_as<std::string>(value, key, origin));
        } else if (key == "histogram_bins") {
            auto n = get_count(value, key, origin);
            if (n < 1) throw ConfigError(origin + ": histogram_bins must be >= 1");
            config.sampler.histogram_bins = static_cast<std::size_t>(n);
        } else if (key == "same_table_pairs") {
            config.inference.same_table_pairs = get_as<bool>(value, key, origin);
        } else if (key == "pk_fallback") {
            config.inference.pk_fallback = get_as<bool>(value, key, origin);
        } else if (key == "timing") {
            config.timing = get_as<bool>(value, key, origin);
        } else if (key == "dialect") {
            if (value.is_null()) {
                config.dialect.reset();
                continue;
            }
            auto text = get_as<std::string>(value, key, origin);
            auto dialect = parse_dialect(text);
            if (!dialect) {
                throw ConfigError(origin + ": unsupported dialect '" + text + "': expected postgres, sqlite or generic");
            }
            config.dialect = *dialect;
        }
    }
}

RunConfig load_config(const std::optional<std::filesystem::path>& file, const nlohmann::json& overrides) {
    RunConfig config;
    if (file) {
        std::ifstream in(*file);
        if (!in) throw ConfigError("cannot read config file " + file->string());
        nlohmann::json layer;
        try {
            layer = nlohmann::json::parse(in);
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError("config file " + file->string() + " is not valid JSON: " + e.what());
        }
        apply_config_layer(config, layer, file->string());
    }
    apply_config_layer(config, overrides, "command line");
    config.validate();
    return config;
}

nlohmann::json config_echo(const RunConfig& config) {
    nlohmann::json j;
    j["confidence"] = config.inference.confidence;
    j["confidence_coeff"] = config.inference.confidence_coeff;
    j["dialect"] = config.dialect ? nlohmann::json(std::string(to_string(*config.dialect))) : nlohmann::json(nullptr);
    j["histogram_bins"] = config.sampler.histogram_bins;
    j["lang"] = config.inference.language;
    j["mode"] = std::string(to_string(config.inference.mode));
    j["pk_fallback"] = config.inference.pk_fallback;
    j["policy"] = config.sampler.policy.to_string();
    j["rows_min"] = config.inference.rows_min;
    j["same_table_pairs"] = config.inference.same_table_pairs;
    j["seed"] = config.inference.seed;
    j["timing"] = config.timing;
    return j;
}

}  // namespace flower
