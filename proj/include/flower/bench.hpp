#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "flower/config.hpp"
#include "flower/identifier.hpp"
#include "flower/pipeline.hpp"
#include "flower/sampler.hpp"

namespace flower {

enum class NamingStyle { Snake, Camel, Mixed };

std::string_view to_string(NamingStyle style);
NamingStyle parse_naming_style(std::string_view text);

/// Description of a synthetic database. `preset` "stats-mimic" ignores the
/// shape fields and builds the fixed 8-table layout modelled on the
/// Stack Exchange STATS schema (12 foreign keys).
struct BenchSpec {
    std::string preset;
    std::size_t schemas = 1;
    std::size_t tables_per_schema = 4;
    std::size_t columns_min = 3;
    std::size_t columns_max = 6;
    NamingStyle naming = NamingStyle::Snake;
    Distribution distribution = Distribution::Normal;
    std::uint64_t rows_min = 100;
    std::uint64_t rows_max = 1000;
    double fk_density = 0.5;
    std::uint64_t seed = 0;
    bool declare_fks = false;  ///< also write FOREIGN KEY clauses into the DDL

    /// Throws ConfigError.
    void validate() const;
    static BenchSpec from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;

    static BenchSpec stats_mimic(std::uint64_t seed = 0);
};

using DepPair = std::pair<ColumnRef, ColumnRef>;

struct GroundTruth {
    std::vector<DepPair> deps;  ///< sorted

    nlohmann::json to_json() const;
    static GroundTruth from_json(const nlohmann::json& j);
    static GroundTruth load(const std::filesystem::path& file);
};

inline constexpr const char* kGroundTruthFile = "ground_truth.json";

/// Writes schema.sql, one <schema>.<table>.csv per table and
/// ground_truth.json into `out_dir` (created if missing). Every referencing
/// value exists among the referenced keys. Throws Error when the directory
/// cannot be written.
GroundTruth generate_database(const BenchSpec& spec, const std::filesystem::path& out_dir);

struct EvaluationReport {
    std::size_t gt_count = 0;
    std::size_t predicted_count = 0;
    std::size_t matched = 0;
    std::optional<double> literal_accuracy;  ///< |GT| / |predicted|; unset when undefined
    bool literal_undefined = false;          ///< predicted empty, GT non-empty
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::vector<DepPair> hallucinated;  ///< predicted, not in GT
    std::vector<DepPair> missed;        ///< in GT, not predicted

    nlohmann::json to_json() const;
};

/// Endpoint-exact scoring of predicted dependencies against ground truth.
/// Duplicate predictions count once.
EvaluationReport evaluate_accuracy(std::span<const DepPair> predicted, const GroundTruth& gt);
EvaluationReport evaluate_accuracy(std::span<const ImplicitDep> predicted, const GroundTruth& gt);

struct BenchmarkResult {
    BenchSpec spec;
    GroundTruth ground_truth;
    RunReport run;
    EvaluationReport evaluation;
    SseReport sse;

    nlohmann::ordered_json to_json() const;
};

/// Generates into `work_dir`, analyzes it, scores the implicit list and
/// runs the SSE experiment on the largest table size.
BenchmarkResult run_benchmark(const BenchSpec& spec, const RunConfig& config, const LanguagePack& pack,
                              const std::filesystem::path& work_dir, std::size_t sse_launches = 10);

nlohmann::json sse_report_json(const SseReport& report);

}  // namespace flower
