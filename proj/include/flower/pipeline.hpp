#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "flower/catalog.hpp"
#include "flower/config.hpp"
#include "flower/erd.hpp"
#include "flower/inference.hpp"
#include "flower/name_nlp.hpp"

namespace flower {

inline constexpr int kReportVersion = 1;

struct TableSummary {
    TableRef ref;
    std::uint64_t rows = 0;
    bool empty = true;
    bool ddl_accessible = true;
    std::vector<Identifier> keys;  ///< columns treated as keys during inference
    bool key_from_data = false;    ///< keys came from the uniqueness fallback
};

struct RunReport {
    int version = kReportVersion;
    std::string source;
    Dialect dialect = Dialect::Postgres;
    RunConfig config;
    std::vector<TableSummary> tables;
    std::vector<ExplicitDep> explicit_deps;
    std::vector<DanglingRef> dangling;
    std::vector<ImplicitDep> implicit;  ///< post-deduplication
    std::vector<Warning> warnings;
    std::vector<std::string> notes;
    std::map<std::string, double> timing;  ///< seconds per stage; empty unless requested
    ErGraph graph;
};

/// Samples every column of every non-empty table and attaches synonyms.
/// Single-column primary keys count as keys; with pk_fallback, tables
/// without a declared key use columns whose values were read in full and
/// are all distinct and non-null. `keys_out` receives the keys per table.
std::vector<ColumnProfile> profile_columns(Session& session, const RunConfig& config, const LanguagePack& pack,
                                           std::vector<TableSummary>* summaries = nullptr,
                                           std::vector<Warning>* warnings = nullptr);

/// catalog -> explicit -> sampling -> NLP -> inference -> dedup -> graph.
RunReport analyze(Session& session, const RunConfig& config, const LanguagePack& pack);

/// Self-describing JSON: version first, then keys in sorted order; floats
/// rounded to 6 decimals.
nlohmann::ordered_json report_to_json(const RunReport& report);
std::string serialize_report(const RunReport& report);

/// Rounds to 6 decimals so serialized reports are stable.
double round6(double v);

/// Pairs (from, to) of the implicit list of a serialized report.
std::vector<std::pair<ColumnRef, ColumnRef>> implicit_pairs_from_report(const nlohmann::json& report);

/// Directories searched for language packs: `extra` first, then the
/// packs shipped with the tool.
std::vector<std::filesystem::path> pack_search_path(const std::vector<std::filesystem::path>& extra);

}  // namespace flower
