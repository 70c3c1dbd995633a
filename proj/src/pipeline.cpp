#include "flower/pipeline.hpp"

#include <chrono>
#include <cmath>

#include "flower/error.hpp"

#ifndef FLOWER_DEFAULT_PACK_DIR
#define FLOWER_DEFAULT_PACK_DIR "data/lang"
#endif

namespace flower {

double round6(double v) {
    double r = std::round(v * 1e6) / 1e6;
    return r == 0.0 ? 0.0 : r;  // no "-0.0"
}

std::vector<std::filesystem::path> pack_search_path(const std::vector<std::filesystem::path>& extra) {
    std::vector<std::filesystem::path> dirs = extra;
    dirs.emplace_back(FLOWER_DEFAULT_PACK_DIR);
    return dirs;
}

namespace {

std::string column_stream_key(const TableRef& table, const Identifier& column) {
    return table.schema.key() + "." + table.table.key() + "." + column.key();
}

class StageClock {
public:
    explicit StageClock(std::map<std::string, double>* sink) : sink_(sink), start_(std::chrono::steady_clock::now()) {}

    void lap(const std::string& stage) {
        auto now = std::chrono::steady_clock::now();
        if (sink_) (*sink_)[stage] = std::chrono::duration<double>(now - start_).count();
        start_ = now;
    }

private:
    std::map<std::string, double>* sink_;
    std::chrono::steady_clock::time_point start_;
};

}  // namespace

std::vector<ColumnProfile> profile_columns(Session& session, const RunConfig& config, const LanguagePack& pack,
                                           std::vector<TableSummary>* summaries, std::vector<Warning>* warnings) {
    const Catalog& catalog = session.catalog();
    std::vector<ColumnProfile> profiles;

    for (const TableMeta& table : catalog.tables) {
        TableSummary summary{table.ref, table.rows_all, table.is_empty || table.rows_all == 0, table.ddl_accessible, {}, false};

        if (!summary.empty && !table.columns.empty()) {
            std::vector<std::vector<Cell>> columns(table.columns.size());
            bool scanned = true;
            try {
                session.scan_rows(table, [&](std::span<const Cell> row) {
                    for (std::size_t c = 0; c < columns.size(); ++c) {
                        columns[c].push_back(c < row.size() ? row[c] : Cell{});
                    }
                });
            } catch (const Error& e) {
                scanned = false;
                if (warnings) warnings->push_back({table.ref.render(), std::string("rows not readable: ") + e.what()});
            }

            if (scanned) {
                const auto rows_all = static_cast<std::uint64_t>(columns.front().size());
                summary.rows = rows_all;
                summary.empty = rows_all == 0;
                SamplerConfig sampler = effective_sampler_config(config.inference.mode, config.sampler, rows_all);

                std::vector<ColumnProfile> table_profiles;
                for (std::size_t c = 0; c < table.columns.size() && rows_all > 0; ++c) {
                    const ColumnMeta& column = table.columns[c];
                    ColumnProfile profile;
                    profile.table = table.ref;
                    profile.column = column;
                    const std::uint64_t rows_uq = count_distinct(columns[c]);
                    const std::uint64_t target = compute_sample_size(rows_all, rows_uq, sampler);
                    const std::uint64_t seed =
                        mix_seed(config.sampler.seed, hash_string(column_stream_key(table.ref, column.name)));
                    profile.sample = draw_sample(columns[c], target, seed);
                    profile.synonyms = column_synonyms(column.name.spelling(), config.inference.confidence,
                                                       config.inference.confidence_coeff, pack);
                    table_profiles.push_back(std::move(profile));
                }

                if (table.primary_key.size() == 1) {
                    for (auto& p : table_profiles) {
                        if (p.column.name == table.primary_key.front()) {
                            p.is_key = true;
                            summary.keys.push_back(p.column.name);
                        }
                    }
                } else if (table.primary_key.empty() && config.inference.pk_fallback) {
                    for (auto& p : table_profiles) {
                        const auto& s = p.sample;
                        if (s.rows_all > 0 && s.rows_sampled == s.rows_all && s.null_count == 0 &&
                            s.rows_uq == s.rows_all) {
                            p.is_key = true;
                            summary.keys.push_back(p.column.name);
                            summary.key_from_data = true;
                        }
                    }
                }
                for (auto& p : table_profiles) profiles.push_back(std::move(p));
            }
        }
        if (summaries) summaries->push_back(std::move(summary));
    }
    return profiles;
}

RunReport analyze(Session& session, const RunConfig& config, const LanguagePack& pack) {
    config.validate();
    RunReport report;
    report.source = session.locator();
    report.dialect = session.dialect();
    report.config = config;
    StageClock clock(config.timing ? &report.timing : nullptr);

    const Catalog& catalog = session.catalog();
    report.warnings = catalog.warnings;
    clock.lap("catalog");

    report.explicit_deps = catalog.explicit_deps;
    report.dangling = catalog.dangling;
    clock.lap("explicit");

    auto profiles = profile_columns(session, config, pack, &report.tables, &report.warnings);
    clock.lap("sampling_nlp");

    auto implicit = infer_all(profiles, config.inference);
    clock.lap("inference");

    report.implicit = deduplicate(std::move(implicit), report.explicit_deps);
    clock.lap("deduplication");

    report.graph = build_graph(catalog.tables, report.explicit_deps, report.implicit);
    clock.lap("graph");

    if (config.sampler.policy.kind == SamplingPolicy::Kind::LiteralEq1) {
        report.notes.push_back(
            "policy literal: sample size rows_min + sqrt(rows_uq/rows_all*rows_min + rows_all/rows_min); "
            "this grows far slower than the published sampled-row counts, use --policy calibrated "
            "(rows_min + rows_all/sqrt(rows_min)) to track them");
    }
    if (config.inference.mode == Mode::Accuracy) {
        report.notes.push_back("mode accuracy: rows_min is quadrupled and tables under 10*rows_min rows are read in full");
    }
    return report;
}

namespace {

nlohmann::json explicit_json(const ExplicitDep& d) {
    nlohmann::json j;
    j["constraint"] = d.constraint_name;
    j["from"] = d.from.render();
    j["group"] = d.group;
    j["position"] = d.position;
    j["to"] = d.to.render();
    return j;
}

}  // namespace

nlohmann::ordered_json report_to_json(const RunReport& report) {
    nlohmann::json body;  // std::map-backed: keys come out sorted
    body["config"] = config_echo(report.config);
    body["config"]["confidence"] = round6(report.config.inference.confidence);
    body["config"]["confidence_coeff"] = round6(report.config.inference.confidence_coeff);

    body["dangling"] = nlohmann::json::array();
    for (const auto& d : report.dangling) {
        auto j = explicit_json(d.dep);
        j["reason"] = d.reason;
        body["dangling"].push_back(j);
    }
    body["dialect"] = std::string(to_string(report.dialect));

    body["explicit"] = nlohmann::json::array();
    for (const auto& d : report.explicit_deps) body["explicit"].push_back(explicit_json(d));

    body["implicit"] = nlohmann::json::array();
    for (const auto& d : report.implicit) {
        nlohmann::json j;
        j["adapted_confidence"] = round6(d.adapted_confidence);
        j["criteria_trace"] = d.criteria_trace;
        j["from"] = d.from.render();
        j["rows_intersection"] = round6(d.rows_intersection);
        j["synonyms_intersection"] = d.synonyms_intersection;
        j["to"] = d.to.render();
        body["implicit"].push_back(j);
    }
    body["notes"] = report.notes;
    body["source"] = report.source;

    body["tables"] = nlohmann::json::array();
    for (const auto& t : report.tables) {
        nlohmann::json j;
        j["ddl_accessible"] = t.ddl_accessible;
        j["empty"] = t.empty;
        j["key_from_data"] = t.key_from_data;
        j["keys"] = nlohmann::json::array();
        for (const auto& k : t.keys) j["keys"].push_back(k.render());
        j["rows"] = t.rows;
        j["schema"] = t.ref.schema.render();
        j["table"] = t.ref.table.render();
        body["tables"].push_back(j);
    }

    body["timing"] = nlohmann::json::object();
    for (const auto& [stage, seconds] : report.timing) body["timing"][stage] = round6(seconds);

    body["warnings"] = nlohmann::json::array();
    for (const auto& w : report.warnings) body["warnings"].push_back({{"entity", w.entity}, {"message", w.message}});

    nlohmann::ordered_json out;
    out["version"] = report.version;
    for (const auto& [key, value] : body.items()) out[key] = nlohmann::ordered_json::parse(value.dump());
    return out;
}

std::string serialize_report(const RunReport& report) { return report_to_json(report).dump(2) + "\n"; }

std::vector<std::pair<ColumnRef, ColumnRef>> implicit_pairs_from_report(const nlohmann::json& report) {
    std::vector<std::pair<ColumnRef, ColumnRef>> out;
    if (!report.is_object() || !report.contains("implicit") || !report["implicit"].is_array()) {
        throw Error("report has no implicit list");
    }
    for (const auto& d : report["implicit"]) {
        out.emplace_back(parse_column_ref(d.at("from").get<std::string>()), parse_column_ref(d.at("to").get<std::string>()));
    }
    return out;
}

}  // namespace flower
