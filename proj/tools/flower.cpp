// flower: discover explicit and implicit dependencies in a database and
// draw them as an ER diagram.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "flower/bench.hpp"
#include "flower/catalog.hpp"
#include "flower/config.hpp"
#include "flower/erd.hpp"
#include "flower/error.hpp"
#include "flower/name_nlp.hpp"
#include "flower/pipeline.hpp"
#include "flower/sampler.hpp"

namespace fs = std::filesystem;
using flower::ConfigError;
using flower::SourceError;

namespace {

/// Flags shared by every command that runs an analysis.
struct AnalysisFlags {
    std::string config_file;
    std::string dialect;
    std::uint64_t rows_min = 0;
    double confidence = 0.0;
    double confidence_coeff = 0.0;
    std::string mode;
    std::string lang;
    std::string policy;
    std::uint64_t seed = 0;
    bool same_table = false;
    bool no_pk_fallback = false;
    bool timing = false;
    std::vector<std::string> pack_dirs;

    std::vector<CLI::Option*> options;

    void attach(CLI::App& app) {
        app.add_option("--config", config_file, "JSON configuration file");
        options = {
            app.add_option("--dialect", dialect, "postgres, sqlite or generic"),
            app.add_option("--rows-min", rows_min, "rows read in full before sampling kicks in (default 15000)"),
            app.add_option("--confidence", confidence, "acceptance threshold in [0, 1] (default 0.95)"),
            app.add_option("--confidence-coeff", confidence_coeff, "confidence drop per shared synonym (default 0.05)"),
            app.add_option("--mode", mode, "balance or accuracy"),
            app.add_option("--lang", lang, "language pack code (default en)"),
            app.add_option("--policy", policy, "sample size policy: literal, calibrated, fixed:N or full"),
            app.add_option("--seed", seed, "random seed (default 0)"),
            app.add_flag("--same-table", same_table, "also pair columns of the same table"),
            app.add_flag("--no-pk-fallback", no_pk_fallback, "never treat unique columns as keys"),
            app.add_flag("--timing", timing, "record per-stage wall time in the report"),
        };
        app.add_option("--pack-dir", pack_dirs, "extra directory with <lang>.pack files (searched first)");
    }

    bool given(const char* name) const {
        for (auto* o : options) {
            if (o->check_lname(std::string(name).substr(2)) && o->count() > 0) return true;
        }
        return false;
    }

    flower::RunConfig resolve() const {
        nlohmann::json overrides = nlohmann::json::object();
        if (given("--dialect")) overrides["dialect"] = dialect;
        if (given("--rows-min")) overrides["rows_min"] = rows_min;
        if (given("--confidence")) overrides["confidence"] = confidence;
        if (given("--confidence-coeff")) overrides["confidence_coeff"] = confidence_coeff;
        if (given("--mode")) overrides["mode"] = mode;
        if (given("--lang")) overrides["lang"] = lang;
        if (given("--policy")) overrides["policy"] = policy;
        if (given("--seed")) overrides["seed"] = seed;
        if (same_table) overrides["same_table_pairs"] = true;
        if (no_pk_fallback) overrides["pk_fallback"] = false;
        if (timing) overrides["timing"] = true;
        std::optional<fs::path> file;
        if (!config_file.empty()) file = config_file;
        return flower::load_config(file, overrides);
    }

    flower::LanguagePack pack(const flower::RunConfig& config) const {
        std::vector<fs::path> extra(pack_dirs.begin(), pack_dirs.end());
        return flower::find_pack(config.inference.language, flower::pack_search_path(extra));
    }
};

void write_output(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw flower::Error("cannot write " + path);
    out << content;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw flower::Error("cannot read " + path);
    return std::string(std::istreambuf_iterator<char>(in), {});
}

flower::DiagramFormat format_for(const std::string& format, const std::string& path) {
    if (!format.empty()) return flower::parse_diagram_format(format);
    auto ext = fs::path(path).extension().string();
    if (ext == ".mmd" || ext == ".mermaid") return flower::DiagramFormat::Mermaid;
    if (ext == ".json") return flower::DiagramFormat::Json;
    return flower::DiagramFormat::Dot;
}

flower::RunReport run_analysis(const std::string& source, const AnalysisFlags& flags) {
    auto config = flags.resolve();
    auto pack = flags.pack(config);
    auto session = flower::open_source(source, config.dialect);
    return flower::analyze(*session, config, pack);
}

std::vector<flower::TableRef> parse_targets(const std::vector<std::string>& targets, const flower::ErGraph& graph) {
    std::vector<flower::TableRef> out;
    for (const auto& t : targets) {
        auto parts = flower::parse_qualified_name(t);
        if (parts.size() == 2) {
            out.push_back(flower::TableRef{parts[0], parts[1]});
            continue;
        }
        if (parts.size() != 1) throw ConfigError("--target expects schema.table or table, got '" + t + "'");
        std::optional<flower::TableRef> found;
        for (const auto& n : graph.nodes()) {
            if (n.ref.table == parts[0]) {
                if (found) throw ConfigError("--target '" + t + "' is ambiguous; qualify it with a schema");
                found = n.ref;
            }
        }
        if (!found) throw flower::Error("unknown entity " + t);
        out.push_back(*found);
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"flower: explicit and implicit dependency discovery with ER diagrams"};
    app.require_subcommand(1);

    // analyze
    auto* analyze_cmd = app.add_subcommand("analyze", "discover dependencies and write a report");
    std::string source, out_path, diagram_path, diagram_format;
    AnalysisFlags analyze_flags;
    analyze_cmd->add_option("--source", source, "directory of .sql/.csv files or SQLite database file")->required();
    analyze_cmd->add_option("--out", out_path, "report file (default stdout)");
    analyze_cmd->add_option("--diagram", diagram_path, "diagram file");
    analyze_cmd->add_option("--format", diagram_format, "dot, mermaid or json (default from --diagram extension)");
    analyze_flags.attach(*analyze_cmd);

    // sample-eval
    auto* sample_cmd = app.add_subcommand("sample-eval", "compare a sampling policy with a 30000-row reservoir");
    std::uint64_t se_rows = 1000000, se_rows_min = flower::kDefaultRowsMin, se_seed = 0;
    std::string se_dist = "normal", se_policy = "calibrated", se_out;
    std::size_t se_launches = 10, se_bins = 50;
    sample_cmd->add_option("--rows", se_rows, "rows in the synthetic column");
    sample_cmd->add_option("--dist", se_dist, "normal, uniform or zipf");
    sample_cmd->add_option("--policy", se_policy, "literal, calibrated, fixed:N or full");
    sample_cmd->add_option("--rows-min", se_rows_min, "rows_min for the dynamic policies");
    sample_cmd->add_option("--launches", se_launches, "repetitions per policy");
    sample_cmd->add_option("--bins", se_bins, "histogram bins");
    sample_cmd->add_option("--seed", se_seed, "random seed");
    sample_cmd->add_option("--out", se_out, "output file (default stdout)");

    // bench
    auto* bench_cmd = app.add_subcommand("bench", "synthetic databases with known dependencies");
    bench_cmd->require_subcommand(1);
    auto* bench_gen = bench_cmd->add_subcommand("generate", "write a synthetic database");
    std::string spec_path, preset, bench_out;
    std::optional<std::uint64_t> bench_seed;
    bench_gen->add_option("--spec", spec_path, "bench spec JSON file");
    bench_gen->add_option("--preset", preset, "built-in spec (stats-mimic)");
    bench_gen->add_option("--seed", bench_seed, "override the spec seed");
    bench_gen->add_option("--out", bench_out, "output directory")->required();

    auto* bench_eval = bench_cmd->add_subcommand("evaluate", "score a report against ground truth");
    std::string run_path, gt_path, eval_out;
    bench_eval->add_option("--run", run_path, "report written by analyze")->required();
    bench_eval->add_option("--gt", gt_path, "ground_truth.json")->required();
    bench_eval->add_option("--out", eval_out, "output file (default stdout)");

    auto* bench_run = bench_cmd->add_subcommand("run", "generate, analyze and score in one go");
    std::string run_spec, run_preset, run_work, run_out;
    std::size_t run_launches = 10;
    AnalysisFlags bench_flags;
    bench_run->add_option("--spec", run_spec, "bench spec JSON file");
    bench_run->add_option("--preset", run_preset, "built-in spec (stats-mimic)");
    bench_run->add_option("--work", run_work, "directory for the generated database")->required();
    bench_run->add_option("--launches", run_launches, "SSE repetitions");
    bench_run->add_option("--out", run_out, "output file (default stdout)");
    bench_flags.attach(*bench_run);

    // context
    auto* context_cmd = app.add_subcommand("context", "render the tables around some targets");
    std::string ctx_source, ctx_graph, ctx_out;
    std::vector<std::string> ctx_targets;
    std::size_t ctx_hops = 1;
    bool ctx_sizes = false;
    AnalysisFlags context_flags;
    context_cmd->add_option("--source", ctx_source, "database to analyze");
    context_cmd->add_option("--graph", ctx_graph, "graph exported with --format json");
    context_cmd->add_option("--target", ctx_targets, "schema.table (repeatable)")->required();
    context_cmd->add_option("--hops", ctx_hops, "edges to follow from the targets");
    context_cmd->add_option("--out", ctx_out, "output file (default stdout)");
    context_cmd->add_flag("--sizes", ctx_sizes, "print selected and full character counts to stderr");
    context_flags.attach(*context_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*analyze_cmd) {
            auto report = run_analysis(source, analyze_flags);
            write_output(out_path, flower::serialize_report(report));
            if (!diagram_path.empty()) {
                write_output(diagram_path, flower::export_graph(report.graph, format_for(diagram_format, diagram_path)));
            } else if (!diagram_format.empty()) {
                flower::parse_diagram_format(diagram_format);
            }
        } else if (*sample_cmd) {
            flower::SamplerConfig config;
            config.rows_min = se_rows_min;
            config.policy = flower::SamplingPolicy::parse(se_policy);
            config.seed = se_seed;
            config.histogram_bins = se_bins;
            config.validate();
            if (se_launches == 0) throw ConfigError("--launches must be >= 1");
            if (se_rows == 0) throw ConfigError("--rows must be >= 1");
            auto report = flower::run_sse_experiment(flower::parse_distribution(se_dist), se_rows, config, se_launches);
            write_output(se_out, flower::sse_report_json(report).dump(2) + "\n");
        } else if (*bench_gen) {
            flower::BenchSpec spec;
            if (!spec_path.empty()) {
                nlohmann::json j;
                try {
                    j = nlohmann::json::parse(read_file(spec_path));
                } catch (const nlohmann::json::parse_error& e) {
                    throw ConfigError("spec " + spec_path + " is not valid JSON: " + e.what());
                }
                spec = flower::BenchSpec::from_json(j);
            } else if (preset == "stats-mimic") {
                spec = flower::BenchSpec::stats_mimic();
            } else {
                throw ConfigError("bench generate needs --spec or --preset stats-mimic");
            }
            if (bench_seed) spec.seed = *bench_seed;
            auto gt = flower::generate_database(spec, bench_out);
            std::cerr << "wrote " << bench_out << " with " << gt.deps.size() << " ground-truth dependencies\n";
        } else if (*bench_eval) {
            nlohmann::json report;
            try {
                report = nlohmann::json::parse(read_file(run_path));
            } catch (const nlohmann::json::parse_error& e) {
                throw flower::Error("report " + run_path + " is not valid JSON: " + e.what());
            }
            auto predicted = flower::implicit_pairs_from_report(report);
            if (report.contains("explicit")) {
                for (const auto& d : report["explicit"]) {
                    predicted.emplace_back(flower::parse_column_ref(d.at("from").get<std::string>()),
                                           flower::parse_column_ref(d.at("to").get<std::string>()));
                }
            }
            auto eval = flower::evaluate_accuracy(std::span<const flower::DepPair>(predicted), flower::GroundTruth::load(gt_path));
            write_output(eval_out, eval.to_json().dump(2) + "\n");
        } else if (*bench_run) {
            flower::BenchSpec spec;
            if (!run_spec.empty()) {
                spec = flower::BenchSpec::from_json(nlohmann::json::parse(read_file(run_spec)));
            } else if (run_preset == "stats-mimic") {
                spec = flower::BenchSpec::stats_mimic();
            } else {
                throw ConfigError("bench run needs --spec or --preset stats-mimic");
            }
            auto config = bench_flags.resolve();
            auto pack = bench_flags.pack(config);
            auto result = flower::run_benchmark(spec, config, pack, run_work, run_launches);
            write_output(run_out, result.to_json().dump(2) + "\n");
        } else if (*context_cmd) {
            flower::ErGraph graph;
            if (!ctx_graph.empty()) {
                graph = flower::import_graph_json(read_file(ctx_graph));
            } else if (!ctx_source.empty()) {
                graph = run_analysis(ctx_source, context_flags).graph;
            } else {
                throw ConfigError("context needs --source or --graph");
            }
            auto targets = parse_targets(ctx_targets, graph);
            auto selection = flower::select_context(graph, targets, ctx_hops);
            write_output(ctx_out, selection.text);
            if (ctx_sizes) {
                std::cerr << "selected_chars " << flower::context_size(selection.text) << " full_chars "
                          << flower::context_size(flower::render_full_context(graph)) << "\n";
            }
        }
    } catch (const ConfigError& e) {
        std::cerr << "flower: config error: " << e.what() << "\n";
        return 2;
    } catch (const SourceError& e) {
        std::cerr << "flower: source error: " << e.what() << "\n";
        return 1;
    } catch (const flower::Error& e) {
        std::cerr << "flower: error: " << e.what() << "\n";
        return 1;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "flower: error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
