#include "flower/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "flower/csv.hpp"
#include "flower/error.hpp"

namespace flower {

std::string_view to_string(NamingStyle style) {
    switch (style) {
        case NamingStyle::Snake: return "snake";
        case NamingStyle::Camel: return "camel";
        case NamingStyle::Mixed: return "mixed";
    }
    return "snake";
}

NamingStyle parse_naming_style(std::string_view text) {
    if (text == "snake") return NamingStyle::Snake;
    if (text == "camel") return NamingStyle::Camel;
    if (text == "mixed") return NamingStyle::Mixed;
    throw ConfigError("invalid naming style '" + std::string(text) + "': expected snake, camel or mixed");
}

// ---------------------------------------------------------------- spec

void BenchSpec::validate() const {
    if (!preset.empty() && preset != "stats-mimic") throw ConfigError("unknown bench preset '" + preset + "'");
    if (columns_min < 1 || columns_min > columns_max) {
        throw ConfigError("bench spec: need 1 <= columns_min <= columns_max");
    }
    if (rows_min < 1 || rows_min > rows_max) throw ConfigError("bench spec: need 1 <= rows_min <= rows_max");
    if (!(fk_density >= 0.0 && fk_density <= 1.0)) throw ConfigError("bench spec: fk_density must be within [0, 1]");
}

BenchSpec BenchSpec::stats_mimic(std::uint64_t seed) {
    BenchSpec spec;
    spec.preset = "stats-mimic";
    spec.seed = seed;
    spec.naming = NamingStyle::Camel;
    return spec;
}

BenchSpec BenchSpec::from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("bench spec must be a JSON object");
    static const std::set<std::string> known = {"preset",   "schemas",  "tables_per_schema", "columns_min",
                                                "columns_max", "naming", "distribution",     "rows_min",
                                                "rows_max", "fk_density", "seed",            "declare_fks"};
    std::string unknown;
    for (const auto& [key, value] : j.items()) {
        if (!known.count(key)) unknown += (unknown.empty() ? "" : ", ") + key;
    }
    if (!unknown.empty()) throw ConfigError("bench spec: unknown key(s): " + unknown);

    BenchSpec spec;
    try {
        spec.preset = j.value("preset", spec.preset);
        if (spec.preset == "stats-mimic") spec = stats_mimic();
        spec.schemas = j.value("schemas", spec.schemas);
        spec.tables_per_schema = j.value("tables_per_schema", spec.tables_per_schema);
        spec.columns_min = j.value("columns_min", spec.columns_min);
        spec.columns_max = j.value("columns_max", spec.columns_max);
        if (j.contains("naming")) spec.naming = parse_naming_style(j["naming"].get<std::string>());
        if (j.contains("distribution")) spec.distribution = parse_distribution(j["distribution"].get<std::string>());
        spec.rows_min = j.value("rows_min", spec.rows_min);
        spec.rows_max = j.value("rows_max", spec.rows_max);
        spec.fk_density = j.value("fk_density", spec.fk_density);
        spec.seed = j.value("seed", spec.seed);
        spec.declare_fks = j.value("declare_fks", spec.declare_fks);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bench spec: ") + e.what());
    }
    spec.validate();
    return spec;
}

nlohmann::json BenchSpec::to_json() const {
    nlohmann::json j;
    j["columns_max"] = columns_max;
    j["columns_min"] = columns_min;
    j["declare_fks"] = declare_fks;
    j["distribution"] = std::string(to_string(distribution));
    j["fk_density"] = fk_density;
    j["naming"] = std::string(to_string(naming));
    j["preset"] = preset;
    j["rows_max"] = rows_max;
    j["rows_min"] = rows_min;
    j["schemas"] = schemas;
    j["seed"] = seed;
    j["tables_per_schema"] = tables_per_schema;
    return j;
}

// -------------------------------------------------------- ground truth

nlohmann::json GroundTruth::to_json() const {
    nlohmann::json deps_json = nlohmann::json::array();
    for (const auto& [from, to] : deps) deps_json.push_back({{"from", from.render()}, {"to", to.render()}});
    return {{"dependencies", deps_json}};
}

GroundTruth GroundTruth::from_json(const nlohmann::json& j) {
    GroundTruth gt;
    try {
        for (const auto& d : j.at("dependencies")) {
            gt.deps.emplace_back(parse_column_ref(d.at("from").get<std::string>()),
                                 parse_column_ref(d.at("to").get<std::string>()));
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("malformed ground truth: ") + e.what());
    }
    std::sort(gt.deps.begin(), gt.deps.end());
    gt.deps.erase(std::unique(gt.deps.begin(), gt.deps.end()), gt.deps.end());
    return gt;
}

GroundTruth GroundTruth::load(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw Error("cannot read ground truth " + file.string());
    try {
        return from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::parse_error& e) {
        throw Error("ground truth " + file.string() + " is not valid JSON: " + e.what());
    }
}

// ----------------------------------------------------------- generator

namespace {

/// Portable random source: only mt19937_64 output and our own transforms,
/// never the implementation-defined std distributions.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t below(std::uint64_t bound) { return uniform_below(engine_, bound); }
    std::uint64_t between(std::uint64_t lo, std::uint64_t hi) { return lo + below(hi - lo + 1); }
    double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    bool chance(double p) { return unit() < p; }

    double normal() {
        double u1 = unit();
        while (u1 <= 0.0) u1 = unit();
        double u2 = unit();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
    }

private:
    std::mt19937_64 engine_;
};

class ZipfTable {
public:
    ZipfTable(std::size_t n, double s) : cdf_(n) {
        double total = 0.0;
        for (std::size_t k = 1; k <= n; ++k) {
            total += 1.0 / std::pow(static_cast<double>(k), s);
            cdf_[k - 1] = total;
        }
        for (auto& c : cdf_) c /= total;
    }

    std::int64_t draw(Rng& rng) const {
        double u = rng.unit();
        auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
        return static_cast<std::int64_t>(std::min<std::size_t>(it - cdf_.begin(), cdf_.size() - 1)) + 1;
    }

private:
    std::vector<double> cdf_;
};

const ZipfTable& zipf_1000() {
    static const ZipfTable table(1000, 1.1);
    return table;
}

enum class Gen { Key, Foreign, IntUniform, IntNormal, IntZipf, Real, Text, Date, Timestamp, Bool };

struct ColPlan {
    std::vector<std::string> words;  // name as lowercase words, styled later
    std::string name;
    std::string type;
    Gen gen = Gen::IntUniform;
    std::size_t ref = 0;  // referenced table index (Foreign)
    double null_fraction = 0.0;
    std::int64_t lo = 0, hi = 0;  // IntUniform bounds, IntNormal mean/sd, IntZipf scale in lo
    Distribution dist = Distribution::Normal;
};

struct TablePlan {
    std::string schema;
    std::string name;
    std::uint64_t rows = 0;
    std::vector<ColPlan> cols;
    std::vector<std::int64_t> keys;
};

std::string capitalized(std::string w) {
    if (!w.empty() && w[0] >= 'a' && w[0] <= 'z') w[0] = static_cast<char>(w[0] - 'a' + 'A');
    return w;
}

std::string style_name(const std::vector<std::string>& words, bool camel) {
    std::string out;
    for (const auto& w : words) {
        if (camel) {
            out += capitalized(w);
        } else {
            out += (out.empty() ? "" : "_") + w;
        }
    }
    return out;
}

std::string format_date(std::int64_t day_offset, std::int64_t seconds = -1) {
    using namespace std::chrono;
    const sys_days base = year{2010} / January / 1;
    const year_month_day ymd{base + days{day_offset}};
    char buf[48];
    if (seconds < 0) {
        std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                      static_cast<unsigned>(ymd.day()));
    } else {
        std::snprintf(buf, sizeof buf, "%04d-%02u-%02u %02d:%02d:%02d", static_cast<int>(ymd.year()),
                      static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                      static_cast<int>(seconds / 3600), static_cast<int>(seconds / 60 % 60), static_cast<int>(seconds % 60));
    }
    return buf;
}

std::string format_real(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

const std::vector<std::string>& text_words() {
    static const std::vector<std::string> words = {"alpha", "bravo", "charlie", "delta", "echo", "foxtrot",
                                                   "golf",  "hotel", "india",   "juliet", "kilo", "lima"};
    return words;
}

ColPlan filler(std::vector<std::string> words, std::string type, Gen gen, std::int64_t lo = 0, std::int64_t hi = 0,
               double nulls = 0.0) {
    ColPlan c;
    c.words = std::move(words);
    c.type = std::move(type);
    c.gen = gen;
    c.lo = lo;
    c.hi = hi;
    c.null_fraction = nulls;
    return c;
}

ColPlan key_col() { return filler({"id"}, "integer", Gen::Key); }

ColPlan fk_col(std::vector<std::string> words, std::size_t ref, double nulls = 0.0) {
    ColPlan c = filler(std::move(words), "integer", Gen::Foreign, 0, 0, nulls);
    c.ref = ref;
    return c;
}

std::vector<TablePlan> stats_mimic_plan() {
    auto ts = [](std::vector<std::string> w) { return filler(std::move(w), "timestamp", Gen::Timestamp); };
    std::vector<TablePlan> t(8);
    // Referenced tables first; every referencing table is at least as large
    // as the tables it points to.
    t[0] = {"stats", "users", 500, {key_col(), filler({"reputation"}, "integer", Gen::IntZipf, 10), ts({"creation", "date"}),
                                    filler({"views"}, "integer", Gen::IntZipf, 1), filler({"up", "votes"}, "integer", Gen::IntUniform, 0, 40),
                                    filler({"down", "votes"}, "integer", Gen::IntUniform, 0, 15)}, {}};
    t[1] = {"stats", "posts", 800, {key_col(), filler({"post", "type", "id"}, "integer", Gen::IntUniform, 1, 7),
                                    ts({"creation", "date"}), filler({"score"}, "integer", Gen::IntUniform, -5, 60),
                                    filler({"view", "count"}, "integer", Gen::IntZipf, 25), fk_col({"owner", "user", "id"}, 0),
                                    filler({"answer", "count"}, "integer", Gen::IntUniform, 0, 12),
                                    filler({"comment", "count"}, "integer", Gen::IntUniform, 0, 25),
                                    filler({"favorite", "count"}, "integer", Gen::IntUniform, 0, 30, 0.3),
                                    fk_col({"last", "editor", "user", "id"}, 0, 0.2)}, {}};
    t[2] = {"stats", "tags", 1000, {key_col(), filler({"tag", "name"}, "varchar(150)", Gen::Text),
                                    filler({"count"}, "integer", Gen::IntZipf, 3), fk_col({"excess", "post", "id"}, 1, 0.1)}, {}};
    t[3] = {"stats", "postLinks", 1200, {key_col(), ts({"creation", "date"}), fk_col({"post", "id"}, 1),
                                         fk_col({"related", "post", "id"}, 1), filler({"link", "type", "id"}, "integer", Gen::IntUniform, 1, 3)}, {}};
    t[4] = {"stats", "badges", 1500, {key_col(), fk_col({"user", "id"}, 0), ts({"date"})}, {}};
    t[5] = {"stats", "comments", 2400, {key_col(), fk_col({"post", "id"}, 1), filler({"score"}, "integer", Gen::IntUniform, 0, 20),
                                        ts({"creation", "date"}), fk_col({"user", "id"}, 0, 0.05)}, {}};
    t[6] = {"stats", "postHistory", 3000, {key_col(), filler({"post", "history", "type", "id"}, "integer", Gen::IntUniform, 1, 38),
                                           fk_col({"post", "id"}, 1), ts({"creation", "date"}), fk_col({"user", "id"}, 0, 0.1)}, {}};
    t[7] = {"stats", "votes", 3200, {key_col(), fk_col({"post", "id"}, 1), filler({"vote", "type", "id"}, "integer", Gen::IntUniform, 1, 15),
                                     ts({"creation", "date"}), fk_col({"user", "id"}, 0, 0.1),
                                     filler({"bounty", "amount"}, "integer", Gen::IntUniform, 0, 10, 0.8)}, {}};
    for (auto& table : t) {
        for (auto& c : table.cols) c.name = style_name(c.words, true);
    }
    return t;
}

const std::vector<std::string>& entity_words() {
    static const std::vector<std::string> words = {"customer", "order",    "product",  "supplier", "invoice",
                                                   "payment",  "shipment", "employee", "department", "project",
                                                   "account",  "region",   "store",    "category", "review",
                                                   "ticket",   "warehouse", "vendor",  "contract", "branch"};
    return words;
}

const std::vector<std::string>& schema_words() {
    static const std::vector<std::string> words = {"sales", "hr", "ops", "finance", "crm", "logistics"};
    return words;
}

struct FillerKind {
    std::vector<std::vector<std::string>> names;
    std::string type;
    Gen gen;
};

const std::vector<FillerKind>& filler_kinds() {
    static const std::vector<FillerKind> kinds = {
        {{{"quantity"}, {"score"}, {"level"}, {"visits"}, {"units"}}, "integer", Gen::IntNormal},
        {{{"amount"}, {"price"}, {"weight"}, {"balance"}, {"ratio"}}, "double precision", Gen::Real},
        {{{"title"}, {"label"}, {"note"}, {"status"}, {"code", "name"}}, "varchar(64)", Gen::Text},
        {{{"created", "on"}, {"opened", "on"}, {"due", "date"}}, "date", Gen::Date},
        {{{"is", "active"}, {"flagged"}, {"archived"}}, "boolean", Gen::Bool},
    };
    return kinds;
}

std::vector<TablePlan> generic_plan(const BenchSpec& spec, Rng& rng) {
    const std::size_t total = spec.schemas * spec.tables_per_schema;
    std::vector<std::uint64_t> sizes(total);
    for (auto& s : sizes) s = rng.between(spec.rows_min, spec.rows_max);
    std::sort(sizes.begin(), sizes.end());

    std::vector<TablePlan> tables;
    std::vector<std::string> entity_of;
    for (std::size_t s = 0; s < spec.schemas; ++s) {
        std::string schema = s < schema_words().size() ? schema_words()[s] : "schema" + std::to_string(s + 1);
        std::vector<std::string> pool = entity_words();
        rng.shuffle(pool);
        for (std::size_t t = 0; t < spec.tables_per_schema; ++t) {
            std::string entity = pool[t % pool.size()];
            if (t >= pool.size()) entity += std::to_string(t / pool.size() + 1);
            TablePlan plan;
            plan.schema = schema;
            plan.name = entity;
            plan.rows = sizes[tables.size()];
            tables.push_back(std::move(plan));
            entity_of.push_back(entity);
        }
    }

    for (std::size_t i = 0; i < tables.size(); ++i) {
        auto& table = tables[i];
        bool camel = spec.naming == NamingStyle::Camel || (spec.naming == NamingStyle::Mixed && rng.chance(0.5));
        std::set<std::string> used;
        auto add = [&](ColPlan c) {
            c.name = style_name(c.words, camel);
            std::string key = to_lower_ascii(c.name);
            if (used.count(key)) {
                c.words.push_back(std::to_string(table.cols.size() + 1));
                c.name = style_name(c.words, camel);
                key = to_lower_ascii(c.name);
            }
            used.insert(key);
            table.cols.push_back(std::move(c));
        };

        add(key_col());
        for (std::size_t j = 0; j < i; ++j) {
            if (!rng.chance(spec.fk_density)) continue;
            std::vector<std::string> words = {entity_of[j], "id"};
            std::string probe = to_lower_ascii(style_name(words, camel));
            if (used.count(probe)) words.insert(words.begin(), tables[j].schema);
            add(fk_col(std::move(words), j));
        }
        const std::size_t target = rng.between(spec.columns_min, spec.columns_max);
        while (table.cols.size() < target) {
            const auto& kind = filler_kinds()[rng.below(filler_kinds().size())];
            ColPlan c = filler(kind.names[rng.below(kind.names.size())], kind.type, kind.gen);
            c.dist = spec.distribution;
            if (c.gen == Gen::IntNormal) {
                switch (spec.distribution) {
                    case Distribution::Normal: c.lo = 50000, c.hi = 15000; break;
                    case Distribution::Uniform: c.gen = Gen::IntUniform, c.lo = 0, c.hi = 999999; break;
                    case Distribution::Zipf: c.gen = Gen::IntZipf, c.lo = 1; break;
                }
            }
            add(std::move(c));
        }
    }
    return tables;
}

std::vector<std::int64_t> make_keys(std::uint64_t rows, Rng& rng) {
    std::vector<std::int64_t> keys(rows);
    std::int64_t next = 0;
    for (auto& k : keys) {
        next += static_cast<std::int64_t>(rng.between(1, 3));
        k = next;
    }
    return keys;
}

std::vector<Cell> make_column(const ColPlan& col, const TablePlan& table, const std::vector<TablePlan>& all, Rng& rng) {
    const std::uint64_t rows = table.rows;
    std::vector<Cell> out;
    out.reserve(rows);

    if (col.gen == Gen::Key) {
        for (auto k : table.keys) out.emplace_back(std::to_string(k));
        return out;
    }

    auto nulls = static_cast<std::uint64_t>(std::floor(col.null_fraction * static_cast<double>(rows)));
    const std::uint64_t filled = rows - nulls;

    if (col.gen == Gen::Foreign) {
        const auto& keys = all[col.ref].keys;
        std::vector<std::int64_t> values;
        values.reserve(filled);
        // Cover every referenced key when there are enough rows.
        if (filled >= keys.size()) values.assign(keys.begin(), keys.end());
        while (values.size() < filled) values.push_back(keys[rng.below(keys.size())]);
        for (auto v : values) out.emplace_back(std::to_string(v));
    } else {
        for (std::uint64_t r = 0; r < filled; ++r) {
            switch (col.gen) {
                case Gen::IntUniform: out.emplace_back(std::to_string(col.lo + static_cast<std::int64_t>(rng.below(col.hi - col.lo + 1)))); break;
                case Gen::IntNormal: out.emplace_back(std::to_string(static_cast<std::int64_t>(std::llround(col.lo + col.hi * rng.normal())))); break;
                case Gen::IntZipf: out.emplace_back(std::to_string(zipf_1000().draw(rng) * col.lo)); break;
                case Gen::Real: {
                    double v = col.dist == Distribution::Normal    ? 100.0 + 25.0 * rng.normal()
                               : col.dist == Distribution::Uniform ? rng.unit() * 1000.0
                                                                   : 1.5 * static_cast<double>(zipf_1000().draw(rng));
                    out.emplace_back(format_real(v));
                    break;
                }
                case Gen::Text: {
                    const auto& words = text_words();
                    out.emplace_back(words[rng.below(words.size())] + "-" + std::to_string(rng.below(10000)));
                    break;
                }
                case Gen::Date: out.emplace_back(format_date(static_cast<std::int64_t>(rng.below(3650)))); break;
                case Gen::Timestamp:
                    out.emplace_back(format_date(static_cast<std::int64_t>(rng.below(3650)), static_cast<std::int64_t>(rng.below(86400))));
                    break;
                case Gen::Bool: out.emplace_back(rng.chance(0.5) ? "true" : "false"); break;
                case Gen::Key:
                case Gen::Foreign: break;
            }
        }
    }
    for (std::uint64_t r = 0; r < nulls; ++r) out.emplace_back(std::nullopt);
    rng.shuffle(out);
    return out;
}

std::string table_ddl(const TablePlan& table, const std::vector<TablePlan>& all, bool declare_fks) {
    std::string ddl = "CREATE TABLE " + table.schema + "." + table.name + " (\n";
    std::vector<std::string> lines;
    for (const auto& c : table.cols) {
        std::string line = "    " + c.name + " " + c.type;
        if (c.gen == Gen::Key) line += " PRIMARY KEY";
        if (c.gen != Gen::Key && c.null_fraction == 0.0) line += " NOT NULL";
        lines.push_back(line);
    }
    if (declare_fks) {
        for (const auto& c : table.cols) {
            if (c.gen != Gen::Foreign) continue;
            const auto& target = all[c.ref];
            lines.push_back("    CONSTRAINT fk_" + to_lower_ascii(table.name) + "_" + to_lower_ascii(c.name) +
                            " FOREIGN KEY (" + c.name + ") REFERENCES " + target.schema + "." + target.name + " (" +
                            target.cols.front().name + ")");
        }
    }
    for (std::size_t i = 0; i < lines.size(); ++i) ddl += lines[i] + (i + 1 < lines.size() ? ",\n" : "\n");
    return ddl + ");\n";
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << content;
    if (!out) throw Error("cannot write " + path.string());
}

}  // namespace

GroundTruth generate_database(const BenchSpec& spec, const std::filesystem::path& out_dir) {
    spec.validate();
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec || !std::filesystem::is_directory(out_dir)) {
        throw Error("output directory not writable: " + out_dir.string());
    }

    Rng rng(mix_seed(spec.seed, hash_string("bench")));
    std::vector<TablePlan> tables = spec.preset == "stats-mimic" ? stats_mimic_plan() : generic_plan(spec, rng);
    for (auto& t : tables) t.keys = make_keys(t.rows, rng);

    GroundTruth gt;
    std::string ddl;
    for (const auto& table : tables) {
        ddl += table_ddl(table, tables, spec.declare_fks) + "\n";
        const TableRef ref = parse_table_ref(table.schema + "." + table.name);
        for (const auto& c : table.cols) {
            if (c.gen != Gen::Foreign) continue;
            const auto& target = tables[c.ref];
            gt.deps.emplace_back(ColumnRef{ref, Identifier(c.name)},
                                 ColumnRef{parse_table_ref(target.schema + "." + target.name), Identifier(target.cols.front().name)});
        }
    }
    std::sort(gt.deps.begin(), gt.deps.end());
    write_file(out_dir / "schema.sql", ddl);

    for (const auto& table : tables) {
        std::vector<std::vector<Cell>> columns;
        for (const auto& c : table.cols) columns.push_back(make_column(c, table, tables, rng));

        std::ostringstream csv;
        std::vector<Cell> header;
        for (const auto& c : table.cols) header.emplace_back(c.name);
        write_csv_record(csv, header);
        std::vector<Cell> row(table.cols.size());
        for (std::uint64_t r = 0; r < table.rows; ++r) {
            for (std::size_t c = 0; c < columns.size(); ++c) row[c] = columns[c][r];
            write_csv_record(csv, row);
        }
        write_file(out_dir / (table.schema + "." + table.name + ".csv"), csv.str());
    }
    write_file(out_dir / kGroundTruthFile, gt.to_json().dump(2) + "\n");
    return gt;
}

// ------------------------------------------------------------ scoring

nlohmann::json EvaluationReport::to_json() const {
    auto pairs = [](const std::vector<DepPair>& v) {
        nlohmann::json a = nlohmann::json::array();
        for (const auto& [from, to] : v) a.push_back({{"from", from.render()}, {"to", to.render()}});
        return a;
    };
    nlohmann::json j;
    j["f1"] = round6(f1);
    j["gt_count"] = gt_count;
    j["hallucinated"] = pairs(hallucinated);
    j["literal_accuracy"] = literal_accuracy ? nlohmann::json(round6(*literal_accuracy)) : nlohmann::json(nullptr);
    j["literal_undefined"] = literal_undefined;
    j["matched"] = matched;
    j["missed"] = pairs(missed);
    j["precision"] = round6(precision);
    j["predicted_count"] = predicted_count;
    j["recall"] = round6(recall);
    return j;
}

EvaluationReport evaluate_accuracy(std::span<const DepPair> predicted, const GroundTruth& gt) {
    std::set<DepPair> pred(predicted.begin(), predicted.end());
    std::set<DepPair> truth(gt.deps.begin(), gt.deps.end());

    EvaluationReport r;
    r.gt_count = truth.size();
    r.predicted_count = pred.size();
    for (const auto& p : pred) {
        if (truth.count(p)) {
            ++r.matched;
        } else {
            r.hallucinated.push_back(p);
        }
    }
    for (const auto& t : truth) {
        if (!pred.count(t)) r.missed.push_back(t);
    }

    if (r.predicted_count == 0) {
        if (r.gt_count == 0) {
            r.literal_accuracy = 1.0;
        } else {
            r.literal_undefined = true;
        }
    } else {
        r.literal_accuracy = static_cast<double>(r.gt_count) / static_cast<double>(r.predicted_count);
    }
    if (r.predicted_count > 0) r.precision = static_cast<double>(r.matched) / static_cast<double>(r.predicted_count);
    if (r.gt_count > 0) r.recall = static_cast<double>(r.matched) / static_cast<double>(r.gt_count);
    if (r.precision + r.recall > 0.0) r.f1 = 2.0 * r.precision * r.recall / (r.precision + r.recall);
    return r;
}

EvaluationReport evaluate_accuracy(std::span<const ImplicitDep> predicted, const GroundTruth& gt) {
    std::vector<DepPair> pairs;
    for (const auto& d : predicted) pairs.emplace_back(d.from, d.to);
    return evaluate_accuracy(std::span<const DepPair>(pairs), gt);
}

nlohmann::json sse_report_json(const SseReport& s) {
    nlohmann::json j;
    auto rounded = [](const std::vector<double>& v) {
        std::vector<double> out;
        for (double x : v) out.push_back(round6(x));
        return out;
    };
    j["bins"] = s.bins;
    j["distribution"] = s.distribution;
    j["launches"] = s.launches;
    j["per_launch_baseline"] = rounded(s.per_launch_baseline);
    j["per_launch_dynamic"] = rounded(s.per_launch_dynamic);
    j["policy"] = s.policy;
    j["rows_all"] = s.rows_all;
    j["rows_min"] = s.rows_min;
    j["rows_sampled_baseline"] = s.rows_sampled_baseline;
    j["rows_sampled_dynamic"] = s.rows_sampled_dynamic;
    j["rows_uq"] = s.rows_uq;
    j["sse_baseline"] = round6(s.sse_baseline);
    j["sse_dynamic"] = round6(s.sse_dynamic);
    return j;
}

nlohmann::ordered_json BenchmarkResult::to_json() const {
    nlohmann::ordered_json j;
    j["evaluation"] = nlohmann::ordered_json::parse(evaluation.to_json().dump());
    j["ground_truth"] = nlohmann::ordered_json::parse(ground_truth.to_json().dump());
    j["run"] = report_to_json(run);
    j["spec"] = nlohmann::ordered_json::parse(spec.to_json().dump());
    j["sse"] = nlohmann::ordered_json::parse(sse_report_json(sse).dump());
    return j;
}

BenchmarkResult run_benchmark(const BenchSpec& spec, const RunConfig& config, const LanguagePack& pack,
                              const std::filesystem::path& work_dir, std::size_t sse_launches) {
    BenchmarkResult result;
    result.spec = spec;
    result.ground_truth = generate_database(spec, work_dir);

    auto session = open_source(work_dir.string(), config.dialect);
    result.run = analyze(*session, config, pack);

    std::vector<DepPair> predicted;
    for (const auto& d : result.run.explicit_deps) predicted.emplace_back(d.from, d.to);
    for (const auto& d : result.run.implicit) predicted.emplace_back(d.from, d.to);
    result.evaluation = evaluate_accuracy(std::span<const DepPair>(predicted), result.ground_truth);

    std::uint64_t largest = 0;
    for (const auto& t : result.run.tables) largest = std::max(largest, t.rows);
    if (largest > 0) {
        result.sse = run_sse_experiment(spec.distribution, largest, config.sampler, sse_launches);
    } else {
        result.sse.distribution = std::string(to_string(spec.distribution));
        result.sse.policy = config.sampler.policy.to_string();
        result.sse.rows_min = config.sampler.rows_min;
        result.sse.bins = config.sampler.histogram_bins;
    }
    return result;
}

}  // namespace flower
