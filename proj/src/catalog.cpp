#include "flower/catalog.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <regex>
#include <tuple>

#include "flower/error.hpp"
#include "sources.hpp"

namespace flower {

const ColumnMeta* TableMeta::find_column(const Identifier& name) const {
    for (const auto& c : columns) {
        if (c.name == name) return &c;
    }
    return nullptr;
}

const TableMeta* Catalog::find(const TableRef& ref) const {
    auto it = std::lower_bound(tables.begin(), tables.end(), ref,
                               [](const TableMeta& t, const TableRef& r) { return t.ref < r; });
    if (it != tables.end() && it->ref == ref) return &*it;
    return nullptr;
}

const Catalog& Session::catalog() {
    if (!catalog_) catalog_ = load();
    return *catalog_;
}

std::vector<TableMeta> list_entities(Session& session) { return session.catalog().tables; }

Catalog assemble_catalog(std::vector<TableMeta> tables, std::vector<ExplicitDep> raw_deps,
                         std::vector<Warning> warnings) {
    Catalog catalog;
    std::sort(tables.begin(), tables.end(), [](const TableMeta& a, const TableMeta& b) { return a.ref < b.ref; });
    catalog.tables = std::move(tables);
    catalog.warnings = std::move(warnings);

    for (auto& dep : raw_deps) {
        const TableMeta* source = catalog.find(dep.from.table);
        const TableMeta* target = catalog.find(dep.to.table);
        if (!target) {
            catalog.dangling.push_back({dep, "referenced table " + dep.to.table.render() + " is not in the catalog"});
            continue;
        }
        if (source) dep.from.table = source->ref;
        dep.to.table = target->ref;
        if (dep.to.column.empty()) {
            if (dep.position >= target->primary_key.size()) {
                catalog.dangling.push_back({dep, "referenced table " + target->ref.render() +
                                                     " has no primary key column to match"});
                continue;
            }
            dep.to.column = target->primary_key[dep.position];
        }
        const ColumnMeta* column = target->find_column(dep.to.column);
        if (!column) {
            catalog.dangling.push_back({dep, "referenced column " + dep.to.render() + " does not exist"});
            continue;
        }
        dep.to.column = column->name;
        if (dep.from == dep.to) {
            catalog.dangling.push_back({dep, "constraint references its own column"});
            continue;
        }
        catalog.explicit_deps.push_back(std::move(dep));
    }
    std::stable_sort(catalog.explicit_deps.begin(), catalog.explicit_deps.end(),
                     [](const ExplicitDep& a, const ExplicitDep& b) {
                         return std::tie(a.from, a.to) < std::tie(b.from, b.to);
                     });
    return catalog;
}

namespace {

bool all_match(std::span<const Cell> values, const std::regex& re) {
    bool any = false;
    for (const auto& v : values) {
        if (!v) continue;
        any = true;
        if (!std::regex_match(*v, re)) return false;
    }
    return any;
}

}  // namespace

std::string infer_declared_type(std::span<const Cell> values) {
    static const std::regex integer(R"([+-]?\d+)");
    static const std::regex numeric(R"([+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?)");
    static const std::regex boolean(R"((?:true|false|TRUE|FALSE|t|f))");
    static const std::regex date(R"(\d{4}-\d{2}-\d{2})");
    static const std::regex timestamp(R"(\d{4}-\d{2}-\d{2}[ T]\d{2}:\d{2}(:\d{2}(\.\d+)?)?(Z|[+-]\d{2}(:?\d{2})?)?)");
    if (std::none_of(values.begin(), values.end(), [](const Cell& c) { return c.has_value(); })) return "";
    if (all_match(values, integer)) return "bigint";
    if (all_match(values, numeric)) return "numeric";
    if (all_match(values, boolean)) return "boolean";
    if (all_match(values, date)) return "date";
    if (all_match(values, timestamp)) return "timestamp";
    return "text";
}

std::unique_ptr<Session> open_source(const std::string& locator, std::optional<Dialect> dialect) {
    namespace fs = std::filesystem;
    if (locator.empty()) throw SourceError("malformed locator: empty source");
    if (locator.find("://") != std::string::npos || locator.rfind("host=", 0) == 0 ||
        locator.rfind("postgresql:", 0) == 0) {
        throw SourceError("unsupported source: live connection strings need a DBMS connector, which this build does not include (" +
                          locator + ")");
    }
    std::error_code ec;
    auto status = fs::status(locator, ec);
    if (ec || !fs::exists(status)) throw SourceError("source unreachable: " + locator);
    if (fs::is_directory(status)) {
        return detail::open_directory_source(locator, dialect.value_or(Dialect::Postgres));
    }
    if (fs::is_regular_file(status) && detail::looks_like_sqlite(locator)) {
        if (dialect && *dialect == Dialect::Postgres) {
            throw ConfigError("unsupported dialect: postgres cannot describe an SQLite database file");
        }
        return detail::open_sqlite_source(locator);
    }
    throw SourceError("malformed locator: " + locator + " is neither a fixture directory nor an SQLite database");
}

}  // namespace flower
