#include <sqlite3.h>

#include <cstring>
#include <fstream>

#include "flower/ddl_parser.hpp"
#include "flower/error.hpp"
#include "sources.hpp"

namespace flower::detail {

namespace {

struct DbCloser {
    void operator()(sqlite3* db) const { sqlite3_close(db); }
};
struct StmtFinalizer {
    void operator()(sqlite3_stmt* st) const { sqlite3_finalize(st); }
};
using DbHandle = std::unique_ptr<sqlite3, DbCloser>;
using StmtHandle = std::unique_ptr<sqlite3_stmt, StmtFinalizer>;

std::string quote_sql_identifier(std::string_view name) {
    std::string out = "\"";
    for (char c : name) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string column_text(sqlite3_stmt* st, int i) {
    const auto* text = sqlite3_column_text(st, i);
    return text ? std::string(reinterpret_cast<const char*>(text), sqlite3_column_bytes(st, i)) : std::string();
}

class SqliteSession final : public Session {
public:
    explicit SqliteSession(std::string path) : path_(std::move(path)) {
        sqlite3* raw = nullptr;
        int rc = sqlite3_open_v2(path_.c_str(), &raw, SQLITE_OPEN_READONLY, nullptr);
        db_.reset(raw);
        if (rc != SQLITE_OK) {
            throw SourceError("source unreachable: " + path_ + ": " + (raw ? sqlite3_errmsg(raw) : "open failed"));
        }
    }

    Dialect dialect() const override { return Dialect::Sqlite; }
    std::string locator() const override { return path_; }

    void scan_rows(const TableMeta& table, const RowSink& sink) override {
        if (table.columns.empty()) return;
        std::string sql = "SELECT ";
        for (std::size_t i = 0; i < table.columns.size(); ++i) {
            if (i) sql += ", ";
            sql += quote_sql_identifier(table.columns[i].name.spelling());
        }
        sql += " FROM " + quote_sql_identifier(table.ref.table.spelling());
        auto st = prepare(sql);
        std::vector<Cell> row(table.columns.size());
        int rc;
        while ((rc = sqlite3_step(st.get())) == SQLITE_ROW) {
            for (std::size_t i = 0; i < row.size(); ++i) {
                int idx = static_cast<int>(i);
                row[i] = sqlite3_column_type(st.get(), idx) == SQLITE_NULL ? Cell{} : Cell{column_text(st.get(), idx)};
            }
            sink(row);
        }
        if (rc != SQLITE_DONE) throw SourceError("reading " + table.ref.render() + ": " + sqlite3_errmsg(db_.get()));
    }

protected:
    Catalog load() override {
        std::vector<TableMeta> tables;
        std::vector<ExplicitDep> deps;
        std::vector<Warning> warnings;
        std::size_t group_base = 0;

        auto st = prepare(
            "SELECT name, sql FROM sqlite_master WHERE type = 'table' AND name NOT LIKE 'sqlite\\_%' ESCAPE '\\' "
            "ORDER BY name");
        std::vector<std::pair<std::string, std::string>> entries;
        while (sqlite3_step(st.get()) == SQLITE_ROW) {
            entries.emplace_back(column_text(st.get(), 0), column_text(st.get(), 1));
        }

        for (const auto& [name, sql] : entries) {
            TableMeta meta;
            try {
                DdlResult parsed = parse_ddl(sql, Dialect::Sqlite, "main");
                meta = std::move(parsed.table);
                std::size_t max_group = 0;
                for (auto& dep : parsed.explicit_deps) {
                    max_group = std::max(max_group, dep.group + 1);
                    dep.group += group_base;
                    deps.push_back(std::move(dep));
                }
                group_base += max_group;
            } catch (const ParseError& e) {
                meta = TableMeta{};
                meta.ref = TableRef{Identifier("main"), Identifier(name, true)};
                meta.ddl_accessible = false;
                meta.ddl_text = sql;
                load_pragma_columns(meta, name);
                warnings.push_back({meta.ref.render(), std::string("DDL is not accessible: ") + e.what()});
            }
            // sqlite_master spelling is authoritative for queries
            meta.ref.table = Identifier(name, meta.ref.table.quoted());
            auto count = prepare("SELECT COUNT(*) FROM " + quote_sql_identifier(name));
            if (sqlite3_step(count.get()) == SQLITE_ROW) {
                meta.rows_all = static_cast<std::uint64_t>(sqlite3_column_int64(count.get(), 0));
            }
            meta.is_empty = meta.rows_all == 0;
            tables.push_back(std::move(meta));
        }
        return assemble_catalog(std::move(tables), std::move(deps), std::move(warnings));
    }

private:
    StmtHandle prepare(const std::string& sql) {
        sqlite3_stmt* raw = nullptr;
        if (sqlite3_prepare_v2(db_.get(), sql.c_str(), -1, &raw, nullptr) != SQLITE_OK) {
            throw SourceError(path_ + ": " + sqlite3_errmsg(db_.get()));
        }
        return StmtHandle(raw);
    }

    void load_pragma_columns(TableMeta& meta, const std::string& name) {
        auto st = prepare("PRAGMA table_info(" + quote_sql_identifier(name) + ")");
        while (sqlite3_step(st.get()) == SQLITE_ROW) {
            ColumnMeta col;
            col.ordinal = meta.columns.size();
            col.name = Identifier(column_text(st.get(), 1), true);
            col.declared_type = column_text(st.get(), 2);
            col.type_class = classify_type(col.declared_type, Dialect::Sqlite);
            col.nullable = sqlite3_column_int(st.get(), 3) == 0;
            col.is_primary_key = sqlite3_column_int(st.get(), 5) > 0;
            if (col.is_primary_key) meta.primary_key.push_back(col.name);
            meta.columns.push_back(std::move(col));
        }
    }

    std::string path_;
    DbHandle db_;
};

}  // namespace

bool looks_like_sqlite(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    char magic[16] = {};
    in.read(magic, sizeof magic);
    return in.gcount() == 16 && std::memcmp(magic, "SQLite format 3", 16) == 0;
}

std::unique_ptr<Session> open_sqlite_source(const std::string& path) { return std::make_unique<SqliteSession>(path); }

}  // namespace flower::detail
