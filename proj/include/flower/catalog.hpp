#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "flower/csv.hpp"
#include "flower/schema.hpp"
#include "flower/type_class.hpp"

namespace flower {

/// Non-fatal problem found while loading the catalog.
struct Warning {
    std::string entity;  ///< "schema.table" or the file the problem was found in
    std::string message;
};

struct Catalog {
    std::vector<TableMeta> tables;           ///< sorted by table ref
    std::vector<ExplicitDep> explicit_deps;  ///< resolved, sorted by (from, to)
    std::vector<DanglingRef> dangling;
    std::vector<Warning> warnings;

    const TableMeta* find(const TableRef& ref) const;
};

using RowSink = std::function<void(std::span<const Cell>)>;

/// Read-only view of one data source.
///
/// The catalog is loaded on first access and cached; it is immutable after
/// that. Row data is only read through scan_rows.
class Session {
public:
    virtual ~Session() = default;

    virtual Dialect dialect() const = 0;
    virtual std::string locator() const = 0;

    const Catalog& catalog();

    /// Streams the table's rows, cells ordered like `table.columns`.
    virtual void scan_rows(const TableMeta& table, const RowSink& sink) = 0;

protected:
    virtual Catalog load() = 0;

private:
    std::optional<Catalog> catalog_;
};

/// Opens a directory of *.sql + <schema>.<table>.csv files or an SQLite
/// database file. `dialect` may be empty to pick the source's natural
/// dialect (postgres for directories, sqlite for database files).
///
/// Throws SourceError ("source unreachable", unsupported connection
/// strings) and ConfigError (dialect the source cannot be read with).
std::unique_ptr<Session> open_source(const std::string& locator, std::optional<Dialect> dialect = std::nullopt);

/// One TableMeta per table found; never throws for per-table failures.
std::vector<TableMeta> list_entities(Session& session);

/// Resolves REFERENCES targets against `tables`: fills omitted target
/// columns from the target primary key, fixes spelling to the declared
/// one, and moves unresolvable references into `dangling`. Sorts tables
/// and dependencies.
Catalog assemble_catalog(std::vector<TableMeta> tables, std::vector<ExplicitDep> raw_deps,
                         std::vector<Warning> warnings);

/// Guesses a declared type ("bigint", "numeric", "boolean", "date",
/// "timestamp", "text") from sample text values; "" when all are NULL.
std::string infer_declared_type(std::span<const Cell> values);

}  // namespace flower
