#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "flower/schema.hpp"
#include "flower/type_class.hpp"

namespace flower {

struct DdlResult {
    TableMeta table;  ///< skeleton: rows_all and emptiness are not known yet
    std::vector<ExplicitDep> explicit_deps;
};

/// Parses one CREATE TABLE statement.
///
/// Column and table level PRIMARY KEY, REFERENCES and FOREIGN KEY clauses
/// are recognized; CHECK, UNIQUE, EXCLUDE, defaults and storage options are
/// skipped. Unqualified table names get `default_schema`.
///
/// Throws ParseError (with a byte offset into `ddl_text`) when the
/// statement is not a well-formed CREATE TABLE.
DdlResult parse_ddl(std::string_view ddl_text, Dialect dialect, std::string_view default_schema = "public");

struct Statement {
    std::string_view text;
    std::size_t offset = 0;  ///< byte offset inside the script
};

/// Splits a script on top-level semicolons, ignoring those inside quotes,
/// comments and parentheses. Blank or comment-only pieces are dropped.
std::vector<Statement> split_statements(std::string_view script);

/// True when the statement starts with CREATE [..] TABLE.
bool is_create_table(std::string_view statement);

/// Best-effort table name for a statement that failed to parse, so the
/// catalog can keep the entity and mark its DDL inaccessible.
std::optional<TableRef> guess_table_ref(std::string_view statement, Dialect dialect);

std::string_view default_schema_for(Dialect dialect);

}  // namespace flower
