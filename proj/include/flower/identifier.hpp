#pragma once

#include <compare>
#include <string>
#include <string_view>
#include <vector>

namespace flower {

/// SQL identifier that keeps its original spelling.
///
/// Unquoted identifiers match case-insensitively (they fold to lowercase),
/// quoted identifiers match verbatim. Equality and ordering use the folded
/// key, so `Orders` and `orders` are the same entity while `"Orders"` is not.
class Identifier {
public:
    Identifier() = default;
    explicit Identifier(std::string spelling, bool quoted = false);

    const std::string& spelling() const { return spelling_; }
    bool quoted() const { return quoted_; }
    bool empty() const { return spelling_.empty(); }

    /// Matching key: lowercase for unquoted identifiers, verbatim otherwise.
    const std::string& key() const { return key_; }

    /// SQL-style rendering, double-quoted when the identifier was quoted.
    std::string render() const;

    friend bool operator==(const Identifier& a, const Identifier& b) { return a.key_ == b.key_; }
    friend std::strong_ordering operator<=>(const Identifier& a, const Identifier& b) { return a.key_ <=> b.key_; }

private:
    std::string spelling_;
    std::string key_;
    bool quoted_ = false;
};

std::string to_lower_ascii(std::string_view text);

struct TableRef {
    Identifier schema;
    Identifier table;

    /// "schema.table"
    std::string render() const;

    friend bool operator==(const TableRef&, const TableRef&) = default;
    friend auto operator<=>(const TableRef&, const TableRef&) = default;
};

struct ColumnRef {
    TableRef table;
    Identifier column;

    /// "schema.table.column"
    std::string render() const;

    friend bool operator==(const ColumnRef&, const ColumnRef&) = default;
    friend auto operator<=>(const ColumnRef&, const ColumnRef&) = default;
};

/// Splits a dotted name using SQL identifier rules ("a"."b".c, `x`, [y]).
/// Throws ParseError on malformed input.
std::vector<Identifier> parse_qualified_name(std::string_view text);

/// Parses "schema.table"; a bare table name gets `default_schema`.
TableRef parse_table_ref(std::string_view text, std::string_view default_schema = "public");

/// Parses "schema.table.column".
ColumnRef parse_column_ref(std::string_view text);

}  // namespace flower
