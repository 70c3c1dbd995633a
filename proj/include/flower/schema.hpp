#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "flower/identifier.hpp"
#include "flower/type_class.hpp"

namespace flower {

struct ColumnMeta {
    Identifier name;
    std::string declared_type;
    TypeClass type_class = TypeClass::Unknown;
    bool is_primary_key = false;
    std::size_t ordinal = 0;
    bool nullable = true;
};

struct TableMeta {
    TableRef ref;
    std::vector<ColumnMeta> columns;
    std::vector<Identifier> primary_key;
    std::uint64_t rows_all = 0;
    bool is_empty = true;
    bool ddl_accessible = true;
    std::optional<std::string> ddl_text;

    const ColumnMeta* find_column(const Identifier& name) const;
};

/// Declared foreign-key constraint, one entry per column pair.
///
/// Composite keys produce several entries sharing `group`; `position` is
/// the pair's index inside the constraint. A REFERENCES clause without a
/// column list leaves `to.column` empty until the catalog resolves it
/// against the target's primary key.
struct ExplicitDep {
    ColumnRef from;
    ColumnRef to;
    std::size_t group = 0;
    std::size_t position = 0;
    std::string constraint_name;
};

/// A REFERENCES target the catalog could not resolve.
struct DanglingRef {
    ExplicitDep dep;
    std::string reason;
};

}  // namespace flower
