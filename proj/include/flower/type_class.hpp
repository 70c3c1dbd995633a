#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace flower {

enum class Dialect { Postgres, Sqlite, Generic };

/// Coarse column type groups used to gate candidate pairs that share no
/// name synonyms. Unknown never matches anything, itself included.
enum class TypeClass { Digits, Money, Character, Binary, Data, Boolean, Geometric, Network, Unknown };

std::string_view to_string(Dialect dialect);
std::string_view to_string(TypeClass type_class);

std::optional<Dialect> parse_dialect(std::string_view text);
std::optional<TypeClass> parse_type_class(std::string_view text);

/// Total, deterministic classification of a declared column type.
/// Length/precision modifiers are ignored; array types are Unknown.
TypeClass classify_type(std::string_view declared_type, Dialect dialect);

}  // namespace flower
