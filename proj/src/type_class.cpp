#include "flower/type_class.hpp"

#include <array>
#include <cctype>
#include <unordered_map>

#include "flower/identifier.hpp"

namespace flower {

std::string_view to_string(Dialect dialect) {
    switch (dialect) {
        case Dialect::Postgres: return "postgres";
        case Dialect::Sqlite: return "sqlite";
        case Dialect::Generic: return "generic";
    }
    return "generic";
}

std::string_view to_string(TypeClass type_class) {
    switch (type_class) {
        case TypeClass::Digits: return "Digits";
        case TypeClass::Money: return "Money";
        case TypeClass::Character: return "Character";
        case TypeClass::Binary: return "Binary";
        case TypeClass::Data: return "Data";
        case TypeClass::Boolean: return "Boolean";
        case TypeClass::Geometric: return "Geometric";
        case TypeClass::Network: return "Network";
        case TypeClass::Unknown: return "Unknown";
    }
    return "Unknown";
}

std::optional<Dialect> parse_dialect(std::string_view text) {
    auto lower = to_lower_ascii(text);
    if (lower == "postgres" || lower == "postgresql") return Dialect::Postgres;
    if (lower == "sqlite") return Dialect::Sqlite;
    if (lower == "generic") return Dialect::Generic;
    return std::nullopt;
}

std::optional<TypeClass> parse_type_class(std::string_view text) {
    static constexpr std::array all = {TypeClass::Digits,  TypeClass::Money,     TypeClass::Character,
                                       TypeClass::Binary,  TypeClass::Data,      TypeClass::Boolean,
                                       TypeClass::Geometric, TypeClass::Network, TypeClass::Unknown};
    for (auto tc : all) {
        if (to_string(tc) == text) return tc;
    }
    return std::nullopt;
}

namespace {

// Lowercases, drops "(...)" modifiers and collapses whitespace runs.
std::string normalize(std::string_view declared) {
    std::string out;
    int depth = 0;
    bool pending_space = false;
    for (char raw : declared) {
        char c = static_cast<char>(std::tolower(static_cast<unsigned char>(raw)));
        if (c == '(') {
            ++depth;
            continue;
        }
        if (c == ')') {
            if (depth > 0) --depth;
            continue;
        }
        if (depth > 0) continue;
        if (std::isspace(static_cast<unsigned char>(c))) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) {
            out += ' ';
            pending_space = false;
        }
        out += c;
    }
    return out;
}

const std::unordered_map<std::string, TypeClass>& postgres_table() {
    static const std::unordered_map<std::string, TypeClass> table = {
        // Digits
        {"integer", TypeClass::Digits},
        {"int", TypeClass::Digits},
        {"int2", TypeClass::Digits},
        {"int4", TypeClass::Digits},
        {"int8", TypeClass::Digits},
        {"smallint", TypeClass::Digits},
        {"bigint", TypeClass::Digits},
        {"decimal", TypeClass::Digits},
        {"numeric", TypeClass::Digits},
        {"real", TypeClass::Digits},
        {"float", TypeClass::Digits},
        {"float4", TypeClass::Digits},
        {"float8", TypeClass::Digits},
        {"double precision", TypeClass::Digits},
        {"serial", TypeClass::Digits},
        {"serial2", TypeClass::Digits},
        {"serial4", TypeClass::Digits},
        {"serial8", TypeClass::Digits},
        {"smallserial", TypeClass::Digits},
        {"bigserial", TypeClass::Digits},
        // Money
        {"money", TypeClass::Money},
        // Character
        {"character varying", TypeClass::Character},
        {"varchar", TypeClass::Character},
        {"character", TypeClass::Character},
        {"char", TypeClass::Character},
        {"bpchar", TypeClass::Character},
        {"text", TypeClass::Character},
        // Binary
        {"bytea", TypeClass::Binary},
        // Data (date/time)
        {"timestamp", TypeClass::Data},
        {"timestamp without time zone", TypeClass::Data},
        {"timestamp with time zone", TypeClass::Data},
        {"timestamptz", TypeClass::Data},
        {"date", TypeClass::Data},
        {"time", TypeClass::Data},
        {"time without time zone", TypeClass::Data},
        {"time with time zone", TypeClass::Data},
        {"timetz", TypeClass::Data},
        {"interval", TypeClass::Data},
        // Boolean
        {"boolean", TypeClass::Boolean},
        {"bool", TypeClass::Boolean},
        {"bit", TypeClass::Boolean},
        {"bit varying", TypeClass::Boolean},
        {"varbit", TypeClass::Boolean},
        // Geometric
        {"line", TypeClass::Geometric},
        {"point", TypeClass::Geometric},
        {"lseg", TypeClass::Geometric},
        {"box", TypeClass::Geometric},
        {"path", TypeClass::Geometric},
        {"polygon", TypeClass::Geometric},
        {"circle", TypeClass::Geometric},
        // Network
        {"cidr", TypeClass::Network},
        {"inet", TypeClass::Network},
        {"macaddr", TypeClass::Network},
        {"macaddr8", TypeClass::Network},
    };
    return table;
}

const std::unordered_map<std::string, TypeClass>& generic_extras() {
    static const std::unordered_map<std::string, TypeClass> table = {
        {"tinyint", TypeClass::Digits},   {"mediumint", TypeClass::Digits}, {"double", TypeClass::Digits},
        {"number", TypeClass::Digits},    {"smallmoney", TypeClass::Money}, {"nvarchar", TypeClass::Character},
        {"nchar", TypeClass::Character},  {"ntext", TypeClass::Character},  {"clob", TypeClass::Character},
        {"varchar2", TypeClass::Character}, {"tinytext", TypeClass::Character}, {"mediumtext", TypeClass::Character},
        {"longtext", TypeClass::Character}, {"blob", TypeClass::Binary},    {"binary", TypeClass::Binary},
        {"varbinary", TypeClass::Binary}, {"longblob", TypeClass::Binary},  {"datetime", TypeClass::Data},
        {"datetime2", TypeClass::Data},   {"smalldatetime", TypeClass::Data}, {"year", TypeClass::Data},
    };
    return table;
}

bool contains(std::string_view haystack, std::string_view needle) {
    return haystack.find(needle) != std::string_view::npos;
}

// SQLite column affinity rules, extended with boolean and date/time names
// that SQLite accepts verbatim but stores under NUMERIC affinity.
TypeClass classify_sqlite(const std::string& type) {
    if (type.empty()) return TypeClass::Unknown;
    if (contains(type, "int")) return TypeClass::Digits;
    if (contains(type, "char") || contains(type, "clob") || contains(type, "text")) return TypeClass::Character;
    if (contains(type, "blob")) return TypeClass::Binary;
    if (contains(type, "real") || contains(type, "floa") || contains(type, "doub")) return TypeClass::Digits;
    if (contains(type, "bool")) return TypeClass::Boolean;
    if (contains(type, "date") || contains(type, "time")) return TypeClass::Data;
    if (contains(type, "numeric") || contains(type, "decimal")) return TypeClass::Digits;
    return TypeClass::Unknown;
}

std::string strip_suffixes(std::string type) {
    for (std::string_view suffix : {" unsigned", " zerofill", " signed"}) {
        if (type.size() > suffix.size() && type.ends_with(suffix)) {
            type.erase(type.size() - suffix.size());
        }
    }
    return type;
}

}  // namespace

TypeClass classify_type(std::string_view declared_type, Dialect dialect) {
    std::string type = normalize(declared_type);
    if (type.empty() || contains(type, "[") || type.starts_with("array") || type.ends_with(" array")) {
        return TypeClass::Unknown;
    }
    if (dialect == Dialect::Sqlite) {
        return classify_sqlite(type);
    }
    const auto& pg = postgres_table();
    if (auto it = pg.find(type); it != pg.end()) {
        return it->second;
    }
    if (dialect == Dialect::Generic) {
        type = strip_suffixes(type);
        if (auto it = pg.find(type); it != pg.end()) return it->second;
        const auto& extras = generic_extras();
        if (auto it = extras.find(type); it != extras.end()) return it->second;
    }
    return TypeClass::Unknown;
}

}  // namespace flower
