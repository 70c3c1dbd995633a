#include "flower/identifier.hpp"

#include <cctype>

#include "flower/error.hpp"

namespace flower {

std::string to_lower_ascii(std::string_view text) {
    std::string out(text);
    for (char& c : out) {
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return out;
}

Identifier::Identifier(std::string spelling, bool quoted)
    : spelling_(std::move(spelling)), quoted_(quoted) {
    key_ = quoted_ ? spelling_ : to_lower_ascii(spelling_);
}

std::string Identifier::render() const {
    if (!quoted_) {
        return spelling_;
    }
    std::string out = "\"";
    for (char c : spelling_) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    out += '"';
    return out;
}

std::string TableRef::render() const { return schema.render() + "." + table.render(); }

std::string ColumnRef::render() const { return table.render() + "." + column.render(); }

namespace {

bool is_plain_char(char c) {
    auto u = static_cast<unsigned char>(c);
    return std::isalnum(u) || c == '_' || c == '$' || u >= 0x80;
}

}  // namespace

std::vector<Identifier> parse_qualified_name(std::string_view text) {
    std::vector<Identifier> parts;
    std::size_t pos = 0;
    while (true) {
        if (pos >= text.size()) {
            throw ParseError("expected identifier", pos);
        }
        char c = text[pos];
        if (c == '"' || c == '`' || c == '[') {
            char close = c == '[' ? ']' : c;
            std::string name;
            ++pos;
            while (true) {
                if (pos >= text.size()) {
                    throw ParseError("unterminated quoted identifier", pos);
                }
                if (text[pos] == close) {
                    if (close != ']' && pos + 1 < text.size() && text[pos + 1] == close) {
                        name += close;
                        pos += 2;
                        continue;
                    }
                    ++pos;
                    break;
                }
                name += text[pos++];
            }
            parts.emplace_back(std::move(name), true);
        } else {
            std::size_t start = pos;
            while (pos < text.size() && is_plain_char(text[pos])) {
                ++pos;
            }
            if (pos == start) {
                throw ParseError("unexpected character in identifier", pos);
            }
            parts.emplace_back(std::string(text.substr(start, pos - start)), false);
        }
        if (pos == text.size()) {
            break;
        }
        if (text[pos] != '.') {
            throw ParseError("expected '.' between name parts", pos);
        }
        ++pos;
    }
    return parts;
}

TableRef parse_table_ref(std::string_view text, std::string_view default_schema) {
    auto parts = parse_qualified_name(text);
    if (parts.size() == 1) {
        return TableRef{Identifier(std::string(default_schema)), parts[0]};
    }
    if (parts.size() == 2) {
        return TableRef{parts[0], parts[1]};
    }
    throw ParseError("table reference must be schema.table: " + std::string(text), 0);
}

ColumnRef parse_column_ref(std::string_view text) {
    auto parts = parse_qualified_name(text);
    if (parts.size() != 3) {
        throw ParseError("column reference must be schema.table.column: " + std::string(text), 0);
    }
    return ColumnRef{TableRef{parts[0], parts[1]}, parts[2]};
}

}  // namespace flower
