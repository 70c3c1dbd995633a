#include "flower/ddl_parser.hpp"

#include <algorithm>
#include <cctype>
#include <initializer_list>
#include <regex>

#include "flower/error.hpp"

namespace flower {

std::string_view default_schema_for(Dialect dialect) {
    return dialect == Dialect::Sqlite ? "main" : "public";
}

namespace {

enum class Tok { Word, Quoted, String, Number, Punct, End };

struct Token {
    Tok kind = Tok::End;
    std::string text;
    std::size_t offset = 0;
};

bool word_start(char c) {
    auto u = static_cast<unsigned char>(c);
    return std::isalpha(u) || c == '_' || u >= 0x80;
}

bool word_char(char c) {
    auto u = static_cast<unsigned char>(c);
    return std::isalnum(u) || c == '_' || c == '$' || u >= 0x80;
}

bool iequals(std::string_view a, std::string_view b) {
    return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
               return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
           });
}

// Skips whitespace and comments starting at pos; returns the new position.
std::size_t skip_trivia(std::string_view s, std::size_t pos) {
    while (pos < s.size()) {
        char c = s[pos];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++pos;
        } else if (c == '-' && pos + 1 < s.size() && s[pos + 1] == '-') {
            while (pos < s.size() && s[pos] != '\n') ++pos;
        } else if (c == '/' && pos + 1 < s.size() && s[pos + 1] == '*') {
            auto end = s.find("*/", pos + 2);
            if (end == std::string_view::npos) throw ParseError("unterminated block comment", pos);
            pos = end + 2;
        } else {
            break;
        }
    }
    return pos;
}

// Length of a postgres dollar-quote opener ("$$" or "$tag$") at pos, or 0.
std::size_t dollar_tag_length(std::string_view s, std::size_t pos) {
    if (s[pos] != '$') return 0;
    std::size_t i = pos + 1;
    while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_')) ++i;
    if (i < s.size() && s[i] == '$') return i - pos + 1;
    return 0;
}

class Lexer {
public:
    Lexer(std::string_view text, Dialect dialect) : s_(text), dialect_(dialect) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        std::size_t pos = 0;
        while (true) {
            pos = skip_trivia(s_, pos);
            if (pos >= s_.size()) break;
            out.push_back(next(pos));
        }
        out.push_back(Token{Tok::End, "", s_.size()});
        return out;
    }

private:
    Token next(std::size_t& pos) {
        const std::size_t start = pos;
        char c = s_[pos];
        if (word_start(c)) {
            while (pos < s_.size() && word_char(s_[pos])) ++pos;
            return Token{Tok::Word, std::string(s_.substr(start, pos - start)), start};
        }
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            (c == '.' && pos + 1 < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos + 1])))) {
            while (pos < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos])) || s_[pos] == '.')) ++pos;
            return Token{Tok::Number, std::string(s_.substr(start, pos - start)), start};
        }
        if (c == '\'') {
            return Token{Tok::String, quoted_body(pos, '\'', '\''), start};
        }
        if (c == '"' || c == '`') {
            return Token{Tok::Quoted, quoted_body(pos, c, c), start};
        }
        if (c == '[' && dialect_ != Dialect::Postgres && pos + 1 < s_.size() && s_[pos + 1] != ']') {
            return Token{Tok::Quoted, quoted_body(pos, '[', ']'), start};
        }
        if (auto tag = dollar_tag_length(s_, pos)) {
            auto opener = s_.substr(pos, tag);
            auto end = s_.find(opener, pos + tag);
            if (end == std::string_view::npos) throw ParseError("unterminated dollar-quoted string", pos);
            std::string body(s_.substr(pos + tag, end - pos - tag));
            pos = end + tag;
            return Token{Tok::String, std::move(body), start};
        }
        ++pos;
        return Token{Tok::Punct, std::string(1, c), start};
    }

    std::string quoted_body(std::size_t& pos, char open, char close) {
        const std::size_t start = pos;
        std::string body;
        ++pos;
        while (true) {
            if (pos >= s_.size()) {
                throw ParseError(open == '\'' ? "unterminated string literal" : "unterminated quoted identifier", start);
            }
            char c = s_[pos];
            if (c == close) {
                if (open == close && pos + 1 < s_.size() && s_[pos + 1] == close) {
                    body += close;
                    pos += 2;
                    continue;
                }
                ++pos;
                return body;
            }
            body += c;
            ++pos;
        }
    }

    std::string_view s_;
    Dialect dialect_;
};

// Words that end a column's type name and start its constraint list.
bool is_column_constraint_word(std::string_view w) {
    for (std::string_view kw : {"CONSTRAINT", "PRIMARY", "NOT", "NULL", "UNIQUE", "DEFAULT", "REFERENCES", "CHECK",
                                "COLLATE", "GENERATED", "AUTOINCREMENT", "AUTO_INCREMENT", "IDENTITY", "COMMENT", "ON",
                                "AS", "KEY", "ENCODE", "STORAGE", "COMPRESSION"}) {
        if (iequals(w, kw)) return true;
    }
    return false;
}

class Parser {
public:
    Parser(std::vector<Token> tokens, Dialect dialect, std::string_view default_schema)
        : toks_(std::move(tokens)), dialect_(dialect), default_schema_(default_schema) {}

    DdlResult parse_create_table() {
        expect_word("CREATE");
        if (accept_word("OR")) expect_word("REPLACE");
        accept_word("GLOBAL") || accept_word("LOCAL");
        accept_word("TEMP") || accept_word("TEMPORARY") || accept_word("UNLOGGED");
        expect_word("TABLE");
        if (accept_word("IF")) {
            expect_word("NOT");
            expect_word("EXISTS");
        }
        result_.table.ref = parse_table_name();
        if (peek_word("AS")) fail("CREATE TABLE ... AS is not supported");
        expect_punct("(");
        if (!peek_punct(")")) {
            do {
                parse_element();
            } while (accept_punct(","));
        }
        expect_punct(")");
        // Trailing storage options (WITH (...), INHERITS, WITHOUT ROWID, ENGINE=...) carry no keys.
        while (!at_end() && !peek_punct(";")) {
            if (peek_punct("(")) {
                skip_balanced();
            } else {
                ++pos_;
            }
        }
        accept_punct(";");
        if (!at_end()) fail("unexpected text after CREATE TABLE statement");
        finish();
        return std::move(result_);
    }

private:
    // ---- token helpers -------------------------------------------------
    const Token& peek(std::size_t ahead = 0) const {
        return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
    }
    bool at_end() const { return peek().kind == Tok::End; }
    bool peek_word(std::string_view w, std::size_t ahead = 0) const {
        return peek(ahead).kind == Tok::Word && iequals(peek(ahead).text, w);
    }
    bool peek_punct(std::string_view p, std::size_t ahead = 0) const {
        return peek(ahead).kind == Tok::Punct && peek(ahead).text == p;
    }
    bool accept_word(std::string_view w) {
        if (!peek_word(w)) return false;
        ++pos_;
        return true;
    }
    bool accept_punct(std::string_view p) {
        if (!peek_punct(p)) return false;
        ++pos_;
        return true;
    }
    void expect_word(std::string_view w) {
        if (!accept_word(w)) fail("expected " + std::string(w));
    }
    void expect_punct(std::string_view p) {
        if (!accept_punct(p)) fail("expected '" + std::string(p) + "'");
    }
    [[noreturn]] void fail(const std::string& message) const {
        const Token& t = peek();
        std::string found = t.kind == Tok::End ? "end of statement" : "'" + t.text + "'";
        throw ParseError(message + ", found " + found, t.offset);
    }

    bool peek_identifier() const { return peek().kind == Tok::Word || peek().kind == Tok::Quoted; }

    Identifier parse_identifier() {
        const Token& t = peek();
        if (t.kind == Tok::Word) {
            ++pos_;
            return Identifier(t.text, false);
        }
        if (t.kind == Tok::Quoted) {
            ++pos_;
            if (t.text.empty()) fail("empty quoted identifier");
            return Identifier(t.text, true);
        }
        fail("expected identifier");
    }

    TableRef parse_table_name() {
        std::vector<Identifier> parts{parse_identifier()};
        while (accept_punct(".")) parts.push_back(parse_identifier());
        if (parts.size() > 3) fail("too many name qualifiers");
        if (parts.size() == 1) return TableRef{Identifier(std::string(default_schema_)), parts[0]};
        // database.schema.table keeps only schema.table
        return TableRef{parts[parts.size() - 2], parts.back()};
    }

    // Skips a parenthesized group starting at the current '('.
    void skip_balanced() {
        expect_punct("(");
        int depth = 1;
        while (depth > 0) {
            if (at_end()) fail("unbalanced parentheses");
            if (peek_punct("(")) ++depth;
            if (peek_punct(")")) --depth;
            ++pos_;
        }
    }

    // Skips tokens until ',' or ')' at depth zero.
    void skip_to_element_end() {
        while (!at_end() && !peek_punct(",") && !peek_punct(")")) {
            if (peek_punct("(")) {
                skip_balanced();
            } else {
                ++pos_;
            }
        }
    }

    // "(a, b DESC, c(10))" -> identifiers
    std::vector<std::pair<Identifier, std::size_t>> parse_column_list() {
        expect_punct("(");
        std::vector<std::pair<Identifier, std::size_t>> cols;
        do {
            std::size_t offset = peek().offset;
            cols.emplace_back(parse_identifier(), offset);
            while (!at_end() && !peek_punct(",") && !peek_punct(")")) {
                if (peek_punct("(")) {
                    skip_balanced();
                } else {
                    ++pos_;
                }
            }
        } while (accept_punct(","));
        expect_punct(")");
        return cols;
    }

    // ---- elements -------------------------------------------------------
    void parse_element() {
        std::string constraint_name;
        if (accept_word("CONSTRAINT")) {
            constraint_name = parse_identifier().spelling();
            parse_table_constraint(constraint_name);
            return;
        }
        if ((peek_word("PRIMARY") && peek_word("KEY", 1)) || (peek_word("FOREIGN") && peek_word("KEY", 1)) ||
            (peek_word("UNIQUE") && (peek_punct("(", 1) || peek_word("KEY", 1) || peek_word("INDEX", 1))) ||
            (peek_word("CHECK") && peek_punct("(", 1)) || peek_word("EXCLUDE") ||
            (peek_word("LIKE") && peek(1).kind != Tok::Word)) {
            parse_table_constraint(constraint_name);
            return;
        }
        if (dialect_ == Dialect::Generic &&
            (peek_word("INDEX") || peek_word("KEY") || peek_word("FULLTEXT") || peek_word("SPATIAL")) &&
            (peek_punct("(", 1) ||
             (peek(1).kind != Tok::Punct && peek_punct("(", 2) && (peek(3).kind == Tok::Word || peek(3).kind == Tok::Quoted)))) {
            skip_to_element_end();
            return;
        }
        parse_column();
    }

    void parse_table_constraint(const std::string& constraint_name) {
        if (accept_word("PRIMARY")) {
            expect_word("KEY");
            for (auto& [col, offset] : parse_column_list()) add_primary_key(col, offset);
            skip_to_element_end();
        } else if (accept_word("FOREIGN")) {
            expect_word("KEY");
            if (peek_identifier()) parse_identifier();  // MySQL index name
            auto from_cols = parse_column_list();
            expect_word("REFERENCES");
            std::vector<Identifier> from;
            std::vector<std::size_t> offsets;
            for (auto& [col, offset] : from_cols) {
                from.push_back(col);
                offsets.push_back(offset);
            }
            parse_references(from, offsets, constraint_name);
        } else if (accept_word("UNIQUE") || accept_word("CHECK") || accept_word("EXCLUDE") || accept_word("LIKE")) {
            skip_to_element_end();
        } else {
            fail("expected table constraint");
        }
    }

    void parse_column() {
        const std::size_t name_offset = peek().offset;
        ColumnMeta column;
        column.name = parse_identifier();
        column.ordinal = result_.table.columns.size();
        for (const auto& existing : result_.table.columns) {
            if (existing.name == column.name) {
                throw ParseError("duplicate column " + column.name.spelling(), name_offset);
            }
        }
        column.declared_type = parse_type();
        column.type_class = classify_type(column.declared_type, dialect_);
        result_.table.columns.push_back(column);
        const std::size_t index = result_.table.columns.size() - 1;

        std::string constraint_name;
        while (!at_end() && !peek_punct(",") && !peek_punct(")")) {
            if (accept_word("CONSTRAINT")) {
                constraint_name = parse_identifier().spelling();
                continue;
            }
            if (accept_word("PRIMARY")) {
                expect_word("KEY");
                accept_word("ASC") || accept_word("DESC");
                add_primary_key(result_.table.columns[index].name, name_offset);
            } else if (accept_word("NOT")) {
                if (accept_word("NULL")) {
                    result_.table.columns[index].nullable = false;
                } else if (!accept_word("DEFERRABLE")) {
                    fail("expected NULL after NOT");
                }
            } else if (accept_word("NULL") || accept_word("UNIQUE") || accept_word("AUTOINCREMENT") ||
                       accept_word("AUTO_INCREMENT")) {
            } else if (accept_word("DEFAULT")) {
                skip_default_expression();
            } else if (accept_word("CHECK")) {
                skip_balanced();
                accept_word("NO") && accept_word("INHERIT");
            } else if (accept_word("COLLATE")) {
                parse_table_name();
            } else if (accept_word("REFERENCES")) {
                parse_references({result_.table.columns[index].name}, {name_offset}, constraint_name);
                constraint_name.clear();
            } else if (accept_word("GENERATED")) {
                skip_generated();
            } else if (accept_word("IDENTITY")) {
                if (peek_punct("(")) skip_balanced();
            } else if (accept_word("COMMENT")) {
                if (peek().kind != Tok::String) fail("expected comment string");
                ++pos_;
            } else if (accept_word("ON")) {
                // sqlite ON CONFLICT <resolution>, mysql ON UPDATE <expr>
                ++pos_;
                ++pos_;
            } else if (accept_word("KEY")) {
                // mysql shorthand for PRIMARY KEY
                add_primary_key(result_.table.columns[index].name, name_offset);
            } else if (accept_word("ENCODE") || accept_word("STORAGE") || accept_word("COMPRESSION")) {
                ++pos_;
            } else if (accept_word("AS")) {
                // sqlite / mysql generated column: AS (expr) [STORED|VIRTUAL]
                skip_balanced();
                accept_word("STORED") || accept_word("VIRTUAL");
            } else {
                fail("unexpected token in column definition");
            }
        }
    }

    std::string parse_type() {
        std::string type;
        while (peek().kind == Tok::Word && !is_column_constraint_word(peek().text)) {
            if (!type.empty()) type += ' ';
            type += peek().text;
            ++pos_;
            if (peek_punct("(")) {
                type += '(';
                ++pos_;
                int depth = 1;
                while (true) {
                    if (at_end()) fail("unbalanced parentheses in type");
                    if (peek_punct("(")) ++depth;
                    if (peek_punct(")") && --depth == 0) break;
                    if (peek().kind == Tok::String) {
                        type += "'" + peek().text + "'";
                    } else {
                        type += peek().text;
                    }
                    ++pos_;
                }
                ++pos_;
                type += ')';
            }
            while (peek_punct("[")) {
                ++pos_;
                std::string dims = "[";
                if (peek().kind == Tok::Number) dims += toks_[pos_++].text;
                expect_punct("]");
                type += dims + "]";
            }
        }
        return type;
    }

    void skip_default_expression() {
        if (peek_punct("(")) {
            skip_balanced();
        } else if (peek_punct("-") || peek_punct("+")) {
            ++pos_;
            ++pos_;
        } else if (at_end() || peek_punct(",") || peek_punct(")")) {
            fail("expected default expression");
        } else {
            ++pos_;
            if (peek_punct("(")) skip_balanced();
        }
        // postfix casts and operators up to the next constraint keyword
        while (!at_end() && !peek_punct(",") && !peek_punct(")")) {
            if (peek().kind == Tok::Word && is_column_constraint_word(peek().text) && !peek_word("AS")) break;
            if (peek_punct("(")) {
                skip_balanced();
            } else {
                ++pos_;
            }
        }
    }

    void skip_generated() {
        if (accept_word("ALWAYS")) {
        } else if (accept_word("BY")) {
            expect_word("DEFAULT");
        } else {
            fail("expected ALWAYS or BY DEFAULT");
        }
        expect_word("AS");
        if (accept_word("IDENTITY")) {
            if (peek_punct("(")) skip_balanced();
            return;
        }
        skip_balanced();
        accept_word("STORED") || accept_word("VIRTUAL");
    }

    void parse_references(const std::vector<Identifier>& from, const std::vector<std::size_t>& offsets,
                          const std::string& constraint_name) {
        const std::size_t target_offset = peek().offset;
        TableRef target = parse_table_name();
        std::vector<Identifier> to;
        if (peek_punct("(")) {
            for (auto& [col, offset] : parse_column_list()) to.push_back(col);
            if (to.size() != from.size()) {
                throw ParseError("foreign key column count mismatch", target_offset);
            }
        }
        // ON DELETE/UPDATE actions, MATCH, DEFERRABLE
        while (true) {
            if (accept_word("ON")) {
                if (!accept_word("DELETE") && !accept_word("UPDATE")) fail("expected DELETE or UPDATE");
                if (accept_word("SET")) {
                    if (!accept_word("NULL") && !accept_word("DEFAULT")) fail("expected NULL or DEFAULT");
                    if (peek_punct("(")) skip_balanced();
                } else if (accept_word("NO")) {
                    expect_word("ACTION");
                } else if (!accept_word("CASCADE") && !accept_word("RESTRICT")) {
                    fail("expected referential action");
                }
            } else if (accept_word("MATCH")) {
                ++pos_;
            } else if (peek_word("NOT") && peek_word("DEFERRABLE", 1)) {
                pos_ += 2;
            } else if (accept_word("DEFERRABLE")) {
            } else if (accept_word("INITIALLY")) {
                ++pos_;
            } else {
                break;
            }
        }
        const std::size_t group = next_group_++;
        for (std::size_t i = 0; i < from.size(); ++i) {
            pending_refs_.push_back(PendingRef{from[i], offsets[i]});
            ExplicitDep dep;
            dep.from = ColumnRef{TableRef{}, from[i]};
            dep.to = ColumnRef{target, to.empty() ? Identifier() : to[i]};
            dep.group = group;
            dep.position = i;
            dep.constraint_name = constraint_name;
            result_.explicit_deps.push_back(std::move(dep));
        }
    }

    void add_primary_key(const Identifier& col, std::size_t offset) {
        pending_pk_.push_back(PendingRef{col, offset});
    }

    // Column existence checks run after all columns are known, because
    // table constraints may precede the columns they name.
    void finish() {
        auto& table = result_.table;
        for (const auto& [col, offset] : pending_pk_) {
            auto it = std::find_if(table.columns.begin(), table.columns.end(),
                                   [&](const ColumnMeta& c) { return c.name == col; });
            if (it == table.columns.end()) {
                throw ParseError("primary key names unknown column " + col.spelling(), offset);
            }
            if (!it->is_primary_key) {
                it->is_primary_key = true;
                it->nullable = false;
                table.primary_key.push_back(it->name);
            }
        }
        for (const auto& [col, offset] : pending_refs_) {
            if (!table.find_column(col)) {
                throw ParseError("foreign key names unknown column " + col.spelling(), offset);
            }
        }
        for (auto& dep : result_.explicit_deps) {
            dep.from.table = table.ref;
            dep.from.column = table.find_column(dep.from.column)->name;
        }
    }

    struct PendingRef {
        Identifier column;
        std::size_t offset;
    };

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    Dialect dialect_;
    std::string_view default_schema_;
    DdlResult result_;
    std::vector<PendingRef> pending_pk_;
    std::vector<PendingRef> pending_refs_;
    std::size_t next_group_ = 0;
};

}  // namespace

DdlResult parse_ddl(std::string_view ddl_text, Dialect dialect, std::string_view default_schema) {
    Parser parser(Lexer(ddl_text, dialect).run(), dialect, default_schema);
    DdlResult result = parser.parse_create_table();
    result.table.ddl_text = std::string(ddl_text);
    result.table.ddl_accessible = true;
    return result;
}

std::vector<Statement> split_statements(std::string_view script) {
    std::vector<Statement> out;
    std::size_t start = 0;
    std::size_t pos = 0;
    int depth = 0;
    auto flush = [&](std::size_t end) {
        std::size_t first = skip_trivia(script, start);
        if (first < end) {
            out.push_back(Statement{script.substr(first, end - first), first});
        }
    };
    while (pos < script.size()) {
        char c = script[pos];
        if ((c == '-' && pos + 1 < script.size() && script[pos + 1] == '-') ||
            (c == '/' && pos + 1 < script.size() && script[pos + 1] == '*') || std::isspace(static_cast<unsigned char>(c))) {
            pos = skip_trivia(script, pos);
            continue;
        }
        if (c == '\'' || c == '"' || c == '`') {
            std::size_t open = pos++;
            while (true) {
                if (pos >= script.size()) throw ParseError("unterminated quote", open);
                if (script[pos] == c) {
                    if (pos + 1 < script.size() && script[pos + 1] == c) {
                        pos += 2;
                        continue;
                    }
                    ++pos;
                    break;
                }
                ++pos;
            }
            continue;
        }
        if (auto tag = dollar_tag_length(script, pos)) {
            auto end = script.find(script.substr(pos, tag), pos + tag);
            if (end == std::string_view::npos) throw ParseError("unterminated dollar-quoted string", pos);
            pos = end + tag;
            continue;
        }
        if (c == '(') ++depth;
        if (c == ')' && depth > 0) --depth;
        if (c == ';' && depth == 0) {
            flush(pos);
            start = pos + 1;
        }
        ++pos;
    }
    flush(script.size());
    // trailing trivia inside a statement is harmless; trim whitespace for tidy ddl_text
    for (auto& st : out) {
        while (!st.text.empty() && std::isspace(static_cast<unsigned char>(st.text.back()))) {
            st.text.remove_suffix(1);
        }
    }
    return out;
}

namespace {

// Matches the head of a CREATE TABLE statement and captures the name.
// Regex-based so it also works on statements the parser rejects.
const std::regex& create_table_head() {
    static const std::regex re(
        R"(^\s*CREATE\s+(?:OR\s+REPLACE\s+)?(?:(?:GLOBAL|LOCAL)\s+)?(?:(?:TEMP|TEMPORARY|UNLOGGED)\s+)?TABLE\s+)"
        R"((?:IF\s+NOT\s+EXISTS\s+)?((?:"[^"]+"|`[^`]+`|\[[^\]]+\]|[A-Za-z_][A-Za-z0-9_$]*)(?:\s*\.\s*(?:"[^"]+"|`[^`]+`|\[[^\]]+\]|[A-Za-z_][A-Za-z0-9_$]*)){0,2}))",
        std::regex::icase);
    return re;
}

}  // namespace

bool is_create_table(std::string_view statement) {
    std::string head(statement.substr(0, 512));
    return std::regex_search(head, create_table_head());
}

std::optional<TableRef> guess_table_ref(std::string_view statement, Dialect dialect) {
    std::string head(statement.substr(0, 512));
    std::smatch match;
    if (!std::regex_search(head, match, create_table_head())) return std::nullopt;
    std::string name;
    for (char c : match[1].str()) {
        if (!std::isspace(static_cast<unsigned char>(c))) name += c;
    }
    try {
        auto parts = parse_qualified_name(name);
        if (parts.size() == 1) return TableRef{Identifier(std::string(default_schema_for(dialect))), parts[0]};
        return TableRef{parts[parts.size() - 2], parts.back()};
    } catch (const ParseError&) {
        return std::nullopt;
    }
}

}  // namespace flower
