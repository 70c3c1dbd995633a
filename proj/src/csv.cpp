#include "flower/csv.hpp"

#include "flower/error.hpp"

namespace flower {

bool CsvReader::next(std::vector<Cell>& record) {
    record.clear();
    int c = in_.get();
    if (c == std::char_traits<char>::eof()) return false;

    std::string field;
    bool quoted = false;
    bool field_started = false;
    auto finish_field = [&] {
        if (quoted || !field.empty()) {
            record.emplace_back(std::move(field));
        } else {
            record.emplace_back(std::nullopt);
        }
        field.clear();
        quoted = false;
        field_started = false;
    };

    while (true) {
        if (c == std::char_traits<char>::eof()) {
            finish_field();
            break;
        }
        ++offset_;
        char ch = static_cast<char>(c);
        if (ch == '"' && !field_started) {
            quoted = true;
            field_started = true;
            const std::size_t open = offset_ - 1;
            while (true) {
                int q = in_.get();
                if (q == std::char_traits<char>::eof()) throw ParseError("unterminated quoted CSV field", open);
                ++offset_;
                if (q == '"') {
                    if (in_.peek() == '"') {
                        in_.get();
                        ++offset_;
                        field += '"';
                        continue;
                    }
                    break;
                }
                field += static_cast<char>(q);
            }
        } else if (ch == ',') {
            finish_field();
        } else if (ch == '\n') {
            finish_field();
            break;
        } else if (ch == '\r') {
            if (in_.peek() == '\n') {
                in_.get();
                ++offset_;
            }
            finish_field();
            break;
        } else {
            field += ch;
            field_started = true;
        }
        c = in_.get();
    }
    ++records_;
    return true;
}

void write_csv_record(std::ostream& out, std::span<const Cell> record) {
    bool first = true;
    for (const auto& cell : record) {
        if (!first) out << ',';
        first = false;
        if (!cell) continue;
        const std::string& v = *cell;
        bool needs_quotes = v.empty() || v.find_first_of(",\"\r\n") != std::string::npos;
        if (!needs_quotes) {
            out << v;
            continue;
        }
        out << '"';
        for (char ch : v) {
            if (ch == '"') out << '"';
            out << ch;
        }
        out << '"';
    }
    out << '\n';
}

}  // namespace flower
