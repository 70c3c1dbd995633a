#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "flower/ddl_parser.hpp"
#include "flower/error.hpp"
#include "sources.hpp"

namespace flower::detail {

namespace {

namespace fs = std::filesystem;

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SourceError("source unreachable: cannot read " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

std::vector<fs::path> files_with_extension(const fs::path& dir, std::string_view ext) {
    std::vector<fs::path> out;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ext) out.push_back(entry.path());
    }
    std::sort(out.begin(), out.end());
    return out;
}

// Maps each table column to its CSV header position (or -1 when absent).
// Exact spelling wins, then the identifier key, then a case-insensitive match.
std::vector<int> map_header(const TableMeta& table, const std::vector<Cell>& header) {
    std::vector<int> mapping(table.columns.size(), -1);
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
        const auto& col = table.columns[c].name;
        int by_key = -1;
        int by_case = -1;
        for (std::size_t h = 0; h < header.size(); ++h) {
            if (!header[h]) continue;
            if (*header[h] == col.spelling()) {
                mapping[c] = static_cast<int>(h);
                break;
            }
            if (by_key < 0 && Identifier(*header[h]).key() == col.key()) by_key = static_cast<int>(h);
            if (by_case < 0 && to_lower_ascii(*header[h]) == to_lower_ascii(col.spelling())) by_case = static_cast<int>(h);
        }
        if (mapping[c] < 0) mapping[c] = by_key >= 0 ? by_key : by_case;
    }
    return mapping;
}

class DirectorySession final : public Session {
public:
    DirectorySession(fs::path root, Dialect dialect) : root_(std::move(root)), dialect_(dialect) {}

    Dialect dialect() const override { return dialect_; }
    std::string locator() const override { return root_.string(); }

    void scan_rows(const TableMeta& table, const RowSink& sink) override {
        catalog();
        auto it = data_files_.find(table.ref);
        if (it == data_files_.end()) return;
        std::ifstream in(it->second, std::ios::binary);
        if (!in) throw SourceError("source unreachable: cannot read " + it->second.string());
        CsvReader reader(in);
        std::vector<Cell> record;
        if (!reader.next(record)) return;
        auto mapping = map_header(table, record);
        std::vector<Cell> row(table.columns.size());
        while (reader.next(record)) {
            if (record.size() == 1 && !record[0] && mapping.size() != 1) continue;  // blank line
            for (std::size_t c = 0; c < mapping.size(); ++c) {
                int h = mapping[c];
                row[c] = (h >= 0 && static_cast<std::size_t>(h) < record.size()) ? record[h] : Cell{};
            }
            sink(row);
        }
    }

protected:
    Catalog load() override {
        std::vector<TableMeta> tables;
        std::vector<ExplicitDep> deps;
        std::vector<Warning> warnings;
        std::size_t group_base = 0;

        auto known = [&](const TableRef& ref) {
            return std::any_of(tables.begin(), tables.end(), [&](const TableMeta& t) { return t.ref == ref; });
        };

        for (const auto& file : files_with_extension(root_, ".sql")) {
            std::string script = read_file(file);
            std::vector<Statement> statements;
            try {
                statements = split_statements(script);
            } catch (const ParseError& e) {
                warnings.push_back({file.filename().string(), std::string("cannot split script: ") + e.what()});
                statements.push_back(Statement{script, 0});
            }
            for (const auto& st : statements) {
                if (!is_create_table(st.text)) continue;
                try {
                    DdlResult parsed = parse_ddl(st.text, dialect_, default_schema_for(dialect_));
                    if (known(parsed.table.ref)) {
                        warnings.push_back({parsed.table.ref.render(), "duplicate CREATE TABLE in " +
                                                                           file.filename().string() + " ignored"});
                        continue;
                    }
                    std::size_t max_group = 0;
                    for (auto& dep : parsed.explicit_deps) {
                        max_group = std::max(max_group, dep.group + 1);
                        dep.group += group_base;
                        deps.push_back(std::move(dep));
                    }
                    group_base += max_group;
                    tables.push_back(std::move(parsed.table));
                } catch (const ParseError& e) {
                    auto guessed = guess_table_ref(st.text, dialect_);
                    std::string where = file.filename().string() + ": " + e.what() + " (statement at byte " +
                                        std::to_string(st.offset) + ")";
                    if (guessed && !known(*guessed)) {
                        TableMeta meta;
                        meta.ref = *guessed;
                        meta.ddl_accessible = false;
                        meta.ddl_text = std::string(st.text);
                        tables.push_back(std::move(meta));
                        warnings.push_back({guessed->render(), "DDL is not accessible: " + where});
                    } else {
                        warnings.push_back({file.filename().string(), "DDL is not accessible: " + where});
                    }
                }
            }
        }

        for (const auto& file : files_with_extension(root_, ".csv")) {
            TableRef ref;
            try {
                ref = parse_table_ref(file.stem().string(), default_schema_for(dialect_));
            } catch (const ParseError&) {
                warnings.push_back({file.filename().string(), "data file name is not schema.table.csv"});
                continue;
            }
            auto it = std::find_if(tables.begin(), tables.end(), [&](const TableMeta& t) { return t.ref == ref; });
            if (it == tables.end()) {
                TableMeta meta;
                meta.ref = ref;
                meta.ddl_accessible = false;
                tables.push_back(std::move(meta));
                it = std::prev(tables.end());
                warnings.push_back({ref.render(), "DDL is not accessible: no CREATE TABLE found for data file " +
                                                      file.filename().string()});
            }
            data_files_[it->ref] = file;
            try {
                load_data_stats(*it, file);
            } catch (const ParseError& e) {
                warnings.push_back({it->ref.render(), file.filename().string() + ": " + e.what()});
                data_files_.erase(it->ref);
                it->rows_all = 0;
            }
        }
        for (auto& t : tables) t.is_empty = t.rows_all == 0;
        return assemble_catalog(std::move(tables), std::move(deps), std::move(warnings));
    }

private:
    // Counts rows; for tables without usable DDL also derives columns from
    // the header and guesses their types from the data.
    void load_data_stats(TableMeta& table, const fs::path& file) {
        std::ifstream in(file, std::ios::binary);
        if (!in) throw SourceError("source unreachable: cannot read " + file.string());
        CsvReader reader(in);
        std::vector<Cell> header;
        if (!reader.next(header)) {
            table.rows_all = 0;
            return;
        }
        const bool derive = table.columns.empty();
        std::vector<std::vector<Cell>> values(derive ? header.size() : 0);
        std::vector<Cell> record;
        std::uint64_t rows = 0;
        while (reader.next(record)) {
            if (record.size() == 1 && !record[0] && header.size() != 1) continue;
            ++rows;
            if (derive) {
                for (std::size_t i = 0; i < header.size(); ++i) {
                    values[i].push_back(i < record.size() ? record[i] : Cell{});
                }
            }
        }
        table.rows_all = rows;
        if (!derive) return;
        for (std::size_t i = 0; i < header.size(); ++i) {
            ColumnMeta col;
            std::string name = header[i].value_or("column" + std::to_string(i + 1));
            bool plain = !name.empty() && std::all_of(name.begin(), name.end(), [](char ch) {
                auto u = static_cast<unsigned char>(ch);
                return std::isalnum(u) || ch == '_' || u >= 0x80;
            });
            col.name = Identifier(name, !plain);
            col.ordinal = i;
            col.declared_type = infer_declared_type(values[i]);
            col.type_class = classify_type(col.declared_type, dialect_);
            table.columns.push_back(std::move(col));
        }
    }

    fs::path root_;
    Dialect dialect_;
    std::map<TableRef, fs::path> data_files_;
};

}  // namespace

std::unique_ptr<Session> open_directory_source(const std::string& path, Dialect dialect) {
    return std::make_unique<DirectorySession>(fs::path(path), dialect);
}

}  // namespace flower::detail
