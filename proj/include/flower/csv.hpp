#pragma once

#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace flower {

/// A data cell; nullopt is SQL NULL.
using Cell = std::optional<std::string>;

/// RFC-4180 record reader. An empty unquoted field is NULL, a quoted empty
/// field ("") is the empty string. CRLF and LF line endings are accepted.
class CsvReader {
public:
    explicit CsvReader(std::istream& in) : in_(in) {}

    /// Reads the next record; false at end of input.
    /// Throws ParseError on an unterminated quoted field.
    bool next(std::vector<Cell>& record);

    std::size_t records_read() const { return records_; }

private:
    std::istream& in_;
    std::size_t records_ = 0;
    std::size_t offset_ = 0;
};

/// Writes one record, quoting fields that need it. NULL is written as an
/// empty unquoted field and the empty string as "".
void write_csv_record(std::ostream& out, std::span<const Cell> record);

}  // namespace flower
