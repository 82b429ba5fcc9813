#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace sentipred::csv {

/// RFC-4180 style reader: comma separated, fields may be quoted with '"',
/// embedded quotes doubled, quoted fields may contain newlines and commas.
/// Lines starting with '#' outside of a record are skipped when
/// `skip_comments` is set (used by pipeline artifacts for provenance lines).
class Reader {
public:
    explicit Reader(std::istream& in, bool skip_comments = false)
        : in_(in), skip_comments_(skip_comments) {}

    /// Reads the next record. Returns std::nullopt at end of input.
    /// `line_number()` reports the physical line the record started on.
    std::optional<std::vector<std::string>> next();

    std::size_t line_number() const { return record_line_; }

private:
    std::istream& in_;
    bool skip_comments_;
    std::size_t current_line_ = 0;
    std::size_t record_line_ = 0;
};

/// Quotes a field if it contains a comma, quote, or newline.
std::string escape_field(const std::string& field);

void write_record(std::ostream& out, const std::vector<std::string>& fields);

}  // namespace sentipred::csv
