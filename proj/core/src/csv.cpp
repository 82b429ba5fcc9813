#include "sentipred/csv.hpp"

#include <istream>
#include <ostream>
#include <stdexcept>

namespace sentipred::csv {

std::optional<std::vector<std::string>> Reader::next() {
    std::string line;
    for (;;) {
        if (!std::getline(in_, line)) return std::nullopt;
        ++current_line_;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (skip_comments_ && line[0] == '#') continue;
        break;
    }
    record_line_ = current_line_;

    std::vector<std::string> fields;
    std::string field;
    bool in_quotes = false;
    std::size_t i = 0;
    for (;;) {
        if (i >= line.size()) {
            if (!in_quotes) break;
            // Quoted field continues onto the next physical line.
            std::string more;
            if (!std::getline(in_, more))
                throw std::runtime_error("csv: unterminated quoted field starting at line " +
                                         std::to_string(record_line_));
            ++current_line_;
            if (!more.empty() && more.back() == '\r') more.pop_back();
            field.push_back('\n');
            line = std::move(more);
            i = 0;
            continue;
        }
        const char c = line[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field.push_back('"');
                    i += 2;
                } else {
                    in_quotes = false;
                    ++i;
                }
            } else {
                field.push_back(c);
                ++i;
            }
        } else if (c == '"' && field.empty()) {
            in_quotes = true;
            ++i;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
            ++i;
        } else {
            field.push_back(c);
            ++i;
        }
    }
    fields.push_back(std::move(field));
    return fields;
}

std::string escape_field(const std::string& field) {
    if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out.push_back('"');
    return out;
}

void write_record(std::ostream& out, const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out.put(',');
        out << escape_field(fields[i]);
    }
    out.put('\n');
}

}  // namespace sentipred::csv
