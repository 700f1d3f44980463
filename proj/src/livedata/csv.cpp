#include "livedata/csv.hpp"

#include "livedata/error.hpp"

namespace livedata::csv {

std::vector<Record> parse(std::string_view text) {
    std::vector<Record> records;
    Record record;
    std::string field;
    bool quoted = false;      // current field was opened with a quote
    bool in_quotes = false;   // inside the quoted section
    bool field_started = false;
    std::size_t line = 1;

    auto end_field = [&] {
        if (quoted || !field.empty()) {
            record.emplace_back(std::move(field));
        } else {
            record.emplace_back(std::nullopt);
        }
        field.clear();
        quoted = false;
        field_started = false;
    };
    auto end_record = [&] {
        end_field();
        records.push_back(std::move(record));
        record.clear();
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                if (c == '\n') ++line;
                field.push_back(c);
            }
            continue;
        }
        if (c == '"') {
            if (field_started || quoted) {
                throw Error(ErrorCode::Parse, "csv line " + std::to_string(line) +
                                                  ": quote inside unquoted field");
            }
            quoted = true;
            in_quotes = true;
            field_started = true;
        } else if (c == ',') {
            end_field();
        } else if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') {
            // CRLF: handled by the LF branch on the next iteration.
        } else if (c == '\n') {
            end_record();
            ++line;
        } else {
            if (quoted) {
                throw Error(ErrorCode::Parse, "csv line " + std::to_string(line) +
                                                  ": characters after closing quote");
            }
            field.push_back(c);
            field_started = true;
        }
    }
    if (in_quotes) {
        throw Error(ErrorCode::Parse, "csv line " + std::to_string(line) + ": unterminated quoted field");
    }
    if (field_started || quoted || !record.empty()) end_record();
    return records;
}

std::string format_field(const Cell& cell) {
    if (!cell) return {};
    const std::string& v = *cell;
    if (!v.empty() && v.find_first_of(",\"\r\n") == std::string::npos) return v;
    std::string out = "\"";
    for (char c : v) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

std::string format_record(const Record& record) {
    std::string out;
    for (std::size_t i = 0; i < record.size(); ++i) {
        if (i > 0) out.push_back(',');
        out += format_field(record[i]);
    }
    out.push_back('\n');
    return out;
}

}  // namespace livedata::csv
