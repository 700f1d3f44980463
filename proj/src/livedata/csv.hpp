#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "livedata/model.hpp"

namespace livedata::csv {

/// A parsed RFC-4180 record. Unquoted empty fields are null; `""` is the empty
/// string.
using Record = std::vector<Cell>;

/// Accepts LF or CRLF line endings and an optional trailing newline.
std::vector<Record> parse(std::string_view text);

/// Quotes a field only when needed (separator, quote, CR/LF, or empty string).
std::string format_field(const Cell& cell);
/// One record followed by LF.
std::string format_record(const Record& record);

}  // namespace livedata::csv
