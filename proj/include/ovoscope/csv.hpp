#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace ovoscope::csv {

// RFC 4180 records: quoted fields may contain commas, quotes ("") and newlines.
// A trailing newline does not produce an empty record. Throws InvalidArgument on
// an unterminated quote.
std::vector<std::vector<std::string>> parse(std::string_view text);

// Quotes the field only when it needs it.
std::string escape(std::string_view field);

// Shortest "%.17g"-style text that reads back to the same double.
std::string format_double(double v);

// Throws InvalidArgument when the text is not a complete finite number.
double parse_double(std::string_view text);

}  // namespace ovoscope::csv
