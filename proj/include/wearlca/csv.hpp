#pragma once

#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace wearlca::csv {

using Row = std::vector<std::string>;

/// RFC 4180 reader: quoted fields may hold commas, doubled quotes and line
/// breaks. Blank lines are skipped. Throws InvalidTable on an unterminated quote.
std::vector<Row> parse(std::string_view text);

/// Quotes a field only when it contains a comma, quote or line break.
std::string escape(std::string_view field);
void write_row(std::ostream& out, const Row& row);

/// Index of `name` in a header row; throws InvalidTable when missing.
std::size_t column(const Row& header, std::string_view name);

/// Shortest representation that parses back to the same double.
std::string format_number(double value);
double parse_number(std::string_view text);

}
