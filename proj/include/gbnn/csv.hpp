#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace gbnn::csv {

struct Table {
    std::vector<std::string> header;             // empty when the file has none
    std::vector<std::vector<std::string>> rows;  // cells with surrounding blanks trimmed
    std::vector<std::size_t> line_numbers;       // 1-based source line of each row
};

/// Reads comma-separated text with RFC 4180 quoting. Blank lines are
/// skipped. Throws ParseError on ragged rows or an unterminated quote.
Table read(std::istream& in, bool has_header, char delimiter = ',');
Table read_file(const std::string& path, bool has_header, char delimiter = ',');

/// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);

/// Parses a whole cell as a double; false if any character is left over.
bool parse_double(std::string_view text, double& value);

/// Quotes a cell when it contains the delimiter, a quote or a line break, or
/// starts or ends with a blank.
std::string escape(std::string_view cell, char delimiter = ',');

void write_row(std::ostream& out, const std::vector<std::string>& cells, char delimiter = ',');

}  // namespace gbnn::csv
