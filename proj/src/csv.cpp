#include "gbnn/csv.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>

#include "gbnn/errors.hpp"

namespace gbnn::csv {
namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t");
    return std::string(s.substr(first, last - first + 1));
}

// Splits one logical record, pulling further physical lines from `in` when a
// quoted cell spans a line break.
std::vector<std::string> split_record(std::string line, std::istream& in, char delimiter,
                                      std::size_t& line_number) {
    std::vector<std::string> cells;
    std::string cell;
    bool quoted = false;
    bool was_quoted = false;
    const std::size_t start_line = line_number;

    for (std::size_t i = 0;; ++i) {
        if (i == line.size()) {
            if (!quoted) break;
            std::string next;
            if (!std::getline(in, next)) {
                throw ParseError(start_line, cells.size() + 1, "unterminated quoted cell");
            }
            ++line_number;
            if (!next.empty() && next.back() == '\r') next.pop_back();
            cell += '\n';
            line = std::move(next);
            i = static_cast<std::size_t>(-1);
            continue;
        }
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cell += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cell += c;
            }
        } else if (c == '"' && trim(cell).empty()) {
            quoted = true;
            was_quoted = true;
            cell.clear();
        } else if (c == delimiter) {
            cells.push_back(was_quoted ? cell : trim(cell));
            cell.clear();
            was_quoted = false;
        } else {
            cell += c;
        }
    }
    cells.push_back(was_quoted ? cell : trim(cell));
    return cells;
}

}  // namespace

Table read(std::istream& in, bool has_header, char delimiter) {
    Table table;
    std::string line;
    std::size_t line_number = 0;
    std::size_t width = 0;
    bool first = true;

    while (std::getline(in, line)) {
        ++line_number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        const std::size_t record_line = line_number;
        auto cells = split_record(std::move(line), in, delimiter, line_number);

        if (first) {
            width = cells.size();
            first = false;
            if (has_header) {
                table.header = std::move(cells);
                continue;
            }
        }
        if (cells.size() != width) {
            throw ParseError(record_line, std::min(cells.size(), width) + 1,
                             "expected " + std::to_string(width) + " cells, found " +
                                 std::to_string(cells.size()));
        }
        table.rows.push_back(std::move(cells));
        table.line_numbers.push_back(record_line);
    }
    return table;
}

Table read_file(const std::string& path, bool has_header, char delimiter) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    return read(in, has_header, delimiter);
}

std::string format_double(double value) {
    char buf[64];
    const auto result = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, result.ptr);
}

bool parse_double(std::string_view text, double& value) {
    if (text.empty()) return false;
    if (text.front() == '+') text.remove_prefix(1);
    const auto result = std::from_chars(text.data(), text.data() + text.size(), value);
    return result.ec == std::errc() && result.ptr == text.data() + text.size();
}

std::string escape(std::string_view cell, char delimiter) {
    // Edge blanks are quoted too, since unquoted cells are trimmed on read.
    const bool edge_blank = !cell.empty() && (cell.front() == ' ' || cell.front() == '\t' ||
                                              cell.back() == ' ' || cell.back() == '\t');
    if (!edge_blank &&
        cell.find_first_of(std::string{delimiter, '"', '\n', '\r'}) == std::string_view::npos) {
        return std::string(cell);
    }
    std::string out = "\"";
    for (char c : cell) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

void write_row(std::ostream& out, const std::vector<std::string>& cells, char delimiter) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i > 0) out << delimiter;
        out << escape(cells[i], delimiter);
    }
    out << '\n';
}

}  // namespace gbnn::csv
