#pragma once

// Minimal RFC 4180-style CSV: comma separated, optional double quotes with ""
// escapes, no embedded newlines.

#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace eot::csv {

class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

std::vector<std::string> split_line(const std::string& line, std::size_t line_no = 0);

std::string escape(const std::string& field);

void write_row(std::ostream& out, const std::vector<std::string>& fields);

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> line_numbers;  ///< source line of each row
};

/// Reads a table with a header row. Blank lines and lines starting with '#'
/// are skipped. Throws ParseError if the header differs from `expected_header`
/// (when non-empty) or a row has the wrong number of fields.
Table read(std::istream& in, const std::vector<std::string>& expected_header = {});

double parse_double(const std::string& text, std::size_t line_no, const std::string& column);

}  // namespace eot::csv
