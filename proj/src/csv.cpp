#include "eot/csv.hpp"

#include <charconv>
#include <cmath>

namespace eot::csv {

std::vector<std::string> split_line(const std::string& line, std::size_t line_no) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    bool was_quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"') {
            if (!cur.empty() || was_quoted) throw ParseError(line_no, "stray quote");
            quoted = true;
            was_quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
            was_quoted = false;
        } else if (c == '\r' && i + 1 == line.size()) {
            // tolerate CRLF
        } else {
            if (was_quoted) throw ParseError(line_no, "text after closing quote");
            cur.push_back(c);
        }
    }
    if (quoted) throw ParseError(line_no, "unterminated quote");
    fields.push_back(std::move(cur));
    return fields;
}

std::string escape(const std::string& field) {
    if (field.find_first_of(",\"") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

void write_row(std::ostream& out, const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out << ',';
        out << escape(fields[i]);
    }
    out << '\n';
}

Table read(std::istream& in, const std::vector<std::string>& expected_header) {
    Table t;
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r" || line[0] == '#') continue;
        auto fields = split_line(line, line_no);
        if (!have_header) {
            if (!expected_header.empty() && fields != expected_header) {
                std::string want;
                for (const auto& h : expected_header) want += (want.empty() ? "" : ",") + h;
                throw ParseError(line_no, "unexpected header, expected '" + want + "'");
            }
            t.header = std::move(fields);
            have_header = true;
            continue;
        }
        if (fields.size() != t.header.size())
            throw ParseError(line_no, "expected " + std::to_string(t.header.size()) + " fields, found " +
                                          std::to_string(fields.size()));
        t.rows.push_back(std::move(fields));
        t.line_numbers.push_back(line_no);
    }
    if (!have_header) throw ParseError(line_no, "missing header row");
    return t;
}

double parse_double(const std::string& text, std::size_t line_no, const std::string& column) {
    double v = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    while (first < last && *first == ' ') ++first;
    if (first < last && *first == '+') ++first;
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc() || res.ptr != last || !std::isfinite(v))
        throw ParseError(line_no, "column '" + column + "': '" + text + "' is not a finite number");
    return v;
}

}  // namespace eot::csv
