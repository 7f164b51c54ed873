#ifndef INEQ_CSV_HPP
#define INEQ_CSV_HPP

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <fstream>
#include <istream>
#include <stdexcept>
#include <string>
#include <vector>

// Strict CSV ingestion for population and sample files: UTF-8, comma
// separated, one header row, '.' decimal separator, no quoting.  Every
// malformed cell is reported with its 1-based line number; nothing is
// coerced silently.

namespace ineq {

class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& message)
        : std::runtime_error(line > 0
                                 ? "line " + std::to_string(line) + ": " + message
                                 : message),
          line_(line) {}

    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

struct PopulationRow {
    double y = 0.0;
    double weight = 1.0;
    std::size_t line = 0;
};

struct SampleRow {
    long label = 0;
    double y = 0.0;
    double pi = 1.0;
    std::size_t line = 0;
};

namespace csv_detail {

inline std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(field);
            field.clear();
        } else {
            field += c;
        }
    }
    fields.push_back(field);
    return fields;
}

inline std::string trim(const std::string& s) {
    std::size_t begin = 0, end = s.size();
    while (begin < end && (s[begin] == ' ' || s[begin] == '\t')) ++begin;
    while (end > begin && (s[end - 1] == ' ' || s[end - 1] == '\t' ||
                           s[end - 1] == '\r'))
        --end;
    return s.substr(begin, end - begin);
}

inline double parse_double(const std::string& raw, std::size_t line,
                           const std::string& column) {
    const std::string token = trim(raw);
    if (token.empty())
        throw ParseError(line, "empty value in column '" + column + "'");
    double value = 0.0;
    const char* begin = token.data();
    const char* end = token.data() + token.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end)
        throw ParseError(line, "cannot parse '" + token + "' in column '" +
                                   column + "' as a number");
    return value;
}

inline long parse_long(const std::string& raw, std::size_t line,
                       const std::string& column) {
    const std::string token = trim(raw);
    if (token.empty())
        throw ParseError(line, "empty value in column '" + column + "'");
    long value = 0;
    const char* begin = token.data();
    const char* end = token.data() + token.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end)
        throw ParseError(line, "cannot parse '" + token + "' in column '" +
                                   column + "' as an integer");
    return value;
}

struct Header {
    std::vector<std::string> names;

    long find(const std::string& name) const {
        for (std::size_t i = 0; i < names.size(); ++i)
            if (names[i] == name) return static_cast<long>(i);
        return -1;
    }
};

inline Header read_header(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError(1, "missing header row");
    Header h;
    for (const std::string& field : split_fields(line)) h.names.push_back(trim(field));
    return h;
}

}  // namespace csv_detail

/// Population file: required column `y`, optional column `weight` (> 0,
/// defaults to 1).  Extra columns are ignored.
inline std::vector<PopulationRow> read_population_csv(std::istream& in) {
    using namespace csv_detail;
    const Header header = read_header(in);
    const long y_col = header.find("y");
    if (y_col < 0) throw ParseError(1, "required column 'y' not found in header");
    const long w_col = header.find("weight");

    std::vector<PopulationRow> rows;
    std::string line;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split_fields(line);
        if (fields.size() != header.names.size())
            throw ParseError(line_no, "expected " + std::to_string(header.names.size()) +
                                          " fields, found " + std::to_string(fields.size()));
        PopulationRow row;
        row.line = line_no;
        row.y = parse_double(fields[static_cast<std::size_t>(y_col)], line_no, "y");
        if (w_col >= 0) {
            row.weight =
                parse_double(fields[static_cast<std::size_t>(w_col)], line_no, "weight");
            if (!(row.weight > 0.0))
                throw ParseError(line_no, "weight must be positive");
        }
        rows.push_back(row);
    }
    if (rows.empty()) throw ParseError(line_no, "no data rows");
    return rows;
}

/// Sample file: required columns `y` and `pi` (inclusion probability in
/// (0,1]), optional integer column `label`.
inline std::vector<SampleRow> read_sample_csv(std::istream& in) {
    using namespace csv_detail;
    const Header header = read_header(in);
    const long y_col = header.find("y");
    const long pi_col = header.find("pi");
    if (y_col < 0) throw ParseError(1, "required column 'y' not found in header");
    if (pi_col < 0) throw ParseError(1, "required column 'pi' not found in header");
    const long label_col = header.find("label");

    std::vector<SampleRow> rows;
    std::string line;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split_fields(line);
        if (fields.size() != header.names.size())
            throw ParseError(line_no, "expected " + std::to_string(header.names.size()) +
                                          " fields, found " + std::to_string(fields.size()));
        SampleRow row;
        row.line = line_no;
        row.y = parse_double(fields[static_cast<std::size_t>(y_col)], line_no, "y");
        row.pi = parse_double(fields[static_cast<std::size_t>(pi_col)], line_no, "pi");
        if (!(row.pi > 0.0 && row.pi <= 1.0))
            throw ParseError(line_no, "pi must lie in (0,1]");
        row.label = label_col >= 0
                        ? parse_long(fields[static_cast<std::size_t>(label_col)],
                                     line_no, "label")
                        : static_cast<long>(rows.size());
        rows.push_back(row);
    }
    if (rows.empty()) throw ParseError(line_no, "no data rows");

    std::vector<SampleRow> by_label = rows;
    std::sort(by_label.begin(), by_label.end(),
              [](const SampleRow& a, const SampleRow& b) {
                  return a.label != b.label ? a.label < b.label : a.line < b.line;
              });
    for (std::size_t i = 1; i < by_label.size(); ++i)
        if (by_label[i].label == by_label[i - 1].label)
            throw ParseError(by_label[i].line,
                             "duplicate label " + std::to_string(by_label[i].label));
    return rows;
}

inline std::ifstream open_input_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(0, "cannot open file: " + path);
    return in;
}

inline std::vector<PopulationRow> read_population_csv_file(const std::string& path) {
    auto in = open_input_file(path);
    return read_population_csv(in);
}

inline std::vector<SampleRow> read_sample_csv_file(const std::string& path) {
    auto in = open_input_file(path);
    return read_sample_csv(in);
}

}  // namespace ineq

#endif  // INEQ_CSV_HPP
