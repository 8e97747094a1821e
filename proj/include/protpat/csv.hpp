#pragma once

// Minimal CSV helpers. The formats used here never quote fields, so a field is
// simply the text between commas.

#include "protpat/error.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

namespace protpat::csv {

inline std::string_view trim(std::string_view s)
{
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

inline std::string to_upper(std::string_view s)
{
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    return out;
}

inline std::string to_lower(std::string_view s)
{
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

/// Split on `sep`; fields are returned untrimmed.
inline std::vector<std::string> split(std::string_view line, char sep = ',')
{
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(sep, start);
        if (pos == std::string_view::npos) {
            fields.emplace_back(line.substr(start));
            return fields;
        }
        fields.emplace_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

/// One non-blank line of a text file with its 1-based line number.
struct Row {
    std::size_t line_number;
    std::string text;
};

/// Reads all non-blank lines, stripping a trailing '\r'.
inline std::vector<Row> read_rows(std::istream& in)
{
    std::vector<Row> rows;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        rows.push_back({n, line});
    }
    return rows;
}

inline std::ifstream open_input(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    return in;
}

inline std::ofstream open_output(const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    return out;
}

/// Checks that `row` is exactly the comma-joined `expected` header (whitespace and case ignored).
inline bool is_header(const Row& row, std::initializer_list<std::string_view> expected)
{
    const auto fields = split(row.text);
    if (fields.size() != expected.size()) return false;
    std::size_t i = 0;
    for (auto name : expected) {
        if (to_lower(trim(fields[i++])) != name) return false;
    }
    return true;
}

}  // namespace protpat::csv
