#pragma once

// Outage record parsing and one-minute grouping.
//
// Outage CSV (header required, columns in any order):
//   timestamp,from_bus,to_bus,circuit_id,automatic
// timestamp is "YYYY-MM-DD HH:MM"; automatic is auto/1/true (any case) for
// automatic outages; an empty circuit_id means circuit "1".

#include "protpat/csv.hpp"
#include "protpat/error.hpp"

#include <algorithm>
#include <compare>
#include <cstdio>
#include <filesystem>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace protpat {

/// Calendar time at one-minute granularity (no timezone, no DST arithmetic).
struct Minute {
    int year = 1970;
    int month = 1;
    int day = 1;
    int hour = 0;
    int minute = 0;

    auto operator<=>(const Minute&) const = default;

    std::string to_string() const
    {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%04d-%02d-%02d %02d:%02d", year, month, day, hour, minute);
        return buf;
    }

    /// Parses "YYYY-MM-DD HH:MM". Throws ParseError on anything else.
    static Minute parse(std::string_view text)
    {
        text = csv::trim(text);
        auto digits = [&](std::size_t pos, std::size_t len) {
            int v = 0;
            for (std::size_t i = pos; i < pos + len; ++i) {
                const char c = text[i];
                if (c < '0' || c > '9') throw ParseError("unparseable timestamp '" + std::string(text) + "'");
                v = v * 10 + (c - '0');
            }
            return v;
        };
        if (text.size() != 16 || text[4] != '-' || text[7] != '-' || text[10] != ' ' || text[13] != ':')
            throw ParseError("unparseable timestamp '" + std::string(text) + "'");
        Minute m{digits(0, 4), digits(5, 2), digits(8, 2), digits(11, 2), digits(14, 2)};
        if (m.month < 1 || m.month > 12 || m.day < 1 || m.day > days_in_month(m.year, m.month) ||
            m.hour > 23 || m.minute > 59)
            throw ParseError("timestamp out of range '" + std::string(text) + "'");
        return m;
    }

    /// The minute `n` minutes after this one.
    Minute plus_minutes(long long n) const
    {
        Minute m = *this;
        long long total = static_cast<long long>(m.hour) * 60 + m.minute + n;
        long long days = total / 1440;
        total %= 1440;
        m.hour = static_cast<int>(total / 60);
        m.minute = static_cast<int>(total % 60);
        while (days-- > 0) {
            if (++m.day > days_in_month(m.year, m.month)) {
                m.day = 1;
                if (++m.month > 12) {
                    m.month = 1;
                    ++m.year;
                }
            }
        }
        return m;
    }

    static int days_in_month(int year, int month)
    {
        static constexpr int days[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
        const bool leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
        return month == 2 && leap ? 29 : days[month - 1];
    }
};

/// A line identified by its two bus names, stored with first < second.
struct BusPair {
    std::string first;
    std::string second;

    BusPair() = default;
    BusPair(std::string a, std::string b)
    {
        if (a == b) throw ParseError("line joins bus '" + a + "' to itself");
        if (b < a) std::swap(a, b);
        first = std::move(a);
        second = std::move(b);
    }

    auto operator<=>(const BusPair&) const = default;

    std::string to_string() const { return first + "-" + second; }
};

struct OutageRecord {
    Minute timestamp;
    std::string from_bus;
    std::string to_bus;
    std::string circuit_id = "1";
    bool automatic = true;

    BusPair line() const { return BusPair(from_bus, to_bus); }
};

/// Raw bus name -> canonical bus name; both sides already normalized.
using AliasMap = std::map<std::string, std::string>;

struct ParseOptions {
    AliasMap aliases;
};

struct ParseStats {
    std::size_t rows = 0;
    std::size_t non_automatic_dropped = 0;
    std::size_t self_loop_dropped = 0;
};

struct ParseResult {
    std::vector<OutageRecord> records;
    ParseStats stats;
};

/// Trim, collapse internal whitespace runs to one space, upper-case.
inline std::string normalize_bus_name(std::string_view raw)
{
    std::string out;
    bool pending_space = false;
    for (unsigned char c : csv::trim(raw)) {
        if (std::isspace(c)) {
            pending_space = true;
            continue;
        }
        if (pending_space) out.push_back(' ');
        pending_space = false;
        out.push_back(static_cast<char>(std::toupper(c)));
    }
    return out;
}

inline bool is_automatic_flag(std::string_view flag)
{
    const auto f = csv::to_lower(csv::trim(flag));
    return f == "auto" || f == "1" || f == "true";
}

/// Two-column CSV `raw_name,canonical_name`; the header line is optional.
inline AliasMap read_alias_map(std::istream& in)
{
    AliasMap aliases;
    for (const auto& row : csv::read_rows(in)) {
        if (aliases.empty() && csv::is_header(row, {"raw_name", "canonical_name"})) continue;
        const auto fields = csv::split(row.text);
        if (fields.size() != 2) throw ParseError("alias row needs 2 fields", row.line_number);
        auto raw = normalize_bus_name(fields[0]);
        auto canonical = normalize_bus_name(fields[1]);
        if (raw.empty() || canonical.empty()) throw ParseError("empty bus name in alias row", row.line_number);
        aliases[std::move(raw)] = std::move(canonical);
    }
    return aliases;
}

inline AliasMap read_alias_file(const std::filesystem::path& path)
{
    auto in = csv::open_input(path);
    return read_alias_map(in);
}

inline ParseResult parse_outage_csv(std::istream& in, const ParseOptions& options = {})
{
    const auto rows = csv::read_rows(in);
    if (rows.empty()) throw ParseError("missing header");

    std::map<std::string, std::size_t> column;
    {
        const auto header = csv::split(rows.front().text);
        for (std::size_t i = 0; i < header.size(); ++i) column[csv::to_lower(csv::trim(header[i]))] = i;
        for (const char* name : {"timestamp", "from_bus", "to_bus", "circuit_id", "automatic"}) {
            if (!column.count(name))
                throw ParseError(std::string("header is missing column '") + name + "'", rows.front().line_number);
        }
    }
    const std::size_t width = column.size();

    auto canonical = [&](std::string_view raw) {
        auto name = normalize_bus_name(raw);
        if (auto it = options.aliases.find(name); it != options.aliases.end()) return it->second;
        return name;
    };

    ParseResult result;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        const auto fields = csv::split(row.text);
        if (fields.size() != width)
            throw ParseError("expected " + std::to_string(width) + " fields, got " + std::to_string(fields.size()),
                             row.line_number);
        ++result.stats.rows;

        OutageRecord rec;
        try {
            rec.timestamp = Minute::parse(fields[column["timestamp"]]);
        } catch (const ParseError& e) {
            throw ParseError(e.what(), row.line_number);
        }
        rec.automatic = is_automatic_flag(fields[column["automatic"]]);
        if (!rec.automatic) {
            ++result.stats.non_automatic_dropped;
            continue;
        }
        rec.from_bus = canonical(fields[column["from_bus"]]);
        rec.to_bus = canonical(fields[column["to_bus"]]);
        if (rec.from_bus.empty() || rec.to_bus.empty()) throw ParseError("empty bus name", row.line_number);
        if (rec.from_bus == rec.to_bus) {
            ++result.stats.self_loop_dropped;
            continue;
        }
        const auto circuit = csv::trim(fields[column["circuit_id"]]);
        rec.circuit_id = circuit.empty() ? "1" : csv::to_upper(circuit);
        result.records.push_back(std::move(rec));
    }
    return result;
}

inline ParseResult parse_outage_file(const std::filesystem::path& path, const ParseOptions& options = {})
{
    auto in = csv::open_input(path);
    return parse_outage_csv(in, options);
}

/// The distinct lines outaged in one minute. `circuit_counts[i]` is the number
/// of distinct circuits of `lines[i]` recorded in that minute.
struct GenerationGroup {
    Minute minute;
    std::vector<BusPair> lines;
    std::vector<int> circuit_counts;
};

/// One group per distinct minute, in chronological order. Non-automatic records are ignored.
inline std::vector<GenerationGroup> group_into_generations(std::span<const OutageRecord> records)
{
    std::map<Minute, std::map<BusPair, std::set<std::string>>> by_minute;
    for (const auto& rec : records) {
        if (!rec.automatic) continue;
        by_minute[rec.timestamp][rec.line()].insert(rec.circuit_id);
    }

    std::vector<GenerationGroup> groups;
    groups.reserve(by_minute.size());
    for (auto& [minute, lines] : by_minute) {
        GenerationGroup g;
        g.minute = minute;
        for (auto& [line, circuits] : lines) {
            g.lines.push_back(line);
            g.circuit_counts.push_back(static_cast<int>(circuits.size()));
        }
        groups.push_back(std::move(g));
    }
    return groups;
}

// Generations file: `minute,from_bus,to_bus,circuits`, one row per line per group.

inline void write_generations(std::ostream& out, std::span<const GenerationGroup> groups)
{
    out << "minute,from_bus,to_bus,circuits\n";
    for (const auto& g : groups) {
        const auto minute = g.minute.to_string();
        for (std::size_t i = 0; i < g.lines.size(); ++i)
            out << minute << ',' << g.lines[i].first << ',' << g.lines[i].second << ',' << g.circuit_counts[i] << '\n';
    }
}

inline std::vector<GenerationGroup> read_generations(std::istream& in)
{
    const auto rows = csv::read_rows(in);
    if (rows.empty() || !csv::is_header(rows.front(), {"minute", "from_bus", "to_bus", "circuits"}))
        throw ParseError("expected header minute,from_bus,to_bus,circuits", rows.empty() ? 0 : rows.front().line_number);

    std::vector<GenerationGroup> groups;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto fields = csv::split(rows[r].text);
        if (fields.size() != 4) throw ParseError("expected 4 fields", rows[r].line_number);
        Minute minute;
        int circuits = 0;
        try {
            minute = Minute::parse(fields[0]);
            circuits = std::stoi(std::string(csv::trim(fields[3])));
        } catch (const std::exception& e) {
            throw ParseError(e.what(), rows[r].line_number);
        }
        if (circuits < 1) throw ParseError("circuit count must be >= 1", rows[r].line_number);
        if (groups.empty() || groups.back().minute != minute) {
            if (!groups.empty() && minute < groups.back().minute)
                throw ParseError("generations are not in chronological order", rows[r].line_number);
            groups.push_back({minute, {}, {}});
        }
        groups.back().lines.emplace_back(std::string(csv::trim(fields[1])), std::string(csv::trim(fields[2])));
        groups.back().circuit_counts.push_back(circuits);
    }
    return groups;
}

}  // namespace protpat
