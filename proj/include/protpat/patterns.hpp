#pragma once

// Patterns, their degree sequences, and the pattern-level statistics.
//
// Pattern file: one pattern per line, edges joined by ';', each edge written
// BUSA-BUSB with the bus names in lexicographic order, e.g. "A-B;B-C".
// Generated patterns may carry "|+BUSA-BUSB" suffixes, one per line whose
// parallel circuit also outaged.

#include "protpat/csv.hpp"
#include "protpat/error.hpp"
#include "protpat/ingest.hpp"
#include "protpat/network.hpp"

#include <algorithm>
#include <compare>
#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace protpat {

/// Multiset of positive bus degrees, stored sorted descending.
class DegreeSequence {
public:
    DegreeSequence() = default;

    /// Sorts `degrees`; throws std::invalid_argument unless all entries are >= 1 with an even sum.
    explicit DegreeSequence(std::vector<int> degrees) : degrees_(std::move(degrees))
    {
        std::sort(degrees_.begin(), degrees_.end(), std::greater<>());
        if (degrees_.empty()) throw std::invalid_argument("degree sequence is empty");
        if (degrees_.back() < 1) throw std::invalid_argument("degree sequence entries must be >= 1");
        if (degree_sum() % 2 != 0) throw std::invalid_argument("degree sequence has an odd sum");
    }

    DegreeSequence(std::initializer_list<int> degrees) : DegreeSequence(std::vector<int>(degrees)) {}

    /// Parses "3,1,1,1" (any order accepted; stored canonically).
    static DegreeSequence parse(std::string_view text)
    {
        std::vector<int> degrees;
        for (const auto& field : csv::split(text)) {
            const auto t = csv::trim(field);
            int v = 0;
            if (t.empty()) throw ParseError("empty degree in '" + std::string(text) + "'");
            for (char c : t) {
                if (c < '0' || c > '9') throw ParseError("bad degree sequence '" + std::string(text) + "'");
                v = v * 10 + (c - '0');
            }
            degrees.push_back(v);
        }
        try {
            return DegreeSequence(std::move(degrees));
        } catch (const std::invalid_argument& e) {
            throw ParseError(e.what());
        }
    }

    std::span<const int> degrees() const noexcept { return degrees_; }
    std::size_t bus_count() const noexcept { return degrees_.size(); }
    int operator[](std::size_t i) const { return degrees_[i]; }

    int degree_sum() const
    {
        int sum = 0;
        for (int d : degrees_) sum += d;
        return sum;
    }

    std::string to_string() const
    {
        std::string out;
        for (std::size_t i = 0; i < degrees_.size(); ++i) {
            if (i) out.push_back(',');
            out += std::to_string(degrees_[i]);
        }
        return out;
    }

    auto operator<=>(const DegreeSequence&) const = default;

private:
    std::vector<int> degrees_;
};

/// Per-bus line counts of the pattern, sorted descending.
inline DegreeSequence degree_sequence(const Pattern& pattern)
{
    std::map<BusId, int> degree;
    for (const auto& e : pattern.lines) {
        ++degree[e.a];
        ++degree[e.b];
    }
    std::vector<int> d;
    d.reserve(degree.size());
    for (const auto& [bus, k] : degree) d.push_back(k);
    return DegreeSequence(std::move(d));
}

/// Number of lines: half the degree sum.
inline int line_count(const DegreeSequence& seq) { return seq.degree_sum() / 2; }

/// Line additions made at a bus of degree 1 while growing the pattern from one
/// line: the number of degrees >= 2, with the triangle and the 4-cycle
/// corrected for the loop-closing line that joins two degree-1 buses.
inline int n_one_plus(const DegreeSequence& seq)
{
    const auto d = seq.degrees();
    const bool all_two = std::all_of(d.begin(), d.end(), [](int k) { return k == 2; });
    if (all_two && d.size() == 3) return 2;
    if (all_two && d.size() == 4) return 3;
    return static_cast<int>(std::count_if(d.begin(), d.end(), [](int k) { return k >= 2; }));
}

/// Empirical probability of attaching at a degree-1 bus over patterns with
/// at least 3 lines. Empty when no such pattern exists.
inline std::optional<double> p_one_plus_observed(std::span<const DegreeSequence> sequences)
{
    long long numerator = 0, denominator = 0;
    for (const auto& seq : sequences) {
        const int n = line_count(seq);
        if (n < 3) continue;
        numerator += n_one_plus(seq) - 1;
        denominator += n - 2;
    }
    if (denominator == 0) return std::nullopt;
    return static_cast<double>(numerator) / static_cast<double>(denominator);
}

inline std::optional<double> p_one_plus_observed(std::span<const Pattern> patterns)
{
    std::vector<DegreeSequence> seqs;
    for (const auto& p : patterns)
        if (p.size() >= 3) seqs.push_back(degree_sequence(p));
    return p_one_plus_observed(std::span<const DegreeSequence>(seqs));
}

/// Connected components of the group's lines, one pattern per component,
/// ordered by their smallest line. Throws std::invalid_argument if a group
/// line is not in the network.
inline std::vector<Pattern> split_into_patterns(const GenerationGroup& group, const Network& net)
{
    std::vector<Edge> edges;
    for (const auto& pair : group.lines) {
        const auto e = net.find_edge(pair);
        if (!e) throw std::invalid_argument("line " + pair.to_string() + " is not in the network");
        edges.push_back(*e);
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

    std::map<BusId, BusId> parent;
    std::function<BusId(BusId)> find = [&](BusId x) {
        auto it = parent.find(x);
        if (it == parent.end()) return parent[x] = x;
        if (it->second == x) return x;
        return it->second = find(it->second);
    };
    for (const auto& e : edges) {
        const auto x = find(e.a), y = find(e.b);
        if (x != y) parent[std::max(x, y)] = std::min(x, y);
    }

    std::map<BusId, Pattern> by_root;
    for (const auto& e : edges) by_root[find(e.a)].lines.push_back(e);
    std::vector<Pattern> out;
    for (auto& [root, p] : by_root) {
        p.source_minute = group.minute;
        out.push_back(std::move(p));
    }
    std::sort(out.begin(), out.end(), [](const Pattern& x, const Pattern& y) { return x.lines.front() < y.lines.front(); });
    return out;
}

/// The group without the lines that fall outside the network.
inline GenerationGroup restrict_to_network(const GenerationGroup& group, const Network& net)
{
    GenerationGroup out{group.minute, {}, {}};
    for (std::size_t i = 0; i < group.lines.size(); ++i) {
        if (!net.find_edge(group.lines[i])) continue;
        out.lines.push_back(group.lines[i]);
        out.circuit_counts.push_back(group.circuit_counts.at(i));
    }
    return out;
}

struct PatternRecord {
    Pattern pattern;
    std::vector<Edge> extra_circuits;  // lines with two or more circuits outaged
};

/// Patterns of every group, in chronological order, ignoring lines outside
/// the network. Lines that lost several circuits are listed as extra circuits.
inline std::vector<PatternRecord> extract_patterns(std::span<const GenerationGroup> groups, const Network& net)
{
    std::vector<PatternRecord> out;
    for (const auto& raw : groups) {
        const auto group = restrict_to_network(raw, net);
        if (group.lines.empty()) continue;
        std::vector<Edge> doubled;
        for (std::size_t i = 0; i < group.lines.size(); ++i)
            if (group.circuit_counts[i] >= 2) doubled.push_back(*net.find_edge(group.lines[i]));
        std::sort(doubled.begin(), doubled.end());
        for (auto& p : split_into_patterns(group, net)) {
            PatternRecord rec{std::move(p), {}};
            for (const auto& e : rec.pattern.lines)
                if (std::binary_search(doubled.begin(), doubled.end(), e)) rec.extra_circuits.push_back(e);
            out.push_back(std::move(rec));
        }
    }
    return out;
}

/// Fraction of generations touching a multi-circuit line in which some
/// multi-circuit line lost two or more circuits. Group lines not in the
/// network are ignored. Empty when no generation touches a multi-circuit line.
inline std::optional<double> estimate_p_circuits(std::span<const GenerationGroup> groups, const Network& net)
{
    std::size_t touching = 0, doubled = 0;
    for (const auto& g : groups) {
        bool touches = false, double_outage = false;
        for (std::size_t i = 0; i < g.lines.size(); ++i) {
            const auto e = net.find_edge(g.lines[i]);
            if (!e || net.multiplicity(*net.find_line(*e)) < 2) continue;
            touches = true;
            if (g.circuit_counts.at(i) >= 2) double_outage = true;
        }
        touching += touches;
        doubled += double_outage;
    }
    if (touching == 0) return std::nullopt;
    return static_cast<double>(doubled) / static_cast<double>(touching);
}

struct SizeHistogram {
    std::map<int, std::size_t> counts;  // line count -> number of patterns
    std::size_t total = 0;

    double frequency(int size) const
    {
        auto it = counts.find(size);
        return it == counts.end() ? 0.0 : static_cast<double>(it->second) / static_cast<double>(total);
    }

    std::vector<int> sizes() const
    {
        std::vector<int> out;
        for (const auto& [k, n] : counts) out.push_back(k);
        return out;
    }
};

inline SizeHistogram size_histogram(std::span<const int> sizes)
{
    if (sizes.empty()) throw DegenerateDataError("no patterns");
    SizeHistogram h;
    for (int k : sizes) {
        if (k < 1) throw std::invalid_argument("pattern size must be >= 1");
        ++h.counts[k];
    }
    h.total = sizes.size();
    return h;
}

inline SizeHistogram size_histogram(std::span<const Pattern> patterns)
{
    std::vector<int> sizes;
    sizes.reserve(patterns.size());
    for (const auto& p : patterns) sizes.push_back(static_cast<int>(p.size()));
    return size_histogram(std::span<const int>(sizes));
}

/// True when the lines form a single connected component.
inline bool is_connected(std::span<const Edge> lines)
{
    if (lines.empty()) return false;
    std::vector<BusId> reached{lines.front().a, lines.front().b};
    std::vector<char> used(lines.size(), 0);
    used[0] = 1;
    bool grew = true;
    while (grew) {
        grew = false;
        for (std::size_t i = 0; i < lines.size(); ++i) {
            if (used[i]) continue;
            const bool has_a = std::find(reached.begin(), reached.end(), lines[i].a) != reached.end();
            const bool has_b = std::find(reached.begin(), reached.end(), lines[i].b) != reached.end();
            if (!has_a && !has_b) continue;
            used[i] = 1;
            grew = true;
            if (!has_a) reached.push_back(lines[i].a);
            if (!has_b) reached.push_back(lines[i].b);
        }
    }
    return std::all_of(used.begin(), used.end(), [](char u) { return u != 0; });
}

// ---- pattern file ---------------------------------------------------------

inline std::string format_edge(const Network& net, Edge e) { return net.edge_names(e).to_string(); }

inline std::string format_pattern(const Network& net, const Pattern& p, std::span<const Edge> extra_circuits = {})
{
    std::string out;
    for (std::size_t i = 0; i < p.lines.size(); ++i) {
        if (i) out.push_back(';');
        out += format_edge(net, p.lines[i]);
    }
    for (const auto& e : extra_circuits) out += "|+" + format_edge(net, e);
    return out;
}

inline void write_patterns(std::ostream& out, const Network& net, std::span<const Pattern> patterns)
{
    for (const auto& p : patterns) out << format_pattern(net, p) << '\n';
}

/// Resolves "A-B" against the network. Bus names may themselves contain '-',
/// so every split point is tried and exactly one must name a network line.
inline Edge parse_edge(const Network& net, std::string_view text)
{
    text = csv::trim(text);
    std::optional<Edge> found;
    for (auto pos = text.find('-'); pos != std::string_view::npos; pos = text.find('-', pos + 1)) {
        const auto a = net.find_bus(csv::trim(text.substr(0, pos)));
        const auto b = net.find_bus(csv::trim(text.substr(pos + 1)));
        if (!a || !b || *a == *b) continue;
        const Edge e = make_edge(*a, *b);
        if (!net.find_line(e)) continue;
        if (found && *found != e) throw ParseError("ambiguous edge '" + std::string(text) + "'");
        found = e;
    }
    if (!found) throw ParseError("edge '" + std::string(text) + "' is not a network line");
    return *found;
}

inline PatternRecord parse_pattern_line(const Network& net, std::string_view line)
{
    PatternRecord rec;
    auto parts = csv::split(line, '|');
    for (const auto& e : csv::split(parts.front(), ';')) rec.pattern.lines.push_back(parse_edge(net, e));
    for (std::size_t i = 1; i < parts.size(); ++i) {
        const auto t = csv::trim(parts[i]);
        if (t.empty() || t.front() != '+') throw ParseError("bad extra-circuit annotation '" + std::string(t) + "'");
        rec.extra_circuits.push_back(parse_edge(net, t.substr(1)));
    }
    std::sort(rec.pattern.lines.begin(), rec.pattern.lines.end());
    if (std::adjacent_find(rec.pattern.lines.begin(), rec.pattern.lines.end()) != rec.pattern.lines.end())
        throw ParseError("pattern repeats a line");
    if (!is_connected(rec.pattern.lines)) throw ParseError("pattern is not connected");
    for (const auto& e : rec.extra_circuits)
        if (!std::binary_search(rec.pattern.lines.begin(), rec.pattern.lines.end(), e))
            throw ParseError("extra circuit on a line outside the pattern");
    return rec;
}

inline std::vector<PatternRecord> read_pattern_records(std::istream& in, const Network& net)
{
    std::vector<PatternRecord> out;
    for (const auto& row : csv::read_rows(in)) {
        try {
            out.push_back(parse_pattern_line(net, row.text));
        } catch (const ParseError& e) {
            throw ParseError(e.what(), row.line_number);
        }
    }
    return out;
}

inline std::vector<Pattern> read_patterns(std::istream& in, const Network& net)
{
    std::vector<Pattern> out;
    for (auto& rec : read_pattern_records(in, net)) out.push_back(std::move(rec.pattern));
    return out;
}

}  // namespace protpat
