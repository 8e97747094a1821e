#pragma once

// The single-line transmission network deduced from outage records.
//
// Network CSV:   from_bus,to_bus,multiplicity   (one row per single line)
// Exclusion CSV: from_bus,to_bus                (header optional)

#include "protpat/csv.hpp"
#include "protpat/error.hpp"
#include "protpat/ingest.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace protpat {

using BusId = std::uint32_t;
using LineId = std::uint32_t;

/// A line as a pair of bus indices into a Network, with a < b.
struct Edge {
    BusId a = 0;
    BusId b = 0;

    auto operator<=>(const Edge&) const = default;
};

inline Edge make_edge(BusId x, BusId y)
{
    if (x == y) throw std::invalid_argument("edge endpoints must differ");
    return x < y ? Edge{x, y} : Edge{y, x};
}

/// A connected, non-empty set of outaged single lines.
struct Pattern {
    std::vector<Edge> lines;  // sorted, distinct
    std::optional<Minute> source_minute;

    std::size_t size() const noexcept { return lines.size(); }
    bool operator==(const Pattern&) const = default;
};

struct NetworkLine {
    BusPair buses;
    int multiplicity = 1;
};

class Network {
public:
    Network() = default;

    /// Builds the network from `lines` and keeps only the largest connected
    /// component (most buses, then most lines, then smallest bus name).
    /// Repeated bus pairs keep the larger multiplicity.
    static Network from_lines(std::span<const NetworkLine> lines)
    {
        std::map<BusPair, int> merged;
        for (const auto& l : lines) {
            if (l.multiplicity < 1) throw std::invalid_argument("multiplicity must be >= 1 for " + l.buses.to_string());
            auto& m = merged[l.buses];
            m = std::max(m, l.multiplicity);
        }
        if (merged.empty()) throw DegenerateDataError("network has no lines");

        std::vector<std::string> names;
        for (const auto& [pair, m] : merged) {
            names.push_back(pair.first);
            names.push_back(pair.second);
        }
        std::sort(names.begin(), names.end());
        names.erase(std::unique(names.begin(), names.end()), names.end());
        auto index = [&](const std::string& n) {
            return static_cast<std::uint32_t>(std::lower_bound(names.begin(), names.end(), n) - names.begin());
        };

        // Union-find over all buses to pick the main component.
        std::vector<std::uint32_t> parent(names.size());
        std::iota(parent.begin(), parent.end(), 0u);
        auto find = [&](std::uint32_t x) {
            while (parent[x] != x) x = parent[x] = parent[parent[x]];
            return x;
        };
        for (const auto& [pair, m] : merged) {
            auto x = find(index(pair.first)), y = find(index(pair.second));
            if (x != y) parent[std::max(x, y)] = std::min(x, y);
        }
        std::vector<std::size_t> bus_count(names.size(), 0), line_count(names.size(), 0);
        for (std::uint32_t i = 0; i < names.size(); ++i) ++bus_count[find(i)];
        for (const auto& [pair, m] : merged) ++line_count[find(index(pair.first))];
        std::uint32_t best = find(0);
        for (std::uint32_t i = 0; i < names.size(); ++i) {
            if (find(i) != i) continue;
            // Roots are the smallest index of their component, so ties keep the earliest name.
            if (bus_count[i] > bus_count[best] || (bus_count[i] == bus_count[best] && line_count[i] > line_count[best]))
                best = i;
        }

        Network net;
        std::vector<std::uint32_t> remap(names.size(), UINT32_MAX);
        for (std::uint32_t i = 0; i < names.size(); ++i) {
            if (find(i) != best) continue;
            remap[i] = static_cast<std::uint32_t>(net.names_.size());
            net.names_.push_back(names[i]);
        }
        for (const auto& [pair, m] : merged) {
            const auto a = remap[index(pair.first)];
            if (a == UINT32_MAX) {
                ++net.dropped_lines_;
                continue;
            }
            net.lines_.push_back(make_edge(a, remap[index(pair.second)]));
            net.multiplicity_.push_back(m);
        }
        net.dropped_buses_ = names.size() - net.names_.size();
        net.build_incidence();
        return net;
    }

    std::size_t bus_count() const noexcept { return names_.size(); }
    std::size_t line_count() const noexcept { return lines_.size(); }

    const std::string& bus_name(BusId bus) const { return names_.at(bus); }

    std::optional<BusId> find_bus(std::string_view name) const
    {
        auto it = std::lower_bound(names_.begin(), names_.end(), name);
        if (it == names_.end() || *it != name) return std::nullopt;
        return static_cast<BusId>(it - names_.begin());
    }

    Edge line(LineId id) const { return lines_.at(id); }
    int multiplicity(LineId id) const { return multiplicity_.at(id); }

    BusPair line_names(LineId id) const { return BusPair(names_[lines_[id].a], names_[lines_[id].b]); }
    BusPair edge_names(Edge e) const { return BusPair(names_.at(e.a), names_.at(e.b)); }

    std::optional<LineId> find_line(Edge e) const
    {
        auto it = std::lower_bound(lines_.begin(), lines_.end(), e);
        if (it == lines_.end() || *it != e) return std::nullopt;
        return static_cast<LineId>(it - lines_.begin());
    }

    std::optional<Edge> find_edge(const BusPair& pair) const
    {
        auto a = find_bus(pair.first), b = find_bus(pair.second);
        if (!a || !b) return std::nullopt;
        const Edge e = make_edge(*a, *b);
        if (!find_line(e)) return std::nullopt;
        return e;
    }

    /// Lines incident to `bus`, in increasing id order.
    std::span<const LineId> incident(BusId bus) const
    {
        return {incidence_.data() + offsets_.at(bus), incidence_.data() + offsets_.at(bus + 1)};
    }

    /// Lines and buses discarded because they were outside the main component.
    std::size_t dropped_lines() const noexcept { return dropped_lines_; }
    std::size_t dropped_buses() const noexcept { return dropped_buses_; }

    std::vector<NetworkLine> export_lines() const
    {
        std::vector<NetworkLine> out;
        out.reserve(lines_.size());
        for (LineId i = 0; i < lines_.size(); ++i) out.push_back({line_names(i), multiplicity_[i]});
        return out;
    }

private:
    void build_incidence()
    {
        offsets_.assign(names_.size() + 1, 0);
        for (const auto& e : lines_) {
            ++offsets_[e.a + 1];
            ++offsets_[e.b + 1];
        }
        std::partial_sum(offsets_.begin(), offsets_.end(), offsets_.begin());
        incidence_.assign(offsets_.back(), 0);
        auto fill = offsets_;
        for (LineId i = 0; i < lines_.size(); ++i) {
            incidence_[fill[lines_[i].a]++] = i;
            incidence_[fill[lines_[i].b]++] = i;
        }
    }

    std::vector<std::string> names_;  // sorted; BusId is the index
    std::vector<Edge> lines_;         // sorted; LineId is the index
    std::vector<int> multiplicity_;
    std::vector<std::size_t> offsets_;
    std::vector<LineId> incidence_;
    std::size_t dropped_lines_ = 0;
    std::size_t dropped_buses_ = 0;
};

/// Union of the outaged bus pairs; multiplicity is the number of distinct
/// circuit ids seen per pair. Excluded pairs are removed before the main
/// component is selected.
inline Network build_network_from_outages(std::span<const OutageRecord> records, std::span<const BusPair> exclusions = {})
{
    if (records.empty()) throw DegenerateDataError("no outage records");
    const std::set<BusPair> excluded(exclusions.begin(), exclusions.end());
    std::map<BusPair, std::set<std::string>> circuits;
    for (const auto& rec : records) {
        auto pair = rec.line();
        if (excluded.count(pair)) continue;
        circuits[std::move(pair)].insert(rec.circuit_id);
    }
    if (circuits.empty()) throw DegenerateDataError("every outaged line is excluded");
    std::vector<NetworkLine> lines;
    for (const auto& [pair, ids] : circuits) lines.push_back({pair, static_cast<int>(ids.size())});
    return Network::from_lines(lines);
}

inline void write_network(std::ostream& out, const Network& net)
{
    out << "from_bus,to_bus,multiplicity\n";
    for (const auto& l : net.export_lines()) out << l.buses.first << ',' << l.buses.second << ',' << l.multiplicity << '\n';
}

inline Network read_network(std::istream& in)
{
    const auto rows = csv::read_rows(in);
    if (rows.empty() || !csv::is_header(rows.front(), {"from_bus", "to_bus", "multiplicity"}))
        throw ParseError("expected header from_bus,to_bus,multiplicity", rows.empty() ? 0 : rows.front().line_number);
    std::vector<NetworkLine> lines;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto fields = csv::split(rows[r].text);
        if (fields.size() != 3) throw ParseError("expected 3 fields", rows[r].line_number);
        try {
            NetworkLine l{BusPair(normalize_bus_name(fields[0]), normalize_bus_name(fields[1])),
                          std::stoi(std::string(csv::trim(fields[2])))};
            if (l.multiplicity < 1) throw ParseError("multiplicity must be >= 1");
            lines.push_back(std::move(l));
        } catch (const std::exception& e) {
            throw ParseError(e.what(), rows[r].line_number);
        }
    }
    return Network::from_lines(lines);
}

inline std::vector<BusPair> read_exclusions(std::istream& in, const AliasMap& aliases = {})
{
    auto canonical = [&](std::string_view raw) {
        auto name = normalize_bus_name(raw);
        if (auto it = aliases.find(name); it != aliases.end()) return it->second;
        return name;
    };
    std::vector<BusPair> out;
    const auto rows = csv::read_rows(in);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (r == 0 && csv::is_header(rows[r], {"from_bus", "to_bus"})) continue;
        const auto fields = csv::split(rows[r].text);
        if (fields.size() != 2) throw ParseError("expected 2 fields", rows[r].line_number);
        try {
            out.emplace_back(canonical(fields[0]), canonical(fields[1]));
        } catch (const ParseError& e) {
            throw ParseError(e.what(), rows[r].line_number);
        }
    }
    return out;
}

namespace detail {

/// Incrementally grown pattern: its lines and each pattern bus with its degree in the pattern.
struct GrowthState {
    std::vector<LineId> lines;
    std::vector<std::pair<BusId, int>> buses;

    void clear()
    {
        lines.clear();
        buses.clear();
    }

    bool contains(LineId id) const { return std::find(lines.begin(), lines.end(), id) != lines.end(); }

    int degree_of(BusId bus) const
    {
        for (const auto& [b, d] : buses)
            if (b == bus) return d;
        return 0;
    }

    void add(const Network& net, LineId id)
    {
        lines.push_back(id);
        const Edge e = net.line(id);
        for (BusId bus : {e.a, e.b}) {
            auto it = std::find_if(buses.begin(), buses.end(), [&](const auto& p) { return p.first == bus; });
            if (it == buses.end())
                buses.emplace_back(bus, 1);
            else
                ++it->second;
        }
    }
};

/// Fills the two candidate sets (sorted by line id, each without repeats).
inline void collect_attachable(const Network& net, const GrowthState& state, std::vector<LineId>& at_degree_1,
                               std::vector<LineId>& at_degree_2plus)
{
    at_degree_1.clear();
    at_degree_2plus.clear();
    for (const auto& [bus, degree] : state.buses) {
        auto& side = degree == 1 ? at_degree_1 : at_degree_2plus;
        for (LineId id : net.incident(bus))
            if (!state.contains(id)) side.push_back(id);
    }
    for (auto* side : {&at_degree_1, &at_degree_2plus}) {
        std::sort(side->begin(), side->end());
        side->erase(std::unique(side->begin(), side->end()), side->end());
    }
}

}  // namespace detail

/// Network lines outside `pattern` that share a bus with it, split by whether
/// they meet the pattern at a bus of pattern-degree 1 or of degree >= 2.
/// A line meeting both kinds of bus is in both sets.
struct AttachableLines {
    std::vector<LineId> at_degree_1;
    std::vector<LineId> at_degree_2plus;
};

inline AttachableLines attachable_lines(const Network& net, const Pattern& pattern)
{
    detail::GrowthState state;
    for (const auto& e : pattern.lines) {
        const auto id = net.find_line(e);
        if (!id) throw std::invalid_argument("pattern line is not in the network");
        if (state.contains(*id)) continue;
        state.add(net, *id);
    }
    AttachableLines out;
    detail::collect_attachable(net, state, out.at_degree_1, out.at_degree_2plus);
    return out;
}

}  // namespace protpat
