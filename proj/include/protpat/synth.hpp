#pragma once

// Synthetic networks and outage histories with known ground truth.

#include "protpat/generator.hpp"
#include "protpat/ingest.hpp"
#include "protpat/network.hpp"
#include "protpat/random.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace protpat {

enum class SynthKind { GridMesh, RandomTree, BaLike };

inline SynthKind parse_synth_kind(std::string_view text)
{
    if (text == "grid-mesh") return SynthKind::GridMesh;
    if (text == "random-tree") return SynthKind::RandomTree;
    if (text == "ba-like") return SynthKind::BaLike;
    throw std::invalid_argument("unknown network kind '" + std::string(text) + "' (grid-mesh, random-tree, ba-like)");
}

namespace detail {

inline std::string synth_bus_name(std::size_t i)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "B%05zu", i);
    return buf;
}

}  // namespace detail

/// Connected network with exactly `lines` single lines. Each line has two
/// circuits with probability `multi_circuit_fraction`, otherwise one.
inline Network make_synthetic_network(SynthKind kind, int lines, double multi_circuit_fraction, std::uint64_t seed)
{
    if (lines < 1) throw std::invalid_argument("synthetic network needs at least 1 line");
    if (!(multi_circuit_fraction >= 0.0 && multi_circuit_fraction <= 1.0))
        throw std::invalid_argument("multi_circuit_fraction must lie in [0, 1]");

    auto topology = derive_stream(seed, 0);
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    edges.reserve(static_cast<std::size_t>(lines));
    const auto target = static_cast<std::size_t>(lines);

    switch (kind) {
    case SynthKind::GridMesh: {
        // Buses filled row by row; each joins its left and upper neighbour.
        const auto width = static_cast<std::size_t>(std::max(2.0, std::ceil(std::sqrt(lines / 2.0))));
        for (std::size_t bus = 1; edges.size() < target; ++bus) {
            const std::size_t r = bus / width, c = bus % width;
            if (c > 0) edges.emplace_back(bus - 1, bus);
            if (r > 0 && edges.size() < target) edges.emplace_back(bus - width, bus);
        }
        break;
    }
    case SynthKind::RandomTree:
        for (std::size_t bus = 1; edges.size() < target; ++bus)
            edges.emplace_back(static_cast<std::size_t>(uniform_below(topology, bus)), bus);
        break;
    case SynthKind::BaLike: {
        // Preferential attachment, two lines per new bus, from a single line.
        std::vector<std::size_t> endpoints{0, 1};
        edges.emplace_back(0, 1);
        for (std::size_t bus = 2; edges.size() < target; ++bus) {
            std::vector<std::size_t> chosen;
            const std::size_t want = std::min<std::size_t>(2, bus);
            while (chosen.size() < want) {
                const auto pick = endpoints[uniform_below(topology, endpoints.size())];
                if (std::find(chosen.begin(), chosen.end(), pick) == chosen.end()) chosen.push_back(pick);
            }
            for (auto other : chosen) {
                if (edges.size() == target) break;
                edges.emplace_back(other, bus);
                endpoints.push_back(other);
                endpoints.push_back(bus);
            }
        }
        break;
    }
    }

    auto circuits = derive_stream(seed, 1);
    std::vector<NetworkLine> out;
    out.reserve(edges.size());
    for (const auto& [a, b] : edges) {
        const int multiplicity = uniform_open01(circuits) < multi_circuit_fraction ? 2 : 1;
        out.push_back({BusPair(detail::synth_bus_name(a), detail::synth_bus_name(b)), multiplicity});
    }
    return Network::from_lines(out);
}

/// Outage records for `count` generated patterns, pattern i in minute start + i.
/// Each pattern line outages one uniformly chosen circuit; a doubled line also
/// outages one of its other circuits.
inline std::vector<OutageRecord> synthesize_history(const Network& net, const GeneratorConfig& config, std::size_t count,
                                                    Minute start = {2000, 1, 1, 0, 0}, unsigned threads = 1)
{
    const auto patterns = generate_ensemble(net, config, count, threads);
    std::vector<OutageRecord> records;
    Minute minute = start;
    const auto circuit_seed = derive_seed(config.seed, 3);
    for (std::size_t i = 0; i < patterns.size(); ++i, minute = minute.plus_minutes(1)) {
        auto gen = derive_stream(circuit_seed, i);
        const auto& g = patterns[i];
        for (const auto& e : g.pattern.lines) {
            const auto id = *net.find_line(e);
            const int m = net.multiplicity(id);
            const int first = 1 + static_cast<int>(uniform_below(gen, static_cast<std::uint64_t>(m)));
            const auto names = net.edge_names(e);
            records.push_back({minute, names.first, names.second, std::to_string(first), true});
            if (std::binary_search(g.extra_circuits.begin(), g.extra_circuits.end(), e)) {
                int second = 1 + static_cast<int>(uniform_below(gen, static_cast<std::uint64_t>(m - 1)));
                if (second >= first) ++second;
                records.push_back({minute, names.first, names.second, std::to_string(second), true});
            }
        }
    }
    return records;
}

inline void write_outage_csv(std::ostream& out, std::span<const OutageRecord> records)
{
    out << "timestamp,from_bus,to_bus,circuit_id,automatic\n";
    for (const auto& r : records)
        out << r.timestamp.to_string() << ',' << r.from_bus << ',' << r.to_bus << ',' << r.circuit_id << ','
            << (r.automatic ? "auto" : "planned") << '\n';
}

}  // namespace protpat
