#pragma once

// Distance between degree sequences (fewest single-line additions/removals,
// staying on sequences of connected simple patterns) and the Wasserstein
// distance between distributions of degree sequences under that metric.
//
// Distribution CSV:   degree_sequence,probability          e.g. "2,1,1",0.25
// Transport plan CSV: from_sequence,to_sequence,mass
// Sequences are quoted because they are themselves comma-joined.

#include "protpat/csv.hpp"
#include "protpat/error.hpp"
#include "protpat/generator.hpp"
#include "protpat/patterns.hpp"
#include "protpat/transport.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <queue>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

namespace protpat {

/// Havel-Hakimi: can a simple graph have these degrees? Zeros are allowed.
inline bool is_graphical(std::vector<int> d)
{
    long long sum = 0;
    for (int k : d) {
        if (k < 0) return false;
        sum += k;
    }
    if (sum % 2 != 0) return false;
    std::sort(d.begin(), d.end(), std::greater<>());
    while (!d.empty() && d.front() > 0) {
        const int k = d.front();
        d.erase(d.begin());
        if (k > static_cast<int>(d.size())) return false;
        for (int i = 0; i < k; ++i)
            if (--d[i] < 0) return false;
        std::sort(d.begin(), d.end(), std::greater<>());
    }
    return true;
}

/// Degrees of some connected simple graph: all >= 1, enough lines to span
/// every bus (sum >= 2(n - 1)), and graphical.
inline bool is_connected_graphical(std::span<const int> degrees)
{
    if (degrees.empty()) return false;
    long long sum = 0;
    for (int k : degrees) {
        if (k < 1) return false;
        sum += k;
    }
    if (sum % 2 != 0) return false;
    if (sum < 2 * (static_cast<long long>(degrees.size()) - 1)) return false;
    return is_graphical(std::vector<int>(degrees.begin(), degrees.end()));
}

inline bool is_connected_graphical(const DegreeSequence& seq) { return is_connected_graphical(seq.degrees()); }

namespace detail {

inline std::vector<int> canonical(std::vector<int> d)
{
    std::sort(d.begin(), d.end(), std::greater<>());
    while (!d.empty() && d.back() == 0) d.pop_back();
    return d;
}

/// Valid sequences one line addition away (two degrees incremented, one of
/// which may be a new bus) or one removal away (the inverse).
inline std::vector<std::vector<int>> neighbor_degrees(const std::vector<int>& d)
{
    std::vector<std::vector<int>> out;
    auto consider = [&](std::vector<int> cand) {
        cand = canonical(std::move(cand));
        if (is_connected_graphical(cand)) out.push_back(std::move(cand));
    };
    const std::size_t n = d.size();
    for (std::size_t i = 0; i < n; ++i) {
        // Equal degrees give the same result, so only the first of each run is used.
        if (i > 0 && d[i] == d[i - 1]) continue;
        for (std::size_t j = i + 1; j < n; ++j) {
            if (j > i + 1 && d[j] == d[j - 1]) continue;
            auto up = d;
            ++up[i];
            ++up[j];
            consider(std::move(up));
            if (d[i] == 1 && d[j] == 1) continue;  // would drop two buses at once
            auto down = d;
            --down[i];
            --down[j];
            consider(std::move(down));
        }
        auto grow = d;
        ++grow[i];
        grow.push_back(1);
        consider(std::move(grow));
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

inline int lines_of(const std::vector<int>& d)
{
    int sum = 0;
    for (int k : d) sum += k;
    return sum / 2;
}

}  // namespace detail

/// All valid sequences one line addition or removal away from `seq`.
inline std::vector<DegreeSequence> neighbors(const DegreeSequence& seq)
{
    std::vector<DegreeSequence> out;
    for (auto& d : detail::neighbor_degrees(std::vector<int>(seq.degrees().begin(), seq.degrees().end())))
        out.emplace_back(std::move(d));
    std::sort(out.begin(), out.end());
    return out;
}

/// Smallest line-count bound used for a pair unless the caller gives one.
inline int default_cap(const DegreeSequence& a, const DegreeSequence& b)
{
    return std::max(line_count(a), line_count(b)) + 2;
}

/// Lazily expanded graph of valid degree sequences. Nodes and adjacency are
/// cached, so one instance should serve many distance queries. Not thread-safe.
class SequenceGraph {
public:
    using NodeId = std::uint32_t;

    NodeId intern(const std::vector<int>& degrees)
    {
        auto [it, inserted] = ids_.try_emplace(degrees, static_cast<NodeId>(nodes_.size()));
        if (inserted) {
            if (!is_connected_graphical(degrees)) {
                ids_.erase(it);
                throw std::invalid_argument("not the degree sequence of a connected simple pattern");
            }
            nodes_.push_back(degrees);
            adjacency_.emplace_back();
            expanded_.push_back(0);
        }
        return it->second;
    }

    NodeId intern(const DegreeSequence& seq) { return intern(std::vector<int>(seq.degrees().begin(), seq.degrees().end())); }

    const std::vector<int>& degrees(NodeId id) const { return nodes_.at(id); }

    const std::vector<NodeId>& neighbors(NodeId id)
    {
        if (!expanded_.at(id)) {
            std::vector<NodeId> adj;
            for (auto& d : detail::neighbor_degrees(nodes_[id])) adj.push_back(intern(d));
            adjacency_[id] = std::move(adj);
            expanded_[id] = 1;
        }
        return adjacency_[id];
    }

    std::size_t node_count() const noexcept { return nodes_.size(); }

    /// Shortest add/remove path length through sequences of at most `cap`
    /// lines; empty if none exists within the cap.
    std::optional<int> distance(const DegreeSequence& a, const DegreeSequence& b, int cap)
    {
        const NodeId from = intern(a), to = intern(b);
        if (from == to) return 0;
        const auto key = std::make_tuple(std::min(from, to), std::max(from, to), cap);
        if (auto it = memo_.find(key); it != memo_.end()) return it->second;
        const auto d = search(from, to, cap);
        memo_[key] = d;
        return d;
    }

private:
    // A* with h = ceil(L1 / 2) between zero-padded sorted sequences. One line
    // changes two sorted entries by one each, so h is consistent and the
    // result equals the breadth-first distance.
    std::optional<int> search(NodeId from, NodeId to, int cap)
    {
        const std::vector<int> target = nodes_[to];  // nodes_ grows during the search
        auto heuristic = [&](NodeId id) {
            const auto& d = nodes_[id];
            int l1 = 0;
            for (std::size_t i = 0; i < std::max(d.size(), target.size()); ++i)
                l1 += std::abs((i < d.size() ? d[i] : 0) - (i < target.size() ? target[i] : 0));
            return (l1 + 1) / 2;
        };
        if (detail::lines_of(nodes_[from]) > cap || detail::lines_of(target) > cap) return std::nullopt;

        std::map<NodeId, int> g;
        using Entry = std::tuple<int, int, NodeId>;  // (f, -g, node): ties prefer deeper nodes
        std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
        g[from] = 0;
        open.emplace(heuristic(from), 0, from);
        while (!open.empty()) {
            auto [f, neg_g, u] = open.top();
            open.pop();
            const int gu = -neg_g;
            if (gu != g[u]) continue;
            if (u == to) return gu;
            for (NodeId v : neighbors(u)) {
                if (detail::lines_of(nodes_[v]) > cap) continue;
                auto it = g.find(v);
                if (it != g.end() && it->second <= gu + 1) continue;
                g[v] = gu + 1;
                open.emplace(gu + 1 + heuristic(v), -(gu + 1), v);
            }
        }
        return std::nullopt;
    }

    std::map<std::vector<int>, NodeId> ids_;
    std::vector<std::vector<int>> nodes_;
    std::vector<std::vector<NodeId>> adjacency_;
    std::vector<char> expanded_;
    std::map<std::tuple<NodeId, NodeId, int>, std::optional<int>> memo_;
};

/// Distance with an explicit cap; empty means no path within the cap.
inline std::optional<int> sequence_distance(SequenceGraph& graph, const DegreeSequence& a, const DegreeSequence& b, int cap)
{
    if (cap < 1) throw std::invalid_argument("cap must be >= 1");
    return graph.distance(a, b, cap);
}

inline std::optional<int> sequence_distance(const DegreeSequence& a, const DegreeSequence& b, int cap)
{
    SequenceGraph graph;
    return sequence_distance(graph, a, b, cap);
}

/// Distance under the default cap; throws if the cap is exceeded.
inline int sequence_distance(SequenceGraph& graph, const DegreeSequence& a, const DegreeSequence& b)
{
    const auto d = graph.distance(a, b, default_cap(a, b));
    if (!d) throw std::runtime_error("sequence distance cap exceeded between " + a.to_string() + " and " + b.to_string());
    return *d;
}

/// Symmetric matrix (row-major) of pairwise distances over `support`.
inline std::vector<int> distance_matrix(SequenceGraph& graph, std::span<const DegreeSequence> support)
{
    const std::size_t k = support.size();
    std::vector<int> out(k * k, 0);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i + 1; j < k; ++j) out[i * k + j] = out[j * k + i] = sequence_distance(graph, support[i], support[j]);
    return out;
}

// ---- distributions --------------------------------------------------------

struct PatternDistribution {
    std::vector<DegreeSequence> support;  // distinct, ascending
    std::vector<double> probabilities;

    void validate() const
    {
        if (support.size() != probabilities.size()) throw std::invalid_argument("support/probability size mismatch");
        if (support.empty()) throw std::invalid_argument("empty distribution");
        double total = 0.0;
        for (double p : probabilities) {
            if (!(p >= 0.0)) throw std::invalid_argument("negative probability");
            total += p;
        }
        if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("probabilities do not sum to 1");
        for (std::size_t i = 1; i < support.size(); ++i)
            if (!(support[i - 1] < support[i])) throw std::invalid_argument("support must be distinct and sorted");
    }

    double probability(const DegreeSequence& seq) const
    {
        auto it = std::lower_bound(support.begin(), support.end(), seq);
        return it != support.end() && *it == seq ? probabilities[it - support.begin()] : 0.0;
    }
};

inline PatternDistribution empirical_distribution(std::span<const DegreeSequence> sequences)
{
    if (sequences.empty()) throw DegenerateDataError("no patterns for an empirical distribution");
    std::map<DegreeSequence, std::size_t> counts;
    for (const auto& s : sequences) ++counts[s];
    PatternDistribution out;
    for (const auto& [seq, n] : counts) {
        out.support.push_back(seq);
        out.probabilities.push_back(static_cast<double>(n) / static_cast<double>(sequences.size()));
    }
    return out;
}

inline PatternDistribution empirical_distribution(std::span<const Pattern> patterns)
{
    std::vector<DegreeSequence> seqs;
    seqs.reserve(patterns.size());
    for (const auto& p : patterns) seqs.push_back(degree_sequence(p));
    return empirical_distribution(std::span<const DegreeSequence>(seqs));
}

/// Generated patterns contribute their single-line view; extra circuits are ignored.
inline PatternDistribution empirical_distribution(std::span<const GeneratedPattern> patterns)
{
    std::vector<DegreeSequence> seqs;
    seqs.reserve(patterns.size());
    for (const auto& g : patterns) seqs.push_back(degree_sequence(g.pattern));
    return empirical_distribution(std::span<const DegreeSequence>(seqs));
}

struct TransportPlan {
    std::vector<DegreeSequence> sources;
    std::vector<DegreeSequence> targets;
    std::vector<double> mass;  // sources.size() x targets.size(), row-major
    double objective = 0.0;

    double at(std::size_t i, std::size_t j) const { return mass.at(i * targets.size() + j); }

    double row_sum(std::size_t i) const
    {
        double s = 0.0;
        for (std::size_t j = 0; j < targets.size(); ++j) s += at(i, j);
        return s;
    }

    double column_sum(std::size_t j) const
    {
        double s = 0.0;
        for (std::size_t i = 0; i < sources.size(); ++i) s += at(i, j);
        return s;
    }
};

struct WassersteinResult {
    double distance = 0.0;
    TransportPlan plan;
};

/// Optimal transport between p and q with the sequence distance as ground cost.
inline WassersteinResult wasserstein(SequenceGraph& graph, const PatternDistribution& p, const PatternDistribution& q)
{
    p.validate();
    q.validate();
    std::vector<int> cost(p.support.size() * q.support.size());
    for (std::size_t i = 0; i < p.support.size(); ++i)
        for (std::size_t j = 0; j < q.support.size(); ++j)
            cost[i * q.support.size() + j] = sequence_distance(graph, p.support[i], q.support[j]);

    const auto solution = solve_transport<double>(p.probabilities, q.probabilities,
                                                  [&](std::size_t i, std::size_t j) { return cost[i * q.support.size() + j]; });
    WassersteinResult out;
    out.plan.sources = p.support;
    out.plan.targets = q.support;
    out.plan.mass.assign(p.support.size() * q.support.size(), 0.0);
    for (const auto& f : solution.flows) out.plan.mass[f.from * q.support.size() + f.to] = f.mass;
    out.plan.objective = solution.objective;
    out.distance = solution.objective;
    return out;
}

inline WassersteinResult wasserstein(const PatternDistribution& p, const PatternDistribution& q)
{
    SequenceGraph graph;
    return wasserstein(graph, p, q);
}

namespace detail {

/// Transport cost between two count vectors over a shared support, in units
/// of 1 / (n_a * n_b), computed exactly in integers. Mass common to both
/// sides stays in place: with a metric ground cost some optimal plan does so.
inline long long scaled_transport_cost(std::span<const long long> counts_a, long long n_a,
                                       std::span<const long long> counts_b, long long n_b, std::span<const int> distances)
{
    const std::size_t k = counts_a.size();
    std::vector<std::size_t> src, dst;
    std::vector<long long> supply, demand;
    for (std::size_t i = 0; i < k; ++i) {
        const long long pa = counts_a[i] * n_b, qb = counts_b[i] * n_a;
        if (pa > qb) {
            src.push_back(i);
            supply.push_back(pa - qb);
        } else if (qb > pa) {
            dst.push_back(i);
            demand.push_back(qb - pa);
        }
    }
    if (src.empty()) return 0;
    const auto solution = solve_transport<long long>(
        supply, demand, [&](std::size_t i, std::size_t j) { return distances[src[i] * k + dst[j]]; });
    long long total = 0;
    for (const auto& f : solution.flows) total += f.mass * distances[src[f.from] * k + dst[f.to]];
    return total;
}

}  // namespace detail

// ---- file formats ---------------------------------------------------------

namespace detail {

inline std::string quoted(const std::string& s) { return "\"" + s + "\""; }

/// Splits a row of quoted sequences and a trailing number.
inline std::vector<std::string> split_quoted(std::string_view line)
{
    std::vector<std::string> out;
    std::string field;
    bool in_quotes = false;
    for (char c : line) {
        if (c == '"') {
            in_quotes = !in_quotes;
        } else if (c == ',' && !in_quotes) {
            out.push_back(field);
            field.clear();
        } else {
            field.push_back(c);
        }
    }
    if (in_quotes) throw ParseError("unterminated quote");
    out.push_back(field);
    return out;
}

inline std::string format_real(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

}  // namespace detail

inline void write_distribution(std::ostream& out, const PatternDistribution& dist)
{
    out << "degree_sequence,probability\n";
    for (std::size_t i = 0; i < dist.support.size(); ++i)
        out << detail::quoted(dist.support[i].to_string()) << ',' << detail::format_real(dist.probabilities[i]) << '\n';
}

/// Reads a distribution; the sequence may be quoted, or unquoted with the
/// probability taken after the last comma.
inline PatternDistribution read_distribution(std::istream& in)
{
    const auto rows = csv::read_rows(in);
    if (rows.empty() || !csv::is_header(rows.front(), {"degree_sequence", "probability"}))
        throw ParseError("expected header degree_sequence,probability", rows.empty() ? 0 : rows.front().line_number);
    std::map<DegreeSequence, double> merged;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        try {
            std::string text = rows[r].text;
            std::string seq_text, prob_text;
            if (text.find('"') != std::string::npos) {
                const auto fields = detail::split_quoted(text);
                if (fields.size() != 2) throw ParseError("expected 2 fields");
                seq_text = fields[0];
                prob_text = fields[1];
            } else {
                const auto pos = text.rfind(',');
                if (pos == std::string::npos) throw ParseError("expected 2 fields");
                seq_text = text.substr(0, pos);
                prob_text = text.substr(pos + 1);
            }
            merged[DegreeSequence::parse(seq_text)] += std::stod(prob_text);
        } catch (const std::exception& e) {
            throw ParseError(e.what(), rows[r].line_number);
        }
    }
    PatternDistribution out;
    for (const auto& [seq, p] : merged) {
        out.support.push_back(seq);
        out.probabilities.push_back(p);
    }
    out.validate();
    return out;
}

inline void write_transport_plan(std::ostream& out, const TransportPlan& plan)
{
    out << "from_sequence,to_sequence,mass\n";
    for (std::size_t i = 0; i < plan.sources.size(); ++i)
        for (std::size_t j = 0; j < plan.targets.size(); ++j) {
            const double m = plan.at(i, j);
            if (m <= 0.0) continue;
            out << detail::quoted(plan.sources[i].to_string()) << ',' << detail::quoted(plan.targets[j].to_string()) << ','
                << detail::format_real(m) << '\n';
        }
}

}  // namespace protpat
