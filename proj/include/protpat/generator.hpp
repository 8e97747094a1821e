#pragma once

// Generative model of fast-protection outage patterns.
//
// A pattern starts from one random line, draws its target size from the Zipf
// model, and grows one attached line at a time. While it has two or more
// lines, a new line goes to a pattern bus of degree 1 with probability
// p_one_plus when the network offers both kinds of attachment. Finally each
// multi-circuit line may lose one parallel circuit with probability p_circuits.

#include "protpat/error.hpp"
#include "protpat/network.hpp"
#include "protpat/parallel.hpp"
#include "protpat/patterns.hpp"
#include "protpat/random.hpp"
#include "protpat/zipf.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace protpat {

struct GeneratorConfig {
    double p_one_plus = 0.5;
    double p_circuits = 0.0;
    ZipfModel size_model{4.09};
    /// Initial-outage weight per network line (by LineId); empty means uniform.
    std::vector<double> initial_weights;
    std::uint64_t seed = 0;

    void validate(const Network& net) const
    {
        if (!(p_one_plus >= 0.0 && p_one_plus <= 1.0)) throw std::invalid_argument("p_one_plus must lie in [0, 1]");
        if (!(p_circuits >= 0.0 && p_circuits <= 1.0)) throw std::invalid_argument("p_circuits must lie in [0, 1]");
        if (net.line_count() == 0) throw std::invalid_argument("network has no lines");
        if (!initial_weights.empty()) {
            if (initial_weights.size() != net.line_count())
                throw std::invalid_argument("initial_weights needs one weight per network line");
            double total = 0.0;
            for (double w : initial_weights) {
                if (!(w >= 0.0) || !std::isfinite(w)) throw std::invalid_argument("initial weights must be finite and >= 0");
                total += w;
            }
            if (!(total > 0.0)) throw std::invalid_argument("initial weights sum to zero");
        }
    }
};

struct GeneratedPattern {
    Pattern pattern;                   // single-line view
    std::vector<Edge> extra_circuits;  // lines whose parallel circuit also outaged
    int target_size = 0;
    int achieved_size = 0;

    bool saturated() const noexcept { return achieved_size < target_size; }
};

/// Reusable generator bound to one network and configuration. Holds scratch
/// buffers, so use one instance per thread.
class PatternGrower {
public:
    PatternGrower(const Network& net, const GeneratorConfig& config) : net_(net), config_(config)
    {
        config_.validate(net_);
        if (!config_.initial_weights.empty()) {
            cumulative_.reserve(config_.initial_weights.size());
            double total = 0.0;
            for (double w : config_.initial_weights) cumulative_.push_back(total += w);
        }
    }

    template <typename Gen>
    GeneratedPattern grow(Gen& gen)
    {
        const int total_lines = static_cast<int>(net_.line_count());
        state_.clear();
        state_.add(net_, initial_line(gen));

        GeneratedPattern out;
        out.target_size = sample_size(config_.size_model, gen, total_lines);

        while (static_cast<int>(state_.lines.size()) < out.target_size) {
            detail::collect_attachable(net_, state_, at_degree_1_, at_degree_2plus_);
            if (at_degree_1_.empty() && at_degree_2plus_.empty()) break;  // saturated
            const std::vector<LineId>* side = nullptr;
            if (at_degree_2plus_.empty())
                side = &at_degree_1_;
            else if (at_degree_1_.empty())
                side = &at_degree_2plus_;
            else
                side = uniform_open01(gen) < config_.p_one_plus ? &at_degree_1_ : &at_degree_2plus_;
            state_.add(net_, (*side)[uniform_below(gen, side->size())]);
        }

        std::sort(state_.lines.begin(), state_.lines.end());
        out.achieved_size = static_cast<int>(state_.lines.size());
        out.pattern.lines.reserve(state_.lines.size());
        for (LineId id : state_.lines) {
            out.pattern.lines.push_back(net_.line(id));
            if (net_.multiplicity(id) >= 2 && config_.p_circuits > 0.0 && uniform_open01(gen) < config_.p_circuits)
                out.extra_circuits.push_back(net_.line(id));
        }
        return out;
    }

private:
    template <typename Gen>
    LineId initial_line(Gen& gen)
    {
        if (cumulative_.empty()) return static_cast<LineId>(uniform_below(gen, net_.line_count()));
        const double u = uniform_open01(gen) * cumulative_.back();
        auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
        if (it == cumulative_.end()) --it;
        return static_cast<LineId>(it - cumulative_.begin());
    }

    const Network& net_;
    GeneratorConfig config_;
    std::vector<double> cumulative_;
    detail::GrowthState state_;
    std::vector<LineId> at_degree_1_;
    std::vector<LineId> at_degree_2plus_;
};

template <typename Gen>
GeneratedPattern generate_pattern(const Network& net, const GeneratorConfig& config, Gen& gen)
{
    PatternGrower grower(net, config);
    return grower.grow(gen);
}

/// `count` patterns; pattern i is drawn from stream (config.seed, i), so the
/// result does not depend on `threads`.
inline std::vector<GeneratedPattern> generate_ensemble(const Network& net, const GeneratorConfig& config,
                                                       std::size_t count, unsigned threads = 1)
{
    if (count == 0) throw std::invalid_argument("ensemble count must be >= 1");
    config.validate(net);
    std::vector<GeneratedPattern> out(count);
    parallel_for(count, threads, [&](std::size_t begin, std::size_t end, unsigned) {
        PatternGrower grower(net, config);
        for (std::size_t i = begin; i < end; ++i) {
            auto gen = derive_stream(config.seed, i);
            out[i] = grower.grow(gen);
        }
    });
    return out;
}

/// The observed-pattern estimator applied to the generated single-line patterns.
inline std::optional<double> measure_p_one_plus_generated(std::span<const GeneratedPattern> patterns)
{
    std::vector<DegreeSequence> seqs;
    for (const auto& g : patterns)
        if (g.pattern.size() >= 3) seqs.push_back(degree_sequence(g.pattern));
    return p_one_plus_observed(std::span<const DegreeSequence>(seqs));
}

namespace detail {

/// Same as generating `count` patterns and measuring them, without keeping
/// the small patterns in memory.
inline std::optional<double> measure_streaming(const Network& net, const GeneratorConfig& config, std::size_t count,
                                               unsigned threads)
{
    std::vector<std::vector<DegreeSequence>> per_chunk(std::max(1u, threads));
    parallel_for(count, threads, [&](std::size_t begin, std::size_t end, unsigned worker) {
        PatternGrower grower(net, config);
        for (std::size_t i = begin; i < end; ++i) {
            auto gen = derive_stream(config.seed, i);
            auto g = grower.grow(gen);
            if (g.pattern.size() >= 3) per_chunk[worker].push_back(degree_sequence(g.pattern));
        }
    });
    std::vector<DegreeSequence> all;
    for (auto& chunk : per_chunk) all.insert(all.end(), chunk.begin(), chunk.end());
    return p_one_plus_observed(std::span<const DegreeSequence>(all));
}

}  // namespace detail

class CalibrationError : public std::runtime_error {
public:
    CalibrationError(const std::string& what, std::optional<double> at_zero = {}, std::optional<double> at_one = {})
        : std::runtime_error(what), at_zero_(at_zero), at_one_(at_one)
    {
    }

    /// Generated p_one_plus at the bracket endpoints p = 0 and p = 1, when measured.
    std::optional<double> at_zero() const noexcept { return at_zero_; }
    std::optional<double> at_one() const noexcept { return at_one_; }

private:
    std::optional<double> at_zero_, at_one_;
};

struct CalibrationStep {
    int iteration = 0;
    double lo = 0.0;  // bracket before this evaluation
    double hi = 1.0;
    double p_one_plus = 0.0;
    double generated = 0.0;
};

struct CalibrationResult {
    double p_one_plus = 0.0;
    double generated = 0.0;
    bool converged = false;
    std::vector<CalibrationStep> trace;
};

struct CalibrationOptions {
    std::size_t ensemble_size = 1'000'000;
    double tolerance = 0.005;
    int max_iterations = 20;
    unsigned threads = 1;
};

/// Bisection on p_one_plus until the generated estimator is within tolerance
/// of `target`. Every evaluation reuses base.seed (common random numbers).
inline CalibrationResult calibrate_p_one_plus(const Network& net, const GeneratorConfig& base, double target,
                                              const CalibrationOptions& options = {})
{
    if (!(target >= 0.0 && target <= 1.0)) throw std::invalid_argument("target must lie in [0, 1]");
    if (options.ensemble_size == 0) throw std::invalid_argument("ensemble_size must be >= 1");

    CalibrationResult result;
    int iteration = 0;
    double lo = 0.0, hi = 1.0;
    auto evaluate = [&](double p) {
        GeneratorConfig cfg = base;
        cfg.p_one_plus = p;
        const auto g = detail::measure_streaming(net, cfg, options.ensemble_size, options.threads);
        if (!g) throw CalibrationError("no generated pattern has 3 or more lines; enlarge the ensemble or network");
        result.trace.push_back({++iteration, lo, hi, p, *g});
        return *g;
    };

    const double at_zero = evaluate(0.0);
    const double at_one = evaluate(1.0);
    auto finish = [&](double p, double g, bool converged) {
        result.p_one_plus = p;
        result.generated = g;
        result.converged = converged;
        return result;
    };
    if (std::abs(at_zero - target) <= options.tolerance) return finish(0.0, at_zero, true);
    if (std::abs(at_one - target) <= options.tolerance) return finish(1.0, at_one, true);
    if ((at_zero < target) == (at_one < target))
        throw CalibrationError("target " + std::to_string(target) + " is outside the generated range [" +
                                   std::to_string(std::min(at_zero, at_one)) + ", " +
                                   std::to_string(std::max(at_zero, at_one)) + "]",
                               at_zero, at_one);

    const bool increasing = at_one > at_zero;
    double p = 0.5, g = 0.0;
    for (int step = 0; step < options.max_iterations; ++step) {
        p = 0.5 * (lo + hi);
        g = evaluate(p);
        if (std::abs(g - target) <= options.tolerance) return finish(p, g, true);
        if ((g < target) == increasing)
            lo = p;
        else
            hi = p;
    }
    return finish(p, g, false);
}

/// Pattern file line for a generated pattern, with "|+A-B" per doubled line.
inline void write_generated_patterns(std::ostream& out, const Network& net, std::span<const GeneratedPattern> patterns)
{
    for (const auto& g : patterns) out << format_pattern(net, g.pattern, g.extra_circuits) << '\n';
}

}  // namespace protpat
