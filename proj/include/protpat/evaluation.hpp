#pragma once

// Generated-vs-observed evaluation: repeated Wasserstein comparisons and
// two-sample permutation tests on degree sequences.

#include "protpat/distance.hpp"
#include "protpat/error.hpp"
#include "protpat/generator.hpp"
#include "protpat/parallel.hpp"
#include "protpat/patterns.hpp"
#include "protpat/random.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace protpat {

struct PermutationTestResult {
    double observed_statistic = 0.0;
    std::size_t permutation_count = 0;
    std::size_t at_least_as_extreme = 0;
    double p_value = 1.0;
    std::uint64_t seed = 0;
};

struct PermutationOptions {
    std::size_t permutations = 10000;
    std::uint64_t seed = 0;
    unsigned threads = 1;
};

/// Two samples of degree sequences reduced to counts over their pooled support.
class TwoSampleCounts {
public:
    TwoSampleCounts(SequenceGraph& graph, std::span<const DegreeSequence> a, std::span<const DegreeSequence> b)
    {
        if (a.empty() || b.empty()) throw DegenerateDataError("permutation test needs two non-empty samples");
        support_.assign(a.begin(), a.end());
        support_.insert(support_.end(), b.begin(), b.end());
        std::sort(support_.begin(), support_.end());
        support_.erase(std::unique(support_.begin(), support_.end()), support_.end());
        if (support_.size() > 65535) throw std::length_error("pooled support too large");

        auto label = [&](const DegreeSequence& s) {
            return static_cast<std::uint16_t>(std::lower_bound(support_.begin(), support_.end(), s) - support_.begin());
        };
        counts_a_.assign(support_.size(), 0);
        counts_b_.assign(support_.size(), 0);
        pool_.reserve(a.size() + b.size());
        for (const auto& s : a) {
            pool_.push_back(label(s));
            ++counts_a_[pool_.back()];
        }
        for (const auto& s : b) {
            pool_.push_back(label(s));
            ++counts_b_[pool_.back()];
        }
        n_a_ = static_cast<long long>(a.size());
        n_b_ = static_cast<long long>(b.size());
        distances_ = distance_matrix(graph, support_);
    }

    /// Wasserstein distance between the two empirical distributions.
    double statistic() const { return static_cast<double>(scaled_statistic()) / scale(); }

    /// The statistic times n_a * n_b, exact.
    long long scaled_statistic() const { return scaled(counts_a_, counts_b_); }

    /// Statistic for one random relabelling drawn from `gen`. `scratch` and
    /// `counts` are caller-owned buffers.
    template <typename Gen>
    long long permuted_scaled_statistic(Gen& gen, std::vector<std::uint16_t>& scratch, std::vector<long long>& small_counts,
                                        std::vector<long long>& other_counts) const
    {
        // Partial Fisher-Yates: the first `take` slots are a uniform random
        // subset, relabelled as the smaller sample.
        scratch = pool_;
        const std::size_t total = scratch.size();
        const bool a_is_small = n_a_ <= n_b_;
        const std::size_t take = static_cast<std::size_t>(a_is_small ? n_a_ : n_b_);
        small_counts.assign(support_.size(), 0);
        for (std::size_t t = 0; t < take; ++t) {
            const std::size_t j = t + static_cast<std::size_t>(uniform_below(gen, total - t));
            std::swap(scratch[t], scratch[j]);
            ++small_counts[scratch[t]];
        }
        other_counts.resize(support_.size());
        for (std::size_t i = 0; i < support_.size(); ++i) other_counts[i] = counts_a_[i] + counts_b_[i] - small_counts[i];
        return a_is_small ? scaled(small_counts, other_counts) : scaled(other_counts, small_counts);
    }

    double scale() const { return static_cast<double>(n_a_) * static_cast<double>(n_b_); }
    const std::vector<DegreeSequence>& support() const noexcept { return support_; }

private:
    long long scaled(std::span<const long long> ca, std::span<const long long> cb) const
    {
        return detail::scaled_transport_cost(ca, n_a_, cb, n_b_, distances_);
    }

    std::vector<DegreeSequence> support_;
    std::vector<int> distances_;
    std::vector<long long> counts_a_, counts_b_;
    std::vector<std::uint16_t> pool_;  // support labels, sample a first
    long long n_a_ = 0, n_b_ = 0;
};

/// Permutation test of "same distribution" with the Wasserstein statistic.
/// p = (1 + #{permuted >= observed}) / (permutations + 1). Permutation i uses
/// stream (seed, i), so the result is independent of the thread count.
inline PermutationTestResult permutation_test(SequenceGraph& graph, std::span<const DegreeSequence> a,
                                              std::span<const DegreeSequence> b, const PermutationOptions& options = {})
{
    if (options.permutations == 0) throw std::invalid_argument("permutation count must be >= 1");
    const TwoSampleCounts samples(graph, a, b);
    const long long observed = samples.scaled_statistic();

    const unsigned threads = std::max(1u, options.threads);
    std::vector<std::size_t> extreme(threads, 0);
    parallel_for(options.permutations, threads, [&](std::size_t begin, std::size_t end, unsigned worker) {
        std::vector<std::uint16_t> scratch;
        std::vector<long long> small_counts, other_counts;
        for (std::size_t i = begin; i < end; ++i) {
            auto gen = derive_stream(options.seed, i);
            if (samples.permuted_scaled_statistic(gen, scratch, small_counts, other_counts) >= observed) ++extreme[worker];
        }
    });

    PermutationTestResult out;
    out.observed_statistic = static_cast<double>(observed) / samples.scale();
    out.permutation_count = options.permutations;
    for (auto e : extreme) out.at_least_as_extreme += e;
    out.p_value = static_cast<double>(1 + out.at_least_as_extreme) / static_cast<double>(options.permutations + 1);
    out.seed = options.seed;
    return out;
}

inline PermutationTestResult permutation_test(std::span<const DegreeSequence> a, std::span<const DegreeSequence> b,
                                              const PermutationOptions& options = {})
{
    SequenceGraph graph;
    return permutation_test(graph, a, b, options);
}

struct EvaluationReport {
    std::size_t repetitions = 0;
    std::size_t sample_size = 0;  // patterns per generated set (= observed count)
    std::vector<double> distances;
    std::vector<double> p_values;
    double mean_distance = 0.0;
    double variance_distance = 0.0;  // sample variance (n - 1 denominator)
    double median_p_value = 0.0;
    std::size_t p_values_at_least_05 = 0;

    /// Distance expressed as the number of line changes across the sample.
    long long line_changes(double distance) const { return std::llround(distance * static_cast<double>(sample_size)); }
};

struct EvaluationOptions {
    std::size_t repetitions = 100;
    std::size_t permutations = 10000;
    unsigned threads = 1;
};

inline double median(std::vector<double> v)
{
    if (v.empty()) throw std::invalid_argument("median of empty list");
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

/// Fills the summary fields from `distances` and `p_values`.
inline void summarize(EvaluationReport& report)
{
    const auto& d = report.distances;
    report.repetitions = d.size();
    if (d.empty()) return;
    double sum = 0.0;
    for (double x : d) sum += x;
    report.mean_distance = sum / static_cast<double>(d.size());
    double ss = 0.0;
    for (double x : d) ss += (x - report.mean_distance) * (x - report.mean_distance);
    report.variance_distance = d.size() > 1 ? ss / static_cast<double>(d.size() - 1) : 0.0;
    report.median_p_value = median(report.p_values);
    report.p_values_at_least_05 = static_cast<std::size_t>(
        std::count_if(report.p_values.begin(), report.p_values.end(), [](double p) { return p >= 0.05; }));
}

/// Seeds of repetition i: the generated set and its permutation test.
inline std::uint64_t repetition_generation_seed(std::uint64_t seed, std::size_t i) { return derive_seed(derive_seed(seed, 1), i); }
inline std::uint64_t repetition_permutation_seed(std::uint64_t seed, std::size_t i) { return derive_seed(derive_seed(seed, 2), i); }

/// For each repetition, generate as many patterns as were observed, measure
/// their Wasserstein distance to the observed set and run a permutation test.
inline EvaluationReport evaluate_model(std::span<const DegreeSequence> observed, const Network& net,
                                       const GeneratorConfig& config, const EvaluationOptions& options = {})
{
    if (observed.empty()) throw DegenerateDataError("no observed patterns to evaluate against");
    if (options.repetitions == 0) throw std::invalid_argument("repetitions must be >= 1");
    SequenceGraph graph;
    EvaluationReport report;
    report.sample_size = observed.size();
    for (std::size_t rep = 0; rep < options.repetitions; ++rep) {
        GeneratorConfig cfg = config;
        cfg.seed = repetition_generation_seed(config.seed, rep);
        const auto generated = generate_ensemble(net, cfg, observed.size(), options.threads);
        std::vector<DegreeSequence> seqs;
        seqs.reserve(generated.size());
        for (const auto& g : generated) seqs.push_back(degree_sequence(g.pattern));

        const auto test = permutation_test(
            graph, observed, seqs, {options.permutations, repetition_permutation_seed(config.seed, rep), options.threads});
        report.distances.push_back(test.observed_statistic);
        report.p_values.push_back(test.p_value);
    }
    summarize(report);
    return report;
}

inline EvaluationReport evaluate_model(std::span<const Pattern> observed, const Network& net, const GeneratorConfig& config,
                                       const EvaluationOptions& options = {})
{
    std::vector<DegreeSequence> seqs;
    seqs.reserve(observed.size());
    for (const auto& p : observed) seqs.push_back(degree_sequence(p));
    return evaluate_model(std::span<const DegreeSequence>(seqs), net, config, options);
}

inline std::string format_evaluation_report(const EvaluationReport& r)
{
    char buf[160];
    std::string out;
    out += "repetitions = " + std::to_string(r.repetitions) + "\n";
    out += "sample_size = " + std::to_string(r.sample_size) + "\n";
    std::snprintf(buf, sizeof buf, "mean_distance = %.6f\n", r.mean_distance);
    out += buf;
    std::snprintf(buf, sizeof buf, "variance_distance = %.6g\n", r.variance_distance);
    out += buf;
    out += "mean_line_changes = " + std::to_string(r.line_changes(r.mean_distance)) + "\n";
    std::snprintf(buf, sizeof buf, "median_p_value = %.4f\n", r.median_p_value);
    out += buf;
    out += "p_values_at_least_0.05 = " + std::to_string(r.p_values_at_least_05) + "\n";
    return out;
}

inline void write_evaluation_csv(std::ostream& out, const EvaluationReport& r)
{
    out << "repetition,distance,p_value\n";
    char buf[96];
    for (std::size_t i = 0; i < r.distances.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%zu,%.10f,%.6f\n", i, r.distances[i], r.p_values[i]);
        out << buf;
    }
}

}  // namespace protpat
