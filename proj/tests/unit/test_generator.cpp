#include "fixtures.hpp"

#include "protpat/generator.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace protpat;

namespace {

GeneratorConfig config(double p_one_plus, std::uint64_t seed = 1, double s = 2.0)
{
    GeneratorConfig c;
    c.p_one_plus = p_one_plus;
    c.size_model = ZipfModel(s);
    c.seed = seed;
    return c;
}

}  // namespace

TEST(GeneratorConfig, Validation)
{
    const auto net = fixtures::network({{"A", "B"}});
    auto c = config(0.5);
    EXPECT_NO_THROW(c.validate(net));
    c.p_one_plus = 1.5;
    EXPECT_THROW(c.validate(net), std::invalid_argument);
    c = config(0.5);
    c.p_circuits = -0.1;
    EXPECT_THROW(c.validate(net), std::invalid_argument);
    c = config(0.5);
    c.initial_weights = {1.0, 2.0};
    EXPECT_THROW(c.validate(net), std::invalid_argument);
    c.initial_weights = {0.0};
    EXPECT_THROW(c.validate(net), std::invalid_argument);
}

TEST(Generator, PatternsAreConnectedNetworkSubgraphs)
{
    const auto net = fixtures::grid(8);
    const auto patterns = generate_ensemble(net, config(0.4, 3, 1.8), 5000);
    for (const auto& g : patterns) {
        ASSERT_FALSE(g.pattern.lines.empty());
        EXPECT_TRUE(is_connected(g.pattern.lines));
        for (const auto& e : g.pattern.lines) EXPECT_TRUE(net.find_line(e).has_value());
        EXPECT_EQ(static_cast<int>(g.pattern.size()), g.achieved_size);
        EXPECT_LE(g.achieved_size, g.target_size);
        EXPECT_FALSE(g.saturated());  // a connected network never runs out before k_max
        EXPECT_LE(g.target_size, static_cast<int>(net.line_count()));
    }
}

TEST(Generator, PathNetworkSecondLineIsForced)
{
    const auto net = fixtures::network({{"A", "B"}, {"B", "C"}});
    for (const auto& g : generate_ensemble(net, config(0.5, 9, 1.5), 2000)) {
        if (g.achieved_size == 2) {
            EXPECT_EQ(g.pattern.lines, fixtures::pattern(net, {"A-B", "B-C"}).lines);
        }
    }
}

TEST(Generator, StarThirdLineAlwaysAtCentre)
{
    const auto net = fixtures::network({{"X", "A"}, {"X", "B"}, {"X", "C"}, {"X", "D"}});
    for (double p : {0.0, 1.0}) {
        auto c = config(p, 4, 1.5);
        c.initial_weights.assign(net.line_count(), 0.0);
        c.initial_weights[*net.find_line(*net.find_edge(BusPair("A", "X")))] = 1.0;
        int threes = 0;
        for (const auto& g : generate_ensemble(net, c, 3000)) {
            EXPECT_TRUE(std::binary_search(g.pattern.lines.begin(), g.pattern.lines.end(), *net.find_edge(BusPair("A", "X"))));
            if (g.achieved_size == 3) {
                ++threes;
                EXPECT_EQ(degree_sequence(g.pattern), (DegreeSequence{3, 1, 1, 1}));
            }
        }
        EXPECT_GT(threes, 0);
    }
}

TEST(Generator, SaturationOnSmallNetwork)
{
    const auto net = fixtures::network({{"A", "B"}, {"B", "C"}, {"C", "A"}});
    // k_max is the network size, so sampling above 3 is capped and never saturates.
    for (const auto& g : generate_ensemble(net, config(0.5, 2, 1.1), 2000)) {
        EXPECT_LE(g.target_size, 3);
        EXPECT_EQ(g.achieved_size, g.target_size);
    }
}

TEST(Generator, ExtraCircuits)
{
    std::vector<NetworkLine> lines;
    const auto grid = fixtures::grid(6);
    for (LineId id = 0; id < grid.line_count(); ++id) lines.push_back({grid.line_names(id), id % 3 == 0 ? 2 : 1});
    const auto net = Network::from_lines(lines);

    auto c = config(0.5, 6, 1.8);
    for (const auto& g : generate_ensemble(net, c, 2000)) EXPECT_TRUE(g.extra_circuits.empty());

    c.p_circuits = 1.0;
    for (const auto& g : generate_ensemble(net, c, 2000)) {
        std::vector<Edge> multi;
        for (const auto& e : g.pattern.lines)
            if (net.multiplicity(*net.find_line(e)) >= 2) multi.push_back(e);
        EXPECT_EQ(g.extra_circuits, multi);
    }
}

TEST(Generator, SizeFrequenciesFollowZipf)
{
    const auto net = fixtures::grid(12);
    const auto patterns = generate_ensemble(net, config(0.3, 10, 3.0), 50000);
    std::vector<int> counts(4, 0);
    for (const auto& g : patterns) ++counts[std::min(g.achieved_size, 4) - 1];
    const ZipfModel m(3.0);
    for (int k = 1; k <= 3; ++k) EXPECT_NEAR(counts[k - 1] / 50000.0, m.pmf(k), 0.01) << k;
}

TEST(Generator, EnsembleIndependentOfThreads)
{
    const auto net = fixtures::grid(8);
    const auto c = config(0.3, 12, 1.8);
    const auto one = generate_ensemble(net, c, 3000, 1);
    const auto four = generate_ensemble(net, c, 3000, 4);
    ASSERT_EQ(one.size(), four.size());
    for (std::size_t i = 0; i < one.size(); ++i) {
        EXPECT_EQ(one[i].pattern.lines, four[i].pattern.lines);
        EXPECT_EQ(one[i].target_size, four[i].target_size);
    }
    EXPECT_THROW(generate_ensemble(net, c, 0), std::invalid_argument);
}

TEST(Generator, MeasuredPOnePlusIsMonotone)
{
    const auto net = fixtures::grid(12);
    double previous = -1.0;
    for (double p : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        const auto g = detail::measure_streaming(net, config(p, 33, 2.0), 40000, 2);
        ASSERT_TRUE(g.has_value());
        EXPECT_GE(*g, previous) << p;
        previous = *g;
    }
}

TEST(Calibration, RecoversParameterOnGrid)
{
    const auto net = fixtures::grid(12);
    const auto truth = detail::measure_streaming(net, config(0.6, 100, 2.0), 50000, 2);
    ASSERT_TRUE(truth);
    const auto result = calibrate_p_one_plus(net, config(0.5, 200, 2.0), *truth, {50000, 0.005, 20, 2});
    EXPECT_TRUE(result.converged);
    EXPECT_NEAR(result.generated, *truth, 0.005);
    EXPECT_NEAR(result.p_one_plus, 0.6, 0.06);
    for (std::size_t i = 1; i < result.trace.size(); ++i) {
        EXPECT_GE(result.trace[i].lo, result.trace[i - 1].lo);
        EXPECT_LE(result.trace[i].hi, result.trace[i - 1].hi);
        EXPECT_GE(result.trace[i].p_one_plus, result.trace[i].lo);
        EXPECT_LE(result.trace[i].p_one_plus, result.trace[i].hi);
    }
}

TEST(Calibration, TargetOutsideRange)
{
    const auto net = fixtures::grid(6);
    try {
        calibrate_p_one_plus(net, config(0.5, 1, 2.0), 0.0, {20000, 0.005, 20, 1});
        FAIL();
    } catch (const CalibrationError& e) {
        ASSERT_TRUE(e.at_zero() && e.at_one());
        EXPECT_GT(*e.at_zero(), 0.0);
        EXPECT_GT(*e.at_one(), *e.at_zero());
    }
    EXPECT_THROW(calibrate_p_one_plus(net, config(0.5), 1.5), std::invalid_argument);
}

TEST(Calibration, NoLargePatterns)
{
    const auto net = fixtures::network({{"A", "B"}, {"B", "C"}});
    EXPECT_THROW(calibrate_p_one_plus(net, config(0.5), 0.5, {1000, 0.005, 20, 1}), CalibrationError);
}

TEST(GeneratedPatternFile, ExtrasSuffix)
{
    const auto net = fixtures::network({{"A", "B"}, {"B", "C"}}, 2);
    GeneratedPattern g;
    g.pattern = fixtures::pattern(net, {"A-B", "B-C"});
    g.extra_circuits = {*net.find_edge(BusPair("B", "C"))};
    std::ostringstream out;
    write_generated_patterns(out, net, std::vector<GeneratedPattern>{g});
    EXPECT_EQ(out.str(), "A-B;B-C|+B-C\n");
    std::istringstream in(out.str());
    const auto back = read_pattern_records(in, net);
    EXPECT_EQ(back[0].extra_circuits, g.extra_circuits);
}
