#include "fixtures.hpp"

#include "protpat/patterns.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace protpat;

TEST(DegreeSequence, CanonicalOrderAndValidation)
{
    const DegreeSequence d{1, 3, 1, 1};
    EXPECT_EQ(d.to_string(), "3,1,1,1");
    EXPECT_EQ(d, DegreeSequence::parse("1,1,3,1"));
    EXPECT_THROW(DegreeSequence({1, 1, 1}), std::invalid_argument);
    EXPECT_THROW(DegreeSequence({2, 0}), std::invalid_argument);
    EXPECT_THROW(DegreeSequence(std::vector<int>{}), std::invalid_argument);
    EXPECT_THROW(DegreeSequence::parse("2,x"), ParseError);
    EXPECT_THROW(DegreeSequence::parse("1,,1"), ParseError);
}

TEST(DegreeSequence, OfPatterns)
{
    const auto net = fixtures::network({{"A", "B"}, {"B", "C"}, {"C", "A"}, {"C", "D"}});
    EXPECT_EQ(degree_sequence(fixtures::pattern(net, {"A-B"})), (DegreeSequence{1, 1}));
    EXPECT_EQ(degree_sequence(fixtures::pattern(net, {"A-B", "B-C"})), (DegreeSequence{2, 1, 1}));
    EXPECT_EQ(degree_sequence(fixtures::pattern(net, {"A-B", "B-C", "A-C"})), (DegreeSequence{2, 2, 2}));
}

TEST(LineCount, HalfTheDegreeSum)
{
    EXPECT_EQ(line_count(DegreeSequence{2, 1, 1}), 2);
    EXPECT_EQ(line_count(DegreeSequence{1, 1}), 1);
    EXPECT_EQ(line_count(DegreeSequence{3, 2, 2, 1, 1, 1}), 5);
}

TEST(NOnePlus, SpecialCasesAndStar)
{
    EXPECT_EQ(n_one_plus(DegreeSequence{2, 2, 2}), 2);
    EXPECT_EQ(n_one_plus(DegreeSequence{2, 2, 2, 2}), 3);
    EXPECT_EQ(n_one_plus(DegreeSequence{3, 1, 1, 1}), 1);
    EXPECT_EQ(n_one_plus(DegreeSequence{2, 2, 2, 2, 2}), 5);  // 5-cycle: unmodified count
}

TEST(NOnePlus, TreesCountInternalBuses)
{
    struct Case {
        std::vector<int> degrees;
        int internal;
    };
    const std::vector<Case> trees = {
        {{1, 1}, 0},
        {{2, 1, 1}, 1},
        {{3, 1, 1, 1}, 1},
        {{2, 2, 1, 1}, 2},
        {{4, 1, 1, 1, 1}, 1},
        {{3, 2, 1, 1, 1}, 2},
        {{2, 2, 2, 1, 1}, 3},
        {{5, 1, 1, 1, 1, 1}, 1},
        {{4, 2, 1, 1, 1, 1}, 2},
        {{3, 3, 1, 1, 1, 1}, 2},
        {{3, 2, 2, 1, 1, 1}, 3},
        {{2, 2, 2, 2, 1, 1}, 4},
    };
    for (const auto& t : trees) {
        const DegreeSequence d(t.degrees);
        ASSERT_EQ(static_cast<std::size_t>(line_count(d)), d.bus_count() - 1);
        EXPECT_EQ(n_one_plus(d), t.internal) << d.to_string();
    }
}

TEST(POnePlusObserved, HandEvaluations)
{
    const std::vector<DegreeSequence> path{{2, 2, 1, 1}}, star{{3, 1, 1, 1}};
    EXPECT_DOUBLE_EQ(*p_one_plus_observed(path), 1.0);
    EXPECT_DOUBLE_EQ(*p_one_plus_observed(star), 0.0);

    // (1 + 0 + (3-1) + (2-1)) / (1 + 1 + 2 + 1)
    const std::vector<DegreeSequence> mixed{{2, 2, 1, 1}, {3, 1, 1, 1}, {2, 2, 2, 1, 1}, {2, 2, 2}, {1, 1}, {2, 1, 1}};
    EXPECT_DOUBLE_EQ(*p_one_plus_observed(mixed), (1.0 + 0.0 + 2.0 + 1.0) / (1.0 + 1.0 + 2.0 + 1.0));
}

TEST(POnePlusObserved, UndefinedWithoutLargePatterns)
{
    const std::vector<DegreeSequence> small{{1, 1}, {2, 1, 1}};
    EXPECT_FALSE(p_one_plus_observed(small).has_value());
    EXPECT_FALSE(p_one_plus_observed(std::vector<DegreeSequence>{}).has_value());
}

TEST(SplitIntoPatterns, Components)
{
    const auto net = fixtures::network({{"A", "B"}, {"B", "C"}, {"C", "A"}, {"C", "D"}, {"D", "X"}, {"X", "Y"}});
    GenerationGroup g{Minute::parse("2010-05-01 12:01"), {BusPair("A", "B"), BusPair("B", "C"), BusPair("X", "Y")}, {1, 1, 1}};
    const auto patterns = split_into_patterns(g, net);
    ASSERT_EQ(patterns.size(), 2u);
    EXPECT_EQ(patterns[0].lines, fixtures::pattern(net, {"A-B", "B-C"}).lines);
    EXPECT_EQ(patterns[1].lines, fixtures::pattern(net, {"X-Y"}).lines);
    EXPECT_EQ(*patterns[1].source_minute, g.minute);

    GenerationGroup tri{g.minute, {BusPair("A", "B"), BusPair("B", "C"), BusPair("A", "C")}, {1, 1, 1}};
    EXPECT_EQ(split_into_patterns(tri, net).size(), 1u);

    GenerationGroup missing{g.minute, {BusPair("A", "Q")}, {1}};
    EXPECT_THROW(split_into_patterns(missing, net), std::invalid_argument);
}

TEST(SplitIntoPatterns, LineCountMatchesDegreeSum)
{
    const auto net = fixtures::grid(4);
    GenerationGroup g{Minute{}, {}, {}};
    for (LineId id = 0; id < net.line_count(); id += 3) {
        g.lines.push_back(net.line_names(id));
        g.circuit_counts.push_back(1);
    }
    for (const auto& p : split_into_patterns(g, net)) {
        EXPECT_EQ(static_cast<std::size_t>(line_count(degree_sequence(p))), p.size());
        EXPECT_TRUE(is_connected(p.lines));
    }
}

TEST(ExtractPatterns, MarksDoubledLinesAndSkipsOutsideLines)
{
    const auto net = fixtures::network({{"A", "B"}, {"B", "C"}}, 2);
    std::vector<GenerationGroup> groups{
        {Minute::parse("2010-05-01 12:05"), {BusPair("A", "B"), BusPair("Q", "R")}, {2, 1}},
        {Minute::parse("2010-05-01 12:06"), {BusPair("Q", "R")}, {1}},
    };
    const auto records = extract_patterns(groups, net);
    ASSERT_EQ(records.size(), 1u);
    EXPECT_EQ(records[0].pattern.size(), 1u);
    ASSERT_EQ(records[0].extra_circuits.size(), 1u);
    EXPECT_EQ(format_pattern(net, records[0].pattern, records[0].extra_circuits), "A-B|+A-B");
}

TEST(EstimatePCircuits, RatioOverTouchingGenerations)
{
    std::vector<NetworkLine> lines{{BusPair("A", "B"), 2}, {BusPair("B", "C"), 1}};
    const auto net = Network::from_lines(lines);
    std::vector<GenerationGroup> groups;
    for (int i = 0; i < 100; ++i)
        groups.push_back({Minute{2000, 1, 1, 0, 0}.plus_minutes(i), {BusPair("A", "B")}, {i < 7 ? 2 : 1}});
    for (int i = 0; i < 50; ++i)
        groups.push_back({Minute{2000, 1, 2, 0, 0}.plus_minutes(i), {BusPair("B", "C")}, {1}});
    EXPECT_DOUBLE_EQ(*estimate_p_circuits(groups, net), 0.07);

    const auto single = fixtures::network({{"A", "B"}});
    EXPECT_FALSE(estimate_p_circuits(groups, single).has_value());

    std::vector<GenerationGroup> all_double{{Minute{}, {BusPair("A", "B")}, {2}}};
    EXPECT_DOUBLE_EQ(*estimate_p_circuits(all_double, net), 1.0);
}

TEST(SizeHistogram, Frequencies)
{
    std::vector<int> sizes(93, 1);
    sizes.insert(sizes.end(), 5, 2);
    sizes.insert(sizes.end(), 2, 3);
    const auto h = size_histogram(std::span<const int>(sizes));
    EXPECT_DOUBLE_EQ(h.frequency(1), 0.93);
    EXPECT_DOUBLE_EQ(h.frequency(2), 0.05);
    EXPECT_DOUBLE_EQ(h.frequency(3), 0.02);
    EXPECT_DOUBLE_EQ(h.frequency(4), 0.0);
    EXPECT_EQ(h.total, 100u);
    EXPECT_THROW(size_histogram(std::span<const int>()), DegenerateDataError);
    const std::vector<int> one{4};
    EXPECT_DOUBLE_EQ(size_histogram(std::span<const int>(one)).frequency(4), 1.0);
}

TEST(PatternFile, RoundTrip)
{
    const auto net = fixtures::network({{"A-1", "B"}, {"B", "C"}, {"C", "D"}});
    const auto p = fixtures::pattern(net, {"A-1-B", "B-C"});
    std::ostringstream out;
    const std::vector<Pattern> ps{p};
    write_patterns(out, net, ps);
    EXPECT_EQ(out.str(), "A-1-B;B-C\n");
    std::istringstream in(out.str());
    const auto back = read_patterns(in, net);
    ASSERT_EQ(back.size(), 1u);
    EXPECT_EQ(back[0].lines, p.lines);
}

TEST(PatternFile, Errors)
{
    const auto net = fixtures::network({{"A", "B"}, {"B", "C"}, {"C", "D"}});
    std::istringstream disconnected("A-B;C-D\n");
    EXPECT_THROW(read_patterns(disconnected, net), ParseError);
    std::istringstream unknown("A-B\nA-Z\n");
    try {
        read_patterns(unknown, net);
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2u);
    }
    std::istringstream bad_extra("A-B|+B-C\n");
    EXPECT_THROW(read_pattern_records(bad_extra, net), ParseError);
}
