#include "protpat/ingest.hpp"
#include "protpat/patterns.hpp"
#include "protpat/synth.hpp"

#include <gtest/gtest.h>

#include <set>
#include <sstream>

using namespace protpat;

TEST(SynthNetwork, KindsHaveRequestedLineCount)
{
    for (auto kind : {SynthKind::GridMesh, SynthKind::RandomTree, SynthKind::BaLike})
        for (int lines : {1, 2, 7, 480}) {
            const auto net = make_synthetic_network(kind, lines, 0.0, 3);
            EXPECT_EQ(net.line_count(), static_cast<std::size_t>(lines));
            EXPECT_EQ(net.dropped_lines(), 0u);  // connected: nothing outside the main component
        }
    EXPECT_EQ(make_synthetic_network(SynthKind::RandomTree, 50, 0.0, 1).bus_count(), 51u);
    EXPECT_EQ(make_synthetic_network(SynthKind::GridMesh, 480, 0.0, 1).bus_count(), 256u);
}

TEST(SynthNetwork, MultiCircuitFraction)
{
    const auto net = make_synthetic_network(SynthKind::GridMesh, 480, 0.1, 42);
    int doubled = 0;
    for (LineId id = 0; id < net.line_count(); ++id) doubled += net.multiplicity(id) == 2;
    // Binomial(480, 0.1): mean 48, sd 6.6
    EXPECT_NEAR(doubled, 48, 4 * 6.6);
}

TEST(SynthNetwork, BadInput)
{
    EXPECT_THROW(parse_synth_kind("ring"), std::invalid_argument);
    EXPECT_EQ(parse_synth_kind("ba-like"), SynthKind::BaLike);
    EXPECT_THROW(make_synthetic_network(SynthKind::GridMesh, 0, 0.1, 1), std::invalid_argument);
    EXPECT_THROW(make_synthetic_network(SynthKind::GridMesh, 5, 1.5, 1), std::invalid_argument);
}

TEST(SynthHistory, IngestsBackToGeneratedPatterns)
{
    const auto net = make_synthetic_network(SynthKind::GridMesh, 60, 0.5, 7);
    GeneratorConfig c;
    c.size_model = ZipfModel(2.0);
    c.p_circuits = 0.5;
    c.seed = 8;
    const auto generated = generate_ensemble(net, c, 500);
    const auto records = synthesize_history(net, c, 500);

    std::ostringstream csv;
    write_outage_csv(csv, records);
    std::istringstream in(csv.str());
    const auto parsed = parse_outage_csv(in);
    ASSERT_EQ(parsed.records.size(), records.size());
    const auto groups = group_into_generations(parsed.records);
    ASSERT_EQ(groups.size(), 500u);
    const auto extracted = extract_patterns(groups, net);
    ASSERT_EQ(extracted.size(), 500u);
    for (std::size_t i = 0; i < 500; ++i) {
        EXPECT_EQ(extracted[i].pattern.lines, generated[i].pattern.lines);
        EXPECT_EQ(extracted[i].extra_circuits, generated[i].extra_circuits);
    }
}
