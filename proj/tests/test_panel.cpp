#include <gtest/gtest.h>

#include "dnr/graph.hpp"
#include "dnr/panel.hpp"
#include "dnr/synthetic.hpp"
#include "oracles.hpp"

using namespace dnr;

namespace {

NetworkPanel empty_panel(std::size_t n, std::size_t T, bool directed = false)
{
    return NetworkPanel(numbered_ids(n), std::vector<Graph>(T, Graph(n, directed)));
}

}  // namespace

TEST(Graph, SelfLoopRejected)
{
    Graph g(3, true);
    EXPECT_THROW(g.set_edge(1, 1, true), ValidationError);
    EXPECT_THROW(g.set_edge(0, 3, true), ValidationError);
}

TEST(Graph, UndirectedIsSymmetric)
{
    Graph g(4, false);
    g.set_edge(2, 0, true);
    EXPECT_TRUE(g.edge(0, 2));
    EXPECT_EQ(g.edge_count(), 1u);
    EXPECT_EQ(g.dyads(), 6u);
}

TEST(Graph, DyadEnumeration)
{
    EXPECT_EQ(enumerate_dyads(3, true).size(), 6u);
    EXPECT_EQ(enumerate_dyads(3, false).size(), 3u);
    for (const auto& d : enumerate_dyads(5, false)) EXPECT_LT(d.i, d.j);
    EXPECT_EQ(dyad_count(1, true), 0u);
}

TEST(Expand, SubsetIntoUniverse)
{
    Graph ab(2, false);
    ab.set_edge(0, 1, true);
    const auto g = expand_to_universe(ab, {"A", "B"}, {"A", "B", "C"});
    ASSERT_EQ(g.order(), 3u);
    EXPECT_TRUE(g.edge(0, 1));
    EXPECT_TRUE(g.edge(1, 0));
    EXPECT_EQ(g.edge_count(), 1u);
    EXPECT_FALSE(g.edge(0, 2) || g.edge(2, 0) || g.edge(1, 2) || g.edge(2, 1));
}

TEST(Expand, FullUniverseIsIdentity)
{
    std::mt19937_64 rng(1);
    const auto g = oracle::random_graph(5, true, 0.4, rng);
    const auto ids = numbered_ids(5);
    EXPECT_EQ(expand_to_universe(g, ids, ids), g);
}

TEST(Expand, UnknownIdIsMappingError)
{
    EXPECT_THROW(expand_to_universe(Graph(1, false), {"Z"}, {"A"}), MappingError);
}

TEST(Expand, RestrictRoundTripExhaustive)
{
    // every undirected graph on up to 6 vertices, restricted to the first half
    // of the universe and expanded back, reproduces its active subgraph
    for (std::size_t n = 2; n <= 6; ++n) {
        const auto ids = numbered_ids(n);
        const std::vector<std::string> subset(ids.begin(), ids.begin() + long(n / 2 + 1));
        const std::size_t bits = n * (n - 1) / 2;
        for (std::uint64_t code = 0; code < (std::uint64_t{1} << bits); ++code) {
            const auto g = oracle::undirected_from_code(n, code);
            const auto sub = restrict_to(g, ids, subset);
            const auto back = expand_to_universe(sub, subset, ids);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) {
                    const bool inside = i < subset.size() && j < subset.size();
                    ASSERT_EQ(back.edge(i, j), inside && g.edge(i, j)) << n << " " << code;
                }
        }
    }
}

TEST(Windows, AnchorsAndMembers)
{
    const auto p = empty_panel(3, 5);
    const auto w = windows(p, 2);
    ASSERT_EQ(w.size(), 3u);
    for (std::size_t a = 0; a < w.size(); ++a) {
        EXPECT_EQ(w[a].anchor, a + 3);
        EXPECT_EQ(w[a].members.size(), 2u);
        EXPECT_EQ(&w[a].at_lag(1), &p.graph(w[a].anchor - 1));
        EXPECT_EQ(&w[a].at_lag(2), &p.graph(w[a].anchor - 2));
    }
}

TEST(Windows, InsufficientHistory)
{
    EXPECT_THROW(windows(empty_panel(3, 3), 3), InsufficientHistory);
    EXPECT_THROW(window_at(empty_panel(3, 5), 2, 2), InsufficientHistory);
}

TEST(Windows, PartitionAnchors)
{
    const auto w = windows(empty_panel(3, 10), 1);
    ASSERT_EQ(w.size(), 9u);
    for (std::size_t a = 0; a < w.size(); ++a) EXPECT_EQ(w[a].anchor, a + 2);
}

TEST(Windows, LagOutsideWindow)
{
    const auto p = empty_panel(3, 4);
    const auto w = window_at(p, 3, 2);
    EXPECT_THROW(w.at_lag(3), SpecError);
}

TEST(Panel, InactiveVertexWithEdgeFails)
{
    Graph g(3, false);
    g.set_edge(0, 2, true);
    EXPECT_THROW(NetworkPanel(numbered_ids(3), {g}, {{1, 1, 0}}), ValidationError);
    EXPECT_NO_THROW(NetworkPanel(numbered_ids(3), {g}, {{1, 0, 1}}));
}

TEST(Panel, FixedVertexPanelIsAllActive)
{
    const auto p = empty_panel(4, 3);
    EXPECT_FALSE(p.has_vertex_dynamics());
    for (std::size_t t = 1; t <= 3; ++t) EXPECT_EQ(p.active_count(t), 4u);
}

TEST(Panel, DuplicateIdsRejected)
{
    EXPECT_THROW(NetworkPanel({"a", "a"}, {Graph(2, false)}), ValidationError);
}

TEST(Panel, MixedDirectednessRejected)
{
    EXPECT_THROW(NetworkPanel(numbered_ids(2), {Graph(2, false), Graph(2, true)}), ValidationError);
}

TEST(Panel, AppendExtendsAndChecksActivity)
{
    auto p = empty_panel(3, 2);
    Graph g(3, false);
    g.set_edge(0, 1, true);
    EXPECT_THROW(p.append(g, {1, 0, 1}), ValidationError);
    p.append(g, {1, 1, 0});
    EXPECT_EQ(p.length(), 3u);
    EXPECT_TRUE(p.has_vertex_dynamics());
    EXPECT_FALSE(p.active(3, 2));
    EXPECT_EQ(p.time_labels().back(), "3");
}

TEST(Panel, SliceKeepsCovariatesAligned)
{
    auto p = empty_panel(2, 4);
    p.set_vertex_covariate("x", {{1, 1}, {2, 2}, {3, 3}, {4, 4}});
    const auto s = p.slice(2, 3);
    EXPECT_EQ(s.length(), 2u);
    EXPECT_EQ(s.vertex_covariate("x", 1, 0), 2.0);
    EXPECT_EQ(s.vertex_covariate("x", 2, 1), 3.0);
}
