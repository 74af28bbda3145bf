#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "dnr/config.hpp"
#include "dnr/metrics.hpp"
#include "dnr/synthetic.hpp"
#include "oracles.hpp"

using namespace dnr;

namespace {

Graph complete(std::size_t n)
{
    Graph g(n, false);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) g.set_edge(i, j, true);
    return g;
}

}  // namespace

TEST(Confusion, PerfectPrediction)
{
    std::mt19937_64 rng(1);
    const auto g = oracle::random_graph(8, true, 0.3, rng);
    const auto m = confusion_metrics(g, g);
    EXPECT_EQ(m.accuracy, 1.0);
    EXPECT_EQ(m.misclassification, 0.0);
    EXPECT_EQ(m.precision, 1.0);
    EXPECT_EQ(m.recall, 1.0);
}

TEST(Confusion, EmptyPrediction)
{
    std::mt19937_64 rng(2);
    const auto truth = oracle::random_graph(9, false, 0.3, rng);
    const auto m = confusion_metrics(Graph(9, false), truth);
    const double D = 36.0, e = double(truth.edge_count());
    EXPECT_DOUBLE_EQ(m.accuracy, (D - e) / D);
    EXPECT_EQ(m.recall, 0.0);
    EXPECT_EQ(m.precision, 1.0);  // nothing predicted
}

TEST(Confusion, OrderMismatch)
{
    EXPECT_THROW(confusion_metrics(Graph(3, false), Graph(4, false)), InputError);
}

TEST(GraphMetrics, CompleteGraphs)
{
    const auto k3 = graph_metrics(complete(3));
    EXPECT_EQ(k3.triangles, 1.0);
    EXPECT_EQ(k3.transitivity, 1.0);
    EXPECT_EQ(k3.expected_degree, 2.0);
    const auto k4 = graph_metrics(complete(4));
    EXPECT_EQ(k4.triangles, 4.0);
    EXPECT_EQ(k4.transitivity, 1.0);
    EXPECT_EQ(k4.expected_degree, 3.0);
    const auto empty = graph_metrics(Graph(5, false));
    EXPECT_EQ(empty.triangles, 0.0);
    EXPECT_EQ(empty.transitivity, 0.0);
    EXPECT_EQ(empty.expected_degree, 0.0);
}

TEST(GraphMetrics, ExhaustiveSmallGraphs)
{
    for (std::size_t n = 1; n <= 6; ++n) {
        const std::size_t bits = n * (n - 1) / 2;
        for (std::uint64_t code = 0; code < (std::uint64_t{1} << bits); ++code) {
            const auto g = oracle::undirected_from_code(n, code);
            const auto m = graph_metrics(g);
            const auto o = oracle::enumerate_triads(g);
            ASSERT_EQ(m.triangles, o.triangles);
            ASSERT_NEAR(m.transitivity, o.transitivity, 1e-12);
            ASSERT_NEAR(m.expected_degree, o.mean_degree, 1e-12);
        }
    }
}

TEST(GraphMetrics, DirectedModes)
{
    std::mt19937_64 rng(3);
    for (int rep = 0; rep < 50; ++rep) {
        const auto g = oracle::random_graph(6, true, 0.35, rng);
        const auto sym = graph_metrics(g, TriangleMode::Symmetrized);
        const auto o = oracle::enumerate_triads(g);
        EXPECT_EQ(sym.triangles, o.triangles);
        EXPECT_NEAR(sym.transitivity, o.transitivity, 1e-12);
        const auto dir = graph_metrics(g, TriangleMode::Directed);
        EXPECT_EQ(dir.triangles, oracle::triangle_count(g));
        const double paths = oracle::twopath_count(g);
        EXPECT_NEAR(dir.transitivity, paths > 0 ? oracle::triangle_count(g) / paths : 0.0, 1e-12);
        EXPECT_NEAR(dir.expected_degree, double(g.edge_count()) / 6.0, 1e-12);
    }
}

TEST(GraphMetrics, ActiveVertexDegree)
{
    Graph g(5, false);
    g.set_edge(0, 1, true);
    EXPECT_EQ(graph_metrics(g, TriangleMode::Symmetrized, 2).expected_degree, 1.0);
}

TEST(Score, SimEqualsTruth)
{
    DnrGenerator gen;
    gen.n = 10;
    gen.length = 12;
    gen.spec = parse_edge_formula("edges + lag(1)");
    gen.theta = {-1.5, 2.0};
    const auto p = generate_dnr(gen);
    const auto r = score_forecast(p, 5, p, 5, 8);
    ASSERT_EQ(r.steps.size(), 8u);
    EXPECT_EQ(r.accuracy, 1.0);
    EXPECT_EQ(r.precision, 1.0);
    EXPECT_EQ(r.recall, 1.0);
    EXPECT_EQ(r.d_triangles, 0.0);
    EXPECT_EQ(r.d_transitivity, 0.0);
    EXPECT_EQ(r.d_expected_degree, 0.0);
    EXPECT_THROW(score_forecast(p, 5, p, 5, 9), InputError);
}

TEST(OlsSlope, KnownLine)
{
    const auto [b, se] = ols_slope({1, 3, 5, 7, 9});
    EXPECT_NEAR(b, 2.0, 1e-12);
    EXPECT_NEAR(se, 0.0, 1e-12);
    EXPECT_TRUE(std::isnan(ols_slope({1}).second));
}

TEST(Drift, SingleStepEqualsDirectFit)
{
    DnrGenerator gen;
    gen.n = 12;
    gen.length = 10;
    gen.spec = parse_edge_formula("edges + lag(1)");
    gen.theta = {-2, 2};
    const auto p = generate_dnr(gen);
    DriftOptions o;
    o.window = 0;
    o.first = p.length();
    const auto d = drift_series(p, gen.spec, o);
    ASSERT_EQ(d.coefficients.size(), 1u);
    FitOptions f;
    f.lambda = 0.0;
    f.refit = false;
    EXPECT_EQ(d.coefficients[0], fit_dnr(p, gen.spec, f).theta.values);
    EXPECT_EQ(d.drift, (std::vector<double>{0.0, 0.0}));
}

TEST(Drift, PersistentPanelPinsAtCap)
{
    std::mt19937_64 rng(5);
    const auto g = oracle::random_graph(10, false, 0.3, rng);
    const NetworkPanel p(numbered_ids(10), std::vector<Graph>(12, g));
    DriftOptions o;
    o.window = 5;
    const auto d = drift_series(p, parse_edge_formula("edges + lag(1)"), o);
    for (const auto& v : d.coefficients) EXPECT_GT(v[1], 10.0);
    EXPECT_NEAR(d.drift[1], 0.0, 1e-6);
}

TEST(Drift, IidPanelHasNoTrend)
{
    DnrGenerator gen;
    gen.n = 20;
    gen.length = 80;
    gen.spec = parse_edge_formula("edges");
    gen.theta = {-1.0};
    gen.seed = 9;
    const auto p = generate_dnr(gen);
    DriftOptions o;
    o.window = 10;
    const auto d = drift_series(p, gen.spec, o);
    double mean = 0;
    for (const auto& v : d.coefficients) mean += v[0];
    mean /= double(d.coefficients.size());
    EXPECT_NEAR(mean, -1.0, 0.1);
    EXPECT_LT(std::abs(d.slope[0]), 3 * d.slope_se[0]);
}
