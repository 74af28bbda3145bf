#include <gtest/gtest.h>

#include <cmath>

#include "dnr/config.hpp"
#include "dnr/estimator.hpp"
#include "dnr/synthetic.hpp"
#include "oracles.hpp"

using namespace dnr;

namespace {

NetworkPanel persistence_panel(std::uint64_t seed, std::size_t n = 20, std::size_t T = 50)
{
    DnrGenerator g;
    g.n = n;
    g.length = T;
    g.spec = parse_edge_formula("edges + lag(1)");
    g.theta = {-2.0, 2.5};
    g.initial_density = inv_logit(-2.0);
    g.seed = seed;
    return generate_dnr(g);
}

FitOptions unpenalized()
{
    FitOptions o;
    o.lambda = 0.0;
    return o;
}

}  // namespace

TEST(FitDnr, RecoversKnownCoefficients)
{
    double e = 0, l = 0;
    const int reps = 5;
    for (int r = 0; r < reps; ++r) {
        const auto m = fit_dnr(persistence_panel(100 + std::uint64_t(r)), parse_edge_formula("edges + lag(1)"), unpenalized());
        ASSERT_TRUE(m.converged());
        e += m.theta.at("edges");
        l += m.theta.at("lag1");
    }
    EXPECT_NEAR(e / reps, -2.0, 0.25);
    EXPECT_NEAR(l / reps, 2.5, 0.25);
}

TEST(FitDnr, MatchesIrlsOnStackedDesign)
{
    const auto p = persistence_panel(7, 12, 20);
    const auto spec = parse_edge_formula("edges + lag(1) + triangle@lag(1)");
    const auto m = fit_dnr(p, spec, unpenalized());
    const auto b = stack_designs(p, spec, all_anchors(p, 1));
    std::vector<std::vector<double>> X;
    for (std::size_t r = 0; r < b.rows(); ++r) X.emplace_back(b.row(r), b.row(r) + b.cols());
    const auto ref = oracle::irls(X, b.response);
    for (std::size_t c = 0; c < ref.size(); ++c) EXPECT_NEAR(m.theta.values[c], ref[c], 1e-6);
    for (double se : m.theta.std_errors) EXPECT_TRUE(std::isfinite(se));
}

TEST(FitDnr, IdenticalGraphsSaturatePersistence)
{
    std::mt19937_64 rng(3);
    const auto g = oracle::random_graph(10, false, 0.3, rng);
    const NetworkPanel p(numbered_ids(10), std::vector<Graph>(6, g));
    const auto m = fit_dnr(p, parse_edge_formula("edges + lag(1)"), unpenalized());
    EXPECT_GT(m.theta.at("lag1"), 10.0);
    EXPECT_LE(m.theta.at("lag1"), 60.0);
}

TEST(FitDnr, BicSelectionAndRefit)
{
    const auto p = persistence_panel(11);
    const auto m = fit_dnr(p, parse_edge_formula("edges + lag(1) + triangle@lag(1) + twopath@lag(1)"));
    EXPECT_TRUE(m.converged());
    EXPECT_GE(m.theta.lambda, 0.0);
    EXPECT_GT(m.theta.at("lag1"), 1.5);
    // refit coefficients on the support only
    for (std::size_t c = 0; c < m.theta.values.size(); ++c) {
        const bool in = std::find(m.theta.support.begin(), m.theta.support.end(), c) != m.theta.support.end();
        if (!in) EXPECT_EQ(m.theta.values[c], 0.0);
    }
}

TEST(FitDnr, InsufficientHistory)
{
    const NetworkPanel p(numbered_ids(3), {Graph(3, false)});
    EXPECT_THROW(fit_dnr(p, parse_edge_formula("edges + lag(1)")), InsufficientHistory);
}

TEST(FitDnr, NonConvergenceIsFlagged)
{
    const auto p = persistence_panel(13, 10, 10);
    FitOptions o = unpenalized();
    o.solver.max_outer = 1;
    o.solver.max_inner = 1;
    const auto m = fit_dnr(p, parse_edge_formula("edges + lag(1) + twopath@lag(1)"), o);
    EXPECT_FALSE(m.converged());
    EXPECT_FALSE(m.theta.failure.empty());
    EXPECT_EQ(m.theta.values.size(), 3u);
}

TEST(FitDnrv, AlternatingPresenceIsNegative)
{
    const std::size_t n = 8, T = 12;
    std::vector<Graph> gs(T, Graph(n, false));
    std::vector<std::vector<std::uint8_t>> act;
    for (std::size_t t = 0; t < T; ++t) {
        std::vector<std::uint8_t> a(n);
        for (std::size_t i = 0; i < n; ++i) a[i] = (t + i) % 2;
        act.push_back(a);
    }
    const NetworkPanel p(numbered_ids(n), gs, act);
    const auto vspec = parse_vertex_formula("intercept + presence@lag(1)");
    const auto m = fit_dnrv(p, vspec, parse_edge_formula("edges"), unpenalized());
    ASSERT_TRUE(m.psi);
    EXPECT_LT(m.psi->at("presence.lag1"), -10.0);
}

TEST(FitDnrv, BlocksAreSeparable)
{
    DnrvGenerator g;
    g.n = 25;
    g.length = 30;
    g.vspec = parse_vertex_formula("intercept + presence@lag(1)");
    g.psi = {-1.0, 2.0};
    g.espec = parse_edge_formula("edges + lag(1)");
    g.theta = {-2.0, 2.0};
    g.seed = 17;
    const auto p = generate_dnrv(g);
    const auto joint = fit_dnrv(p, g.vspec, g.espec, unpenalized());
    // each block equals a fit of its own design alone
    const auto psi = fit_block(stacked_vertex_block(p, g.vspec), unpenalized());
    const auto theta = fit_block(conditional_edge_block(p, g.espec), unpenalized());
    EXPECT_EQ(joint.psi->values, psi.values);
    EXPECT_EQ(joint.theta.values, theta.values);
    EXPECT_NEAR(joint.psi->at("presence.lag1"), 2.0, 0.6);
    EXPECT_NEAR(joint.theta.at("lag1"), 2.0, 0.6);
}

TEST(FitDnrv, EdgeBlockUsesActiveDyadsOnly)
{
    Graph g(3, false);
    g.set_edge(0, 1, true);
    const NetworkPanel p(numbered_ids(3), {g, g, g}, {{1, 1, 0}, {1, 1, 0}, {1, 1, 1}});
    const auto b = conditional_edge_block(p, parse_edge_formula("edges + lag(1)"));
    // anchor 2: only (0,1); anchor 3: all three dyads
    EXPECT_EQ(b.rows(), 4u);
}
