#include <gtest/gtest.h>

#include <cmath>

#include "dnr/config.hpp"
#include "dnr/estimator.hpp"
#include "dnr/simulate.hpp"
#include "dnr/synthetic.hpp"

using namespace dnr;

namespace {

NetworkPanel seed_panel(std::uint64_t seed, std::size_t n = 15, std::size_t T = 20)
{
    DnrGenerator g;
    g.n = n;
    g.length = T;
    g.spec = parse_edge_formula("edges + lag(1)");
    g.theta = {-2.0, 2.5};
    g.seed = seed;
    return generate_dnr(g);
}

FittedModel known(const std::string& formula, const std::vector<std::string>& labels, const std::vector<double>& theta)
{
    FittedModel m;
    m.edge_spec = parse_edge_formula(formula);
    m.theta = detail::known_block(labels, theta);
    return m;
}

FittedModel known_dnrv(double psi0, const std::vector<double>& theta)
{
    auto m = known("edges + lag(1)", {"edges", "lag1"}, theta);
    m.vertex_spec = parse_vertex_formula("intercept + presence@lag(1)");
    m.psi = detail::known_block({"intercept", "presence.lag1"}, {psi0, 0.0});
    return m;
}

}  // namespace

TEST(StepProbabilities, ZeroThetaIsHalf)
{
    const auto b = detail::known_block({"edges", "lag1"}, {0.0, 0.0});
    for (double p : step_edge_probabilities({1, 0, 1, 1, 1, 0.3}, {"edges", "lag1"}, b)) EXPECT_EQ(p, 0.5);
}

TEST(StepProbabilities, InterceptClosedForm)
{
    const auto b = detail::known_block({"edges"}, {-2.0});
    for (double p : step_edge_probabilities({1, 1, 1}, {"edges"}, b)) EXPECT_NEAR(p, 0.11920292202211755, 1e-15);
}

TEST(StepProbabilities, LabelMismatch)
{
    const auto b = detail::known_block({"edges"}, {-2.0});
    EXPECT_THROW(step_edge_probabilities({1, 1}, {"edges", "lag1"}, b), SpecError);
}

TEST(Simulate, HorizonZeroIsIdentity)
{
    const auto p = seed_panel(1);
    SimulationOptions o;
    o.horizon = 0;
    EXPECT_EQ(simulate_static(p, known("edges + lag(1)", {"edges", "lag1"}, {-2, 2.5}), o).panel, p);
}

TEST(Simulate, LengthAndProbabilityRange)
{
    const auto p = seed_panel(2);
    SimulationOptions o;
    o.horizon = 7;
    for (auto k : {SmootherKind::Mean, SmootherKind::Median, SmootherKind::Mode, SmootherKind::None}) {
        o.smoother = k;
        const auto run = simulate_static(p, known("edges + lag(1) + triangle@lag(1)", {"edges", "lag1", "triangle.lag1"}, {-2, 2.5, 0.1}), o);
        EXPECT_EQ(run.panel.length(), p.length() + 7);
        ASSERT_EQ(run.edge_probabilities.size(), 7u);
        for (const auto& step : run.edge_probabilities)
            for (double q : step) EXPECT_TRUE(q >= 0.0 && q <= 1.0);
    }
}

TEST(Simulate, SameSeedSameResult)
{
    const auto p = seed_panel(3);
    const auto m = known("edges + lag(1)", {"edges", "lag1"}, {-2, 2.5});
    SimulationOptions o;
    o.horizon = 10;
    o.seed = 77;
    const auto a = simulate_static(p, m, o), b = simulate_static(p, m, o);
    EXPECT_EQ(a.panel, b.panel);
    EXPECT_EQ(a.edge_probabilities, b.edge_probabilities);
    o.seed = 78;
    EXPECT_FALSE(simulate_static(p, m, o).panel == a.panel);
}

TEST(Simulate, NoneSmootherUsesNewestWindow)
{
    const auto p = seed_panel(4);
    SimulationOptions o;
    o.horizon = 1;
    o.smoother = SmootherKind::None;
    const auto run = simulate_static(p, known("edges + lag(1)", {"edges", "lag1"}, {-2, 2.5}), o);
    const auto dyads = enumerate_dyads(p.order(), false);
    const Graph& last = p.graph(p.length());
    for (std::size_t r = 0; r < dyads.size(); ++r)
        EXPECT_NEAR(run.edge_probabilities[0][r], inv_logit(-2 + 2.5 * (last.edge(dyads[r].i, dyads[r].j) ? 1 : 0)), 1e-15);
}

TEST(Simulate, MeanSmootherAveragesHistory)
{
    const auto p = seed_panel(5, 8, 6);
    SimulationOptions o;
    o.horizon = 1;
    const auto run = simulate_static(p, known("edges + lag(1)", {"edges", "lag1"}, {-1, 1}), o);
    const auto dyads = enumerate_dyads(8, false);
    for (std::size_t r = 0; r < dyads.size(); ++r) {
        double s = 0;  // windows anchored at 2..T+1 see graphs 1..T
        for (std::size_t t = 1; t <= p.length(); ++t) s += p.graph(t).edge(dyads[r].i, dyads[r].j) ? 1 : 0;
        EXPECT_NEAR(run.step_stats[0][r * 2 + 1], s / double(p.length()), 1e-12);
    }
}

TEST(Simulate, InsufficientHistory)
{
    const NetworkPanel p(numbered_ids(3), {Graph(3, false)});
    SimulationOptions o;
    o.horizon = 1;
    EXPECT_THROW(simulate_static(p, known("lag(1..2)", {"lag1", "lag2"}, {1, 1}), o), InsufficientHistory);
}

TEST(SimulateDynamic, ForcedExtinction)
{
    const auto p = seed_panel(6);
    SimulationOptions o;
    o.horizon = 10;
    const auto run = simulate_dynamic(p, known_dnrv(-30.0, {5, 5}), o);
    for (std::size_t t = p.length() + 1; t <= run.panel.length(); ++t) {
        EXPECT_EQ(run.panel.graph(t).edge_count(), 0u);
        EXPECT_EQ(run.panel.active_count(t), 0u);
    }
}

TEST(SimulateDynamic, AllActiveCouplesWithStatic)
{
    const auto p = seed_panel(7);
    SimulationOptions o;
    o.horizon = 12;
    o.seed = 5;
    o.smoother = SmootherKind::None;
    const auto dyn = simulate_dynamic(p, known_dnrv(30.0, {-2, 2.5}), o);
    const auto stat = simulate_static(p, known("edges + lag(1)", {"edges", "lag1"}, {-2, 2.5}), o);
    for (std::size_t t = p.length() + 1; t <= stat.panel.length(); ++t) {
        EXPECT_EQ(dyn.panel.graph(t), stat.panel.graph(t));
        EXPECT_EQ(dyn.panel.active_count(t), p.order());
    }
}

TEST(SimulateDynamic, InactiveRowsAreEmpty)
{
    const auto p = seed_panel(8);
    SimulationOptions o;
    o.horizon = 15;
    const auto run = simulate_dynamic(p, known_dnrv(0.0, {0.5, 1.0}), o);
    std::size_t inactive = 0;
    for (std::size_t t = p.length() + 1; t <= run.panel.length(); ++t)
        for (std::size_t i = 0; i < p.order(); ++i) {
            if (run.panel.active(t, i)) continue;
            ++inactive;
            for (std::size_t j = 0; j < p.order(); ++j) EXPECT_FALSE(run.panel.graph(t).edge(i, j));
        }
    EXPECT_GT(inactive, 0u);
    for (const auto& step : run.vertex_probabilities)
        for (double q : step) EXPECT_NEAR(q, 0.5, 1e-15);
}

TEST(SimulateDynamic, NeedsVertexModel)
{
    const auto p = seed_panel(9);
    SimulationOptions o;
    o.horizon = 1;
    EXPECT_THROW(simulate_dynamic(p, known("edges", {"edges"}, {0.0}), o), SpecError);
}

TEST(Simulate, CalibrationOfInterceptModel)
{
    const std::size_t n = 20, steps = 200;
    for (double theta0 : {-2.0, 0.0, 1.0}) {
        const NetworkPanel p(numbered_ids(n), {Graph(n, false), Graph(n, false)});
        SimulationOptions o;
        o.horizon = steps;
        o.seed = 11;
        o.keep_step_stats = false;
        const auto run = simulate_static(p, known("edges", {"edges"}, {theta0}), o);
        double edges = 0;
        for (std::size_t t = 3; t <= run.panel.length(); ++t) edges += double(run.panel.graph(t).edge_count());
        const double dyads = 190.0 * steps, q = inv_logit(theta0);
        EXPECT_LE(std::abs(edges / dyads - q), 3 * std::sqrt(q * (1 - q) / dyads)) << theta0;
    }
}
