// Independent reference implementations used by the unit and acceptance tests.
// Everything here is computed from definitions (full recounts, brute-force
// enumeration, plain Newton iterations) and never calls the code under test
// beyond the basic Graph container.
#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "dnr/graph.hpp"
#include "dnr/terms.hpp"

namespace oracle {

using dnr::Graph;

inline Graph random_graph(std::size_t n, bool directed, double p, std::mt19937_64& rng)
{
    std::bernoulli_distribution coin(p);
    Graph g(n, directed);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = directed ? 0 : i + 1; j < n; ++j)
            if (i != j && coin(rng)) g.set_edge(i, j, true);
    return g;
}

/// Graph number `code` among all 2^(n(n-1)/2) undirected graphs on n vertices.
inline Graph undirected_from_code(std::size_t n, std::uint64_t code)
{
    Graph g(n, false);
    std::size_t bit = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j, ++bit)
            if (code >> bit & 1u) g.set_edge(i, j, true);
    return g;
}

/// Closed triads: unordered vertex triples that are all connected
/// (undirected), or transitive triples (a->b, b->c, a->c) over ordered
/// distinct triples (directed).
inline double triangle_count(const Graph& g)
{
    const std::size_t n = g.order();
    double c = 0;
    if (!g.directed()) {
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = a + 1; b < n; ++b)
                for (std::size_t d = b + 1; d < n; ++d)
                    if (g.edge(a, b) && g.edge(b, d) && g.edge(a, d)) c += 1;
        return c;
    }
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
            for (std::size_t d = 0; d < n; ++d)
                if (a != b && b != d && a != d && g.edge(a, b) && g.edge(b, d) && g.edge(a, d)) c += 1;
    return c;
}

/// Two-paths: centre b with two distinct neighbours (undirected, unordered
/// ends), or directed a->b->c with a != c.
inline double twopath_count(const Graph& g)
{
    const std::size_t n = g.order();
    double c = 0;
    for (std::size_t b = 0; b < n; ++b)
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t d = 0; d < n; ++d) {
                if (a == b || b == d || a == d) continue;
                if (!g.directed()) {
                    if (a < d && g.edge(a, b) && g.edge(b, d)) c += 1;
                } else if (g.edge(a, b) && g.edge(b, d)) {
                    c += 1;
                }
            }
    return c;
}

/// Brute-force dyadic covariate value of a lagged statistic that enters as a
/// weight on the current edge (sum over current edges of c_ij).
inline double dyadic_value(dnr::EdgeStat s, const Graph& lagged, std::size_t i, std::size_t j)
{
    const std::size_t n = lagged.order();
    double v = 0;
    switch (s) {
        case dnr::EdgeStat::Inertia: return lagged.edge(i, j) ? 1 : 0;
        case dnr::EdgeStat::Reciprocity: return lagged.edge(j, i) ? 1 : 0;
        case dnr::EdgeStat::SharedPartner:
            for (std::size_t k = 0; k < n; ++k)
                if (k != i && k != j && lagged.edge(i, k) && lagged.edge(k, j)) v += 1;
            return v;
        case dnr::EdgeStat::Popularity:
            if (lagged.directed()) {
                for (std::size_t k = 0; k < n; ++k) v += lagged.edge(k, j) ? 1 : 0;
                return v;
            }
            for (std::size_t k = 0; k < n; ++k) v += (lagged.edge(i, k) ? 1 : 0) + (lagged.edge(j, k) ? 1 : 0);
            return v;
        default: return 0;
    }
}

/// s(current) = sum over edges of current of c_ij.
inline double weighted_edge_sum(dnr::EdgeStat s, const Graph& lagged, const Graph& current)
{
    double t = 0;
    for (const auto& [i, j] : dnr::enumerate_dyads(current.order(), current.directed()))
        if (current.edge(i, j)) t += dyadic_value(s, lagged, i, j);
    return t;
}

/// Change statistic by toggling: s(y with ij on) - s(y with ij off).
/// Lagged structural statistics toggle in the lagged graph; dyadic ones in the current graph.
inline double toggle_change(dnr::EdgeStat s, Graph lagged, Graph current, std::size_t i, std::size_t j)
{
    if (s == dnr::EdgeStat::Triangle || s == dnr::EdgeStat::TwoPath) {
        auto f = s == dnr::EdgeStat::Triangle ? triangle_count : twopath_count;
        lagged.set_edge(i, j, true);
        const double on = f(lagged);
        lagged.set_edge(i, j, false);
        return on - f(lagged);
    }
    current.set_edge(i, j, true);
    const double on = weighted_edge_sum(s, lagged, current);
    current.set_edge(i, j, false);
    return on - weighted_edge_sum(s, lagged, current);
}

struct Triad {
    double triangles = 0, transitivity = 0, mean_degree = 0;
};

/// Exhaustive triple enumeration on the undirected reading of g.
inline Triad enumerate_triads(const Graph& g)
{
    const std::size_t n = g.order();
    auto adj = [&](std::size_t a, std::size_t b) { return g.edge(a, b) || g.edge(b, a); };
    Triad t;
    double connected = 0, closed = 0;  // connected triples counted per centre
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b)
            for (std::size_t c = b + 1; c < n; ++c) {
                const int e = int(adj(a, b)) + int(adj(b, c)) + int(adj(a, c));
                if (e == 3) {
                    t.triangles += 1;
                    connected += 3;
                    closed += 3;
                } else if (e == 2) {
                    connected += 1;
                }
            }
    t.transitivity = connected > 0 ? closed / connected : 0.0;
    double deg = 0;
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
            if (a != b && g.edge(a, b)) deg += 1;
    // each undirected edge appears twice in the adjacency, each arc once
    t.mean_degree = n ? deg / double(n) : 0.0;
    return t;
}

/// Unpenalized logistic MLE by plain Newton-Raphson on the uncompressed rows.
inline std::vector<double> irls(const std::vector<std::vector<double>>& X, const std::vector<double>& y,
                                int max_iter = 200)
{
    const auto n = static_cast<Eigen::Index>(X.size());
    const auto p = static_cast<Eigen::Index>(X.front().size());
    Eigen::MatrixXd A(n, p);
    for (Eigen::Index r = 0; r < n; ++r)
        for (Eigen::Index c = 0; c < p; ++c) A(r, c) = X[std::size_t(r)][std::size_t(c)];
    Eigen::VectorXd Y(n);
    for (Eigen::Index r = 0; r < n; ++r) Y(r) = y[std::size_t(r)];
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
    for (int it = 0; it < max_iter; ++it) {
        Eigen::VectorXd eta = A * beta;
        Eigen::VectorXd mu = eta.unaryExpr([](double e) { return 1.0 / (1.0 + std::exp(-e)); });
        Eigen::VectorXd w = mu.array() * (1.0 - mu.array());
        Eigen::MatrixXd H = A.transpose() * w.asDiagonal() * A;
        Eigen::VectorXd step = H.llt().solve(A.transpose() * (Y - mu));
        beta += step;
        if (step.cwiseAbs().maxCoeff() < 1e-13) break;
    }
    return {beta.data(), beta.data() + p};
}

}  // namespace oracle
