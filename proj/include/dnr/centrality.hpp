#ifndef DNR_CENTRALITY_HPP
#define DNR_CENTRALITY_HPP

#include <cmath>
#include <cstddef>
#include <deque>
#include <vector>

#include "graph.hpp"

// Per-vertex statistics used by the vertex model. Directed graphs are
// symmetrized first; every function is total on empty and disconnected graphs.

namespace dnr::centrality {

namespace detail {

inline std::vector<std::vector<std::size_t>> neighbours(const Graph& g)
{
    const std::size_t n = g.order();
    std::vector<std::vector<std::size_t>> adj(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j && (g.edge(i, j) || g.edge(j, i))) adj[i].push_back(j);
    return adj;
}

}  // namespace detail

inline std::vector<double> degree(const Graph& g)
{
    auto adj = detail::neighbours(g);
    std::vector<double> out(adj.size());
    for (std::size_t i = 0; i < adj.size(); ++i) out[i] = static_cast<double>(adj[i].size());
    return out;
}

/// Leading eigenvector of the adjacency matrix, unit L2 norm, non-negative.
///
/// Power iteration runs on A + I, which has the same eigenvectors as A but a
/// strictly dominant Perron root even for bipartite graphs. Stops when the
/// max-abs change drops below `tol` or after `max_iter` rounds. Empty graphs
/// return all zeros.
inline std::vector<double> eigenvector(const Graph& g, std::size_t max_iter = 1000, double tol = 1e-10)
{
    const std::size_t n = g.order();
    auto adj = detail::neighbours(g);
    std::vector<double> x(n, 0.0);
    bool any = false;
    for (std::size_t i = 0; i < n; ++i) {
        if (!adj[i].empty()) {
            x[i] = 1.0;
            any = true;
        }
    }
    if (!any) return x;
    std::vector<double> next(n);
    for (std::size_t it = 0; it < max_iter; ++it) {
        double norm = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double s = x[i];
            for (auto j : adj[i]) s += x[j];
            next[i] = s;
            norm += s * s;
        }
        norm = std::sqrt(norm);
        double change = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            next[i] /= norm;
            change = std::max(change, std::abs(next[i] - x[i]));
        }
        x.swap(next);
        if (change < tol) break;
    }
    // isolated vertices carry weight from the +I shift only; they are not central
    for (std::size_t i = 0; i < n; ++i)
        if (adj[i].empty()) x[i] = 0.0;
    double norm = 0.0;
    for (double v : x) norm += v * v;
    norm = std::sqrt(norm);
    if (norm > 0)
        for (double& v : x) v /= norm;
    return x;
}

/// Unweighted BFS distances from `source`; unreachable vertices get -1.
inline std::vector<long> bfs_distances(const std::vector<std::vector<std::size_t>>& adj, std::size_t source)
{
    std::vector<long> dist(adj.size(), -1);
    std::deque<std::size_t> queue{source};
    dist[source] = 0;
    while (!queue.empty()) {
        auto u = queue.front();
        queue.pop_front();
        for (auto v : adj[u]) {
            if (dist[v] < 0) {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    return dist;
}

/// Harmonic closeness: sum of 1/d(u,v) over v != u, divided by n - 1.
/// Unreachable pairs contribute 0, so disconnected graphs are handled.
inline std::vector<double> closeness(const Graph& g)
{
    const std::size_t n = g.order();
    std::vector<double> out(n, 0.0);
    if (n < 2) return out;
    auto adj = detail::neighbours(g);
    for (std::size_t u = 0; u < n; ++u) {
        auto dist = bfs_distances(adj, u);
        double s = 0.0;
        for (std::size_t v = 0; v < n; ++v)
            if (v != u && dist[v] > 0) s += 1.0 / static_cast<double>(dist[v]);
        out[u] = s / static_cast<double>(n - 1);
    }
    return out;
}

/// Brandes betweenness on the undirected graph; each unordered pair counted once.
inline std::vector<double> betweenness(const Graph& g)
{
    const std::size_t n = g.order();
    auto adj = detail::neighbours(g);
    std::vector<double> cb(n, 0.0);
    std::vector<std::size_t> stack;
    std::vector<std::vector<std::size_t>> pred(n);
    std::vector<double> sigma(n), delta(n);
    std::vector<long> dist(n);
    for (std::size_t s = 0; s < n; ++s) {
        stack.clear();
        for (std::size_t v = 0; v < n; ++v) {
            pred[v].clear();
            sigma[v] = 0.0;
            delta[v] = 0.0;
            dist[v] = -1;
        }
        sigma[s] = 1.0;
        dist[s] = 0;
        std::deque<std::size_t> queue{s};
        while (!queue.empty()) {
            auto v = queue.front();
            queue.pop_front();
            stack.push_back(v);
            for (auto w : adj[v]) {
                if (dist[w] < 0) {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
                if (dist[w] == dist[v] + 1) {
                    sigma[w] += sigma[v];
                    pred[w].push_back(v);
                }
            }
        }
        while (!stack.empty()) {
            auto w = stack.back();
            stack.pop_back();
            for (auto v : pred[w]) delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
            if (w != s) cb[w] += delta[w];
        }
    }
    for (double& v : cb) v /= 2.0;
    return cb;
}

/// Number of triangles each vertex participates in.
inline std::vector<double> triangle_participation(const Graph& g)
{
    const std::size_t n = g.order();
    const Graph u = g.directed() ? g.symmetrized() : g;
    std::vector<double> out(n, 0.0);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b) {
            if (!u.edge(a, b)) continue;
            for (std::size_t c = b + 1; c < n; ++c) {
                if (u.edge(a, c) && u.edge(b, c)) {
                    out[a] += 1;
                    out[b] += 1;
                    out[c] += 1;
                }
            }
        }
    return out;
}

}  // namespace dnr::centrality

#endif  // DNR_CENTRALITY_HPP
