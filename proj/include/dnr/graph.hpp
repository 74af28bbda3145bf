#ifndef DNR_GRAPH_HPP
#define DNR_GRAPH_HPP

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"

namespace dnr {

/// Ordered vertex pair. For undirected graphs enumeration yields i < j only.
struct Dyad {
    std::size_t i = 0;
    std::size_t j = 0;

    friend bool operator==(const Dyad&, const Dyad&) = default;
};

/// Number of off-diagonal dyads a graph of order n enumerates.
constexpr std::size_t dyad_count(std::size_t n, bool directed) noexcept
{
    if (n < 2) return 0;
    return directed ? n * (n - 1) : n * (n - 1) / 2;
}

/// Row-major dyad enumeration: (0,1), (0,2), ..., skipping the diagonal and,
/// for undirected graphs, every j <= i.
inline std::vector<Dyad> enumerate_dyads(std::size_t n, bool directed)
{
    std::vector<Dyad> out;
    out.reserve(dyad_count(n, directed));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = directed ? 0 : i + 1; j < n; ++j) {
            if (i != j) out.push_back({i, j});
        }
    }
    return out;
}

/// Binary adjacency matrix with a structurally zero diagonal.
class Graph {
public:
    Graph() = default;

    Graph(std::size_t n, bool directed) : n_(n), directed_(directed), adj_(n * n, 0) {}

    std::size_t order() const noexcept { return n_; }
    bool directed() const noexcept { return directed_; }

    bool edge(std::size_t i, std::size_t j) const { return adj_[i * n_ + j] != 0; }

    /// Sets y_ij (and y_ji when undirected). Loops are rejected.
    void set_edge(std::size_t i, std::size_t j, bool on)
    {
        if (i >= n_ || j >= n_) throw ValidationError("edge endpoint out of range");
        if (i == j) {
            if (on) throw ValidationError("self-loop at vertex " + std::to_string(i));
            return;
        }
        adj_[i * n_ + j] = on ? 1 : 0;
        if (!directed_) adj_[j * n_ + i] = on ? 1 : 0;
    }

    void toggle(std::size_t i, std::size_t j) { set_edge(i, j, !edge(i, j)); }

    /// Edge count; undirected edges are counted once.
    std::size_t edge_count() const noexcept
    {
        std::size_t c = 0;
        for (auto v : adj_) c += v;
        return directed_ ? c : c / 2;
    }

    std::size_t dyads() const noexcept { return dyad_count(n_, directed_); }

    /// Out-degree (directed) or degree (undirected).
    std::size_t out_degree(std::size_t i) const noexcept
    {
        std::size_t d = 0;
        for (std::size_t j = 0; j < n_; ++j) d += adj_[i * n_ + j];
        return d;
    }

    std::size_t in_degree(std::size_t j) const noexcept
    {
        std::size_t d = 0;
        for (std::size_t i = 0; i < n_; ++i) d += adj_[i * n_ + j];
        return d;
    }

    /// Undirected copy with y_ij = y_ij OR y_ji.
    Graph symmetrized() const
    {
        Graph g(n_, false);
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = i + 1; j < n_; ++j)
                if (edge(i, j) || edge(j, i)) g.set_edge(i, j, true);
        return g;
    }

    /// True when row i and column i are all zero.
    bool isolated(std::size_t i) const noexcept
    {
        for (std::size_t j = 0; j < n_; ++j)
            if (adj_[i * n_ + j] || adj_[j * n_ + i]) return false;
        return true;
    }

    const std::vector<std::uint8_t>& data() const noexcept { return adj_; }

    friend bool operator==(const Graph&, const Graph&) = default;

private:
    std::size_t n_ = 0;
    bool directed_ = false;
    std::vector<std::uint8_t> adj_;
};

}  // namespace dnr

#endif  // DNR_GRAPH_HPP
