#ifndef DNR_DESIGN_HPP
#define DNR_DESIGN_HPP

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "error.hpp"
#include "panel.hpp"
#include "terms.hpp"

namespace dnr {

/// Row-major block of change statistics: one row per dyad (edge model) or per
/// universe vertex (vertex model). `response` is empty when the anchor lies
/// beyond the observed panel.
struct DesignBlock {
    std::vector<std::size_t> anchors;  // anchor of each row
    std::vector<std::string> labels;
    std::vector<std::uint8_t> fixed;   // per column: unpenalized, unstandardized
    std::vector<Dyad> dyads;           // edge blocks
    std::vector<std::size_t> vertices; // vertex blocks
    std::vector<double> values;
    std::vector<double> response;

    std::size_t rows() const noexcept { return anchors.size(); }
    std::size_t cols() const noexcept { return labels.size(); }
    double operator()(std::size_t r, std::size_t c) const { return values[r * cols() + c]; }
    double& operator()(std::size_t r, std::size_t c) { return values[r * cols() + c]; }
    const double* row(std::size_t r) const { return values.data() + r * cols(); }

    friend bool operator==(const DesignBlock&, const DesignBlock&) = default;
};

namespace detail {

using Square = std::vector<double>;

inline Square adjacency(const Graph& g)
{
    const std::size_t n = g.order();
    Square a(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a[i * n + j] = g.edge(i, j) ? 1.0 : 0.0;
    return a;
}

// C = op(A) * op(B), op = transpose when the flag is set.
inline Square product(const Square& a, bool ta, const Square& b, bool tb, std::size_t n)
{
    Square c(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) {
            const double aik = ta ? a[k * n + i] : a[i * n + k];
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < n; ++j) c[i * n + j] += aik * (tb ? b[j * n + k] : b[k * n + j]);
        }
    return c;
}

inline Square lagged_matrix(const EdgeColumn& col, const Window& w, std::size_t n);

// Dense n x n matrix of change statistics for one column.
inline Square column_matrix(const EdgeColumn& col, const Window& w, const NetworkPanel& panel)
{
    const std::size_t n = panel.order();
    const auto& t = col.term;
    Square out(n * n, 0.0);
    switch (t.stat) {
        case EdgeStat::Edges: std::fill(out.begin(), out.end(), 1.0); return out;
        case EdgeStat::EdgeCov: return panel.edge_covariate(t.name, w.anchor).values;
        case EdgeStat::Group: {
            const auto& attr = panel.attribute(t.name);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) {
                    bool hit = attr[i] == col.level_i && attr[j] == col.level_j;
                    if (!panel.directed()) hit = hit || (attr[i] == col.level_j && attr[j] == col.level_i);
                    out[i * n + j] = hit ? 1.0 : 0.0;
                }
            return out;
        }
        default: break;
    }
    out = lagged_matrix(col, w, n);
    // dyads touching a vertex absent at t - lag are imputed as zero
    const auto& active = panel.activity(w.anchor - t.lag);
    for (std::size_t i = 0; i < n; ++i) {
        if (active[i]) continue;
        for (std::size_t j = 0; j < n; ++j) {
            out[i * n + j] = 0.0;
            out[j * n + i] = 0.0;
        }
    }
    return out;
}

inline Square lagged_matrix(const EdgeColumn& col, const Window& w, std::size_t n)
{
    const auto& t = col.term;
    Square out(n * n, 0.0);
    const Graph& g = w.at_lag(t.lag);
    const Square a = adjacency(g);
    switch (t.stat) {
        case EdgeStat::Inertia: return a;
        case EdgeStat::SharedPartner: return product(a, false, a, false, n);
        case EdgeStat::Triangle: {
            out = product(a, false, a, false, n);
            if (g.directed()) {
                auto out_out = product(a, false, a, true, n);
                auto in_in = product(a, true, a, false, n);
                for (std::size_t x = 0; x < out.size(); ++x) out[x] += out_out[x] + in_in[x];
            }
            return out;
        }
        case EdgeStat::TwoPath:
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) {
                    if (g.directed())
                        out[i * n + j] = double(g.in_degree(i)) + double(g.out_degree(j)) - 2.0 * a[j * n + i];
                    else
                        out[i * n + j] = double(g.out_degree(i)) + double(g.out_degree(j)) - 2.0 * a[i * n + j];
                }
            return out;
        case EdgeStat::Popularity:
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    out[i * n + j] = g.directed() ? double(g.in_degree(j)) : double(g.out_degree(i) + g.out_degree(j));
            return out;
        case EdgeStat::Reciprocity:
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) out[i * n + j] = a[j * n + i];
            return out;
        default: break;
    }
    throw SpecError("unhandled edge term");
}

}  // namespace detail

/// Change statistics for every dyad at `anchor` without a response. The anchor
/// may be one past the panel end (forecasting); covariates carry forward.
inline DesignBlock edge_statistics(const NetworkPanel& panel, const std::vector<EdgeColumn>& cols,
                                   std::size_t max_lag, std::size_t anchor)
{
    const Window w = window_at(panel, anchor, max_lag);
    const std::size_t n = panel.order();
    const auto dyads = enumerate_dyads(n, panel.directed());
    DesignBlock b;
    b.labels = labels_of(cols);
    for (const auto& c : cols) b.fixed.push_back(c.fixed ? 1 : 0);
    b.dyads = dyads;
    b.anchors.assign(dyads.size(), anchor);
    b.values.assign(dyads.size() * cols.size(), 0.0);
    for (std::size_t c = 0; c < cols.size(); ++c) {
        const auto m = detail::column_matrix(cols[c], w, panel);
        for (std::size_t r = 0; r < dyads.size(); ++r) b(r, c) = m[dyads[r].i * n + dyads[r].j];
    }
    return b;
}

/// Edge design at an observed anchor: statistics plus y_{anchor, ij}.
inline DesignBlock edge_design(const NetworkPanel& panel, const ModelSpec& spec, std::size_t anchor)
{
    const auto cols = resolve_columns(spec, panel);
    if (anchor > panel.length()) throw InsufficientHistory("anchor " + std::to_string(anchor) + " is past the panel end");
    DesignBlock b = edge_statistics(panel, cols, spec.max_lag, anchor);
    const Graph& y = panel.graph(anchor);
    b.response.reserve(b.rows());
    for (const auto& d : b.dyads) b.response.push_back(y.edge(d.i, d.j) ? 1.0 : 0.0);
    return b;
}

/// Vertex statistics for every universe vertex at `anchor`. Statistics of a
/// vertex absent from a lagged graph are imputed as zero.
inline DesignBlock vertex_statistics(const NetworkPanel& panel, const VertexSpec& spec, std::size_t anchor)
{
    const auto labels = vertex_labels(spec);
    const Window w = window_at(panel, anchor, spec.max_lag);
    const std::size_t n = panel.order();
    DesignBlock b;
    b.labels = labels;
    for (const auto& t : spec.terms) b.fixed.push_back(t.stat == VertexStat::Intercept ? 1 : 0);
    b.anchors.assign(n, anchor);
    for (std::size_t i = 0; i < n; ++i) b.vertices.push_back(i);
    b.values.assign(n * labels.size(), 0.0);
    for (std::size_t c = 0; c < spec.terms.size(); ++c) {
        const auto& t = spec.terms[c];
        std::vector<double> col(n, 0.0);
        switch (t.stat) {
            case VertexStat::Intercept: std::fill(col.begin(), col.end(), 1.0); break;
            case VertexStat::Presence:
                for (std::size_t i = 0; i < n; ++i) col[i] = panel.active(anchor - t.lag, i) ? 1.0 : 0.0;
                break;
            case VertexStat::Attr:
                for (std::size_t i = 0; i < n; ++i) col[i] = numeric_attribute(panel, t.name, i);
                break;
            case VertexStat::AttrPresence:
                for (std::size_t i = 0; i < n; ++i)
                    col[i] = panel.active(anchor - t.lag, i) ? numeric_attribute(panel, t.name, i) : 0.0;
                break;
            case VertexStat::TimeCov:
                for (std::size_t i = 0; i < n; ++i) col[i] = panel.vertex_covariate(t.name, anchor, i);
                break;
            default: {
                col = structural_vertex_stat(t.stat, w.at_lag(t.lag));
                for (std::size_t i = 0; i < n; ++i)
                    if (!panel.active(anchor - t.lag, i)) col[i] = 0.0;
            }
        }
        for (std::size_t i = 0; i < n; ++i) b(i, c) = col[i];
    }
    return b;
}

/// Vertex design at an observed anchor; the response is membership in V_anchor.
inline DesignBlock vertex_design(const NetworkPanel& panel, const VertexSpec& spec, std::size_t anchor)
{
    if (anchor > panel.length()) throw InsufficientHistory("anchor " + std::to_string(anchor) + " is past the panel end");
    DesignBlock b = vertex_statistics(panel, spec, anchor);
    for (std::size_t i = 0; i < panel.order(); ++i) b.response.push_back(panel.active(anchor, i) ? 1.0 : 0.0);
    return b;
}

/// Row-concatenation of blocks with identical columns, in the given order.
inline DesignBlock concatenate(const std::vector<DesignBlock>& blocks)
{
    if (blocks.empty()) throw SpecError("no design blocks to stack");
    DesignBlock out;
    out.labels = blocks.front().labels;
    out.fixed = blocks.front().fixed;
    for (const auto& b : blocks) {
        if (b.labels != out.labels) throw SpecError("design blocks have different columns");
        out.anchors.insert(out.anchors.end(), b.anchors.begin(), b.anchors.end());
        out.dyads.insert(out.dyads.end(), b.dyads.begin(), b.dyads.end());
        out.vertices.insert(out.vertices.end(), b.vertices.begin(), b.vertices.end());
        out.values.insert(out.values.end(), b.values.begin(), b.values.end());
        out.response.insert(out.response.end(), b.response.begin(), b.response.end());
    }
    return out;
}

/// Edge designs for each anchor, stacked in anchor order.
inline DesignBlock stack_designs(const NetworkPanel& panel, const ModelSpec& spec, const std::vector<std::size_t>& anchors)
{
    if (anchors.empty()) throw SpecError("empty anchor set");
    std::vector<DesignBlock> blocks;
    for (auto t : anchors) blocks.push_back(edge_design(panel, spec, t));
    return concatenate(blocks);
}

inline DesignBlock stack_vertex_designs(const NetworkPanel& panel, const VertexSpec& spec,
                                        const std::vector<std::size_t>& anchors)
{
    if (anchors.empty()) throw SpecError("empty anchor set");
    std::vector<DesignBlock> blocks;
    for (auto t : anchors) blocks.push_back(vertex_design(panel, spec, t));
    return concatenate(blocks);
}

/// Keeps rows whose `keep` flag is set.
inline DesignBlock filter_rows(const DesignBlock& b, const std::vector<std::uint8_t>& keep)
{
    if (keep.size() != b.rows()) throw ValidationError("row mask length mismatch");
    DesignBlock out;
    out.labels = b.labels;
    out.fixed = b.fixed;
    for (std::size_t r = 0; r < b.rows(); ++r) {
        if (!keep[r]) continue;
        out.anchors.push_back(b.anchors[r]);
        if (!b.dyads.empty()) out.dyads.push_back(b.dyads[r]);
        if (!b.vertices.empty()) out.vertices.push_back(b.vertices[r]);
        out.values.insert(out.values.end(), b.row(r), b.row(r) + b.cols());
        if (!b.response.empty()) out.response.push_back(b.response[r]);
    }
    return out;
}

/// Anchors k+1..T.
inline std::vector<std::size_t> all_anchors(const NetworkPanel& panel, std::size_t k)
{
    if (panel.length() <= k)
        throw InsufficientHistory("panel of length " + std::to_string(panel.length()) + " has no window of lag " +
                                  std::to_string(k));
    std::vector<std::size_t> out;
    for (std::size_t t = k + 1; t <= panel.length(); ++t) out.push_back(t);
    return out;
}

}  // namespace dnr

#endif  // DNR_DESIGN_HPP
