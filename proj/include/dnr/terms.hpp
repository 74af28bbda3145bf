#ifndef DNR_TERMS_HPP
#define DNR_TERMS_HPP

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "centrality.hpp"
#include "error.hpp"
#include "panel.hpp"

namespace dnr {

// ---------------------------------------------------------------------------
// Edge model terms
//
// Every term has a change statistic that is a function of the lag window and
// the anchor-time covariates only; none depends on the graph being predicted.
//
//   edges          1
//   lag(j)         y_{t-j, ij}                       (inertia)
//   triangle@j     change in the triangle count of Y_{t-j} when ij is toggled;
//                  directed graphs count transitive triples a->b->c, a->c
//   twopath@j      change in the two-path count of Y_{t-j} when ij is toggled
//   sharedpartner@j  number of k with i-k-j in Y_{t-j} (i->k->j when directed)
//   popularity@j   deg_i + deg_j of Y_{t-j} (undirected) or in-degree of j
//   reciprocity@j  y_{t-j, ji}; directed panels only
//   edgecov(x)     X_t[i][j] for covariate x
//   group(a)       one indicator per (level_i, level_j) pattern of attribute a;
//                  unordered pairs for undirected panels
// ---------------------------------------------------------------------------

enum class EdgeStat { Edges, Inertia, Triangle, TwoPath, SharedPartner, Popularity, Reciprocity, EdgeCov, Group };

inline const char* edge_stat_name(EdgeStat s)
{
    switch (s) {
        case EdgeStat::Edges: return "edges";
        case EdgeStat::Inertia: return "lag";
        case EdgeStat::Triangle: return "triangle";
        case EdgeStat::TwoPath: return "twopath";
        case EdgeStat::SharedPartner: return "sharedpartner";
        case EdgeStat::Popularity: return "popularity";
        case EdgeStat::Reciprocity: return "reciprocity";
        case EdgeStat::EdgeCov: return "edgecov";
        case EdgeStat::Group: return "group";
    }
    return "?";
}

/// Terms that enter through the lag matrix.
inline bool is_lagged_network_stat(EdgeStat s)
{
    return s == EdgeStat::Triangle || s == EdgeStat::TwoPath || s == EdgeStat::SharedPartner ||
           s == EdgeStat::Popularity || s == EdgeStat::Reciprocity;
}

struct EdgeTerm {
    EdgeStat stat = EdgeStat::Edges;
    std::size_t lag = 0;  // 0 for terms without a lag
    std::string name;     // attribute or covariate name

    friend bool operator==(const EdgeTerm&, const EdgeTerm&) = default;
};

/// Declarative edge model: fixed effects, group terms, lagged statistics
/// (lag matrix) and lagged networks (lag vector), in declaration order.
struct ModelSpec {
    std::size_t max_lag = 1;
    std::vector<EdgeTerm> terms;

    void validate() const
    {
        if (max_lag < 1) throw SpecError("max lag must be at least 1");
        if (terms.empty()) throw SpecError("model has no active terms");
        for (const auto& t : terms) {
            const bool lagged = t.stat == EdgeStat::Inertia || is_lagged_network_stat(t.stat);
            if (lagged && (t.lag < 1 || t.lag > max_lag))
                throw SpecError(std::string(edge_stat_name(t.stat)) + " at lag " + std::to_string(t.lag) +
                                " is outside 1.." + std::to_string(max_lag));
            if (!lagged && t.lag != 0)
                throw SpecError(std::string(edge_stat_name(t.stat)) + " does not take a lag");
            if ((t.stat == EdgeStat::EdgeCov || t.stat == EdgeStat::Group) && t.name.empty())
                throw SpecError(std::string(edge_stat_name(t.stat)) + " needs a name");
        }
    }

    /// Distinct lagged network statistics, in first-appearance order (the q columns of M).
    std::vector<EdgeStat> stat_terms() const
    {
        std::vector<EdgeStat> out;
        for (const auto& t : terms)
            if (is_lagged_network_stat(t.stat) && std::find(out.begin(), out.end(), t.stat) == out.end())
                out.push_back(t.stat);
        return out;
    }

    /// Binary max_lag x q matrix: entry (j-1, s) set when stat s enters at lag j.
    std::vector<std::vector<std::uint8_t>> lag_matrix() const
    {
        auto stats = stat_terms();
        std::vector<std::vector<std::uint8_t>> m(max_lag, std::vector<std::uint8_t>(stats.size(), 0));
        for (const auto& t : terms) {
            if (!is_lagged_network_stat(t.stat)) continue;
            auto s = std::find(stats.begin(), stats.end(), t.stat) - stats.begin();
            m[t.lag - 1][static_cast<std::size_t>(s)] = 1;
        }
        return m;
    }

    /// Binary length-max_lag vector: entry j-1 set when Y_{t-j} enters as inertia.
    std::vector<std::uint8_t> lag_vector() const
    {
        std::vector<std::uint8_t> v(max_lag, 0);
        for (const auto& t : terms)
            if (t.stat == EdgeStat::Inertia) v[t.lag - 1] = 1;
        return v;
    }

    /// Builds a spec from explicit lag selections. `fixed` holds edges /
    /// edgecov / group terms; `stats` names the q lagged statistics.
    static ModelSpec from_lag_selection(std::size_t max_lag, std::vector<EdgeTerm> fixed,
                                        const std::vector<EdgeStat>& stats,
                                        const std::vector<std::vector<std::uint8_t>>& lag_matrix,
                                        const std::vector<std::uint8_t>& lag_vector)
    {
        if (lag_matrix.size() != max_lag)
            throw SpecError("lag matrix has " + std::to_string(lag_matrix.size()) + " rows, expected " +
                            std::to_string(max_lag));
        for (const auto& row : lag_matrix)
            if (row.size() != stats.size())
                throw SpecError("lag matrix has " + std::to_string(row.size()) + " columns, expected " +
                                std::to_string(stats.size()));
        if (lag_vector.size() != max_lag)
            throw SpecError("lag vector has length " + std::to_string(lag_vector.size()) + ", expected " +
                            std::to_string(max_lag));
        ModelSpec spec{max_lag, std::move(fixed)};
        for (std::size_t s = 0; s < stats.size(); ++s) {
            if (!is_lagged_network_stat(stats[s])) throw SpecError("lag matrix column is not a network statistic");
            for (std::size_t j = 0; j < max_lag; ++j)
                if (lag_matrix[j][s]) spec.terms.push_back({stats[s], j + 1, {}});
        }
        for (std::size_t j = 0; j < max_lag; ++j)
            if (lag_vector[j]) spec.terms.push_back({EdgeStat::Inertia, j + 1, {}});
        spec.validate();
        return spec;
    }

    friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

/// One design-matrix column of an edge model after resolving group levels.
struct EdgeColumn {
    EdgeTerm term;
    std::string level_i;
    std::string level_j;
    std::string label;
    bool fixed = false;  // unpenalized and unstandardized
};

inline std::string edge_term_label(const EdgeTerm& t)
{
    switch (t.stat) {
        case EdgeStat::Edges: return "edges";
        case EdgeStat::Inertia: return "lag" + std::to_string(t.lag);
        case EdgeStat::EdgeCov: return "edgecov." + t.name;
        case EdgeStat::Group: return "group." + t.name;
        default: return std::string(edge_stat_name(t.stat)) + ".lag" + std::to_string(t.lag);
    }
}

/// Column list for `spec` on `panel`. Group terms expand into one column per
/// level pattern, levels sorted lexicographically.
inline std::vector<EdgeColumn> resolve_columns(const ModelSpec& spec, const NetworkPanel& panel)
{
    spec.validate();
    std::vector<EdgeColumn> cols;
    for (const auto& t : spec.terms) {
        if (t.stat == EdgeStat::Reciprocity && !panel.directed())
            throw SpecError("reciprocity is only defined for directed panels");
        if (t.stat == EdgeStat::EdgeCov && !panel.has_edge_covariate(t.name))
            throw SpecError("unknown edge covariate '" + t.name + "'");
        if (t.stat == EdgeStat::Group) {
            auto levels = panel.attribute_levels(t.name);
            for (std::size_t a = 0; a < levels.size(); ++a)
                for (std::size_t b = panel.directed() ? 0 : a; b < levels.size(); ++b)
                    cols.push_back({t, levels[a], levels[b], "group." + t.name + "." + levels[a] + "." + levels[b], true});
            continue;
        }
        cols.push_back({t, {}, {}, edge_term_label(t), t.stat == EdgeStat::Edges});
    }
    for (std::size_t a = 0; a < cols.size(); ++a)
        for (std::size_t b = a + 1; b < cols.size(); ++b)
            if (cols[a].label == cols[b].label) throw SpecError("term '" + cols[a].label + "' appears twice");
    return cols;
}

inline std::vector<std::string> labels_of(const std::vector<EdgeColumn>& cols)
{
    std::vector<std::string> out;
    for (const auto& c : cols) out.push_back(c.label);
    return out;
}

/// Change statistic of one column for dyad (i, j) given the lag window.
/// `covariates` supplies X_t (the anchor time) for edgecov and group terms and
/// the activity masks; lagged statistics of dyads touching a vertex that was
/// absent at that lag are 0.
inline double change_stat(const EdgeColumn& col, const Window& w, Dyad d, const NetworkPanel& covariates)
{
    const auto [i, j] = d;
    if (i == j) throw SpecError("change statistic requested for a diagonal dyad");
    const auto& t = col.term;
    switch (t.stat) {
        case EdgeStat::Edges: return 1.0;
        case EdgeStat::Inertia: return w.at_lag(t.lag).edge(i, j) ? 1.0 : 0.0;
        case EdgeStat::EdgeCov: return covariates.edge_covariate(t.name, w.anchor)(i, j);
        case EdgeStat::Group: {
            const auto& attr = covariates.attribute(t.name);
            const auto& a = attr[i];
            const auto& b = attr[j];
            if (covariates.directed()) return (a == col.level_i && b == col.level_j) ? 1.0 : 0.0;
            return ((a == col.level_i && b == col.level_j) || (a == col.level_j && b == col.level_i)) ? 1.0 : 0.0;
        }
        default: break;
    }
    const Graph& g = w.at_lag(t.lag);
    const std::size_t n = g.order();
    if (!covariates.active(w.anchor - t.lag, i) || !covariates.active(w.anchor - t.lag, j)) return 0.0;
    double v = 0.0;
    switch (t.stat) {
        case EdgeStat::Triangle:
            if (!g.directed()) {
                for (std::size_t k = 0; k < n; ++k)
                    if (k != i && k != j && g.edge(i, k) && g.edge(j, k)) v += 1;
            } else {
                for (std::size_t k = 0; k < n; ++k) {
                    if (k == i || k == j) continue;
                    if (g.edge(i, k) && g.edge(k, j)) v += 1;  // i->j closes i->k->j
                    if (g.edge(j, k) && g.edge(i, k)) v += 1;  // i->j->k with shortcut i->k
                    if (g.edge(k, i) && g.edge(k, j)) v += 1;  // k->i->j with shortcut k->j
                }
            }
            return v;
        case EdgeStat::TwoPath:
            if (!g.directed()) {
                for (std::size_t k = 0; k < n; ++k) {
                    if (k == i || k == j) continue;
                    if (g.edge(i, k)) v += 1;
                    if (g.edge(j, k)) v += 1;
                }
            } else {
                for (std::size_t k = 0; k < n; ++k) {
                    if (k == i || k == j) continue;
                    if (g.edge(k, i)) v += 1;  // k->i->j
                    if (g.edge(j, k)) v += 1;  // i->j->k
                }
            }
            return v;
        case EdgeStat::SharedPartner:
            for (std::size_t k = 0; k < n; ++k)
                if (k != i && k != j && g.edge(i, k) && g.edge(k, j)) v += 1;
            return v;
        case EdgeStat::Popularity:
            if (!g.directed()) return static_cast<double>(g.out_degree(i) + g.out_degree(j));
            return static_cast<double>(g.in_degree(j));
        case EdgeStat::Reciprocity: return g.edge(j, i) ? 1.0 : 0.0;
        default: break;
    }
    throw SpecError("unhandled edge term");
}

// ---------------------------------------------------------------------------
// Vertex model terms
//
//   intercept              1
//   presence@j             1 if the vertex was active at t-j
//   degree@j, eigen@j, closeness@j, betweenness@j, cycles@j
//                          statistic of the vertex in G_{t-j}; 0 if absent.
//                          cycles is the triangle participation count.
//   attr(a)                numeric static attribute
//   attrpresence(a)@j      attr(a) * presence@j
//   timecov(x)             time-varying vertex covariate at the anchor
// ---------------------------------------------------------------------------

enum class VertexStat { Intercept, Presence, Degree, Eigenvector, Closeness, Betweenness, Cycles, Attr, AttrPresence, TimeCov };

inline const char* vertex_stat_name(VertexStat s)
{
    switch (s) {
        case VertexStat::Intercept: return "intercept";
        case VertexStat::Presence: return "presence";
        case VertexStat::Degree: return "degree";
        case VertexStat::Eigenvector: return "eigen";
        case VertexStat::Closeness: return "closeness";
        case VertexStat::Betweenness: return "betweenness";
        case VertexStat::Cycles: return "cycles";
        case VertexStat::Attr: return "attr";
        case VertexStat::AttrPresence: return "attrpresence";
        case VertexStat::TimeCov: return "timecov";
    }
    return "?";
}

inline bool vertex_stat_lagged(VertexStat s)
{
    return s != VertexStat::Intercept && s != VertexStat::Attr && s != VertexStat::TimeCov;
}

struct VertexTerm {
    VertexStat stat = VertexStat::Intercept;
    std::size_t lag = 0;
    std::string name;

    friend bool operator==(const VertexTerm&, const VertexTerm&) = default;
};

struct VertexSpec {
    std::size_t max_lag = 1;
    std::vector<VertexTerm> terms;

    void validate() const
    {
        if (max_lag < 1) throw SpecError("max lag must be at least 1");
        if (terms.empty()) throw SpecError("vertex model has no terms");
        for (const auto& t : terms) {
            if (vertex_stat_lagged(t.stat) && (t.lag < 1 || t.lag > max_lag))
                throw SpecError(std::string(vertex_stat_name(t.stat)) + " at lag " + std::to_string(t.lag) +
                                " is outside 1.." + std::to_string(max_lag));
            if (!vertex_stat_lagged(t.stat) && t.lag != 0)
                throw SpecError(std::string(vertex_stat_name(t.stat)) + " does not take a lag");
            const bool named = t.stat == VertexStat::Attr || t.stat == VertexStat::AttrPresence ||
                               t.stat == VertexStat::TimeCov;
            if (named && t.name.empty()) throw SpecError(std::string(vertex_stat_name(t.stat)) + " needs a name");
        }
    }

    friend bool operator==(const VertexSpec&, const VertexSpec&) = default;
};

inline std::string vertex_term_label(const VertexTerm& t)
{
    switch (t.stat) {
        case VertexStat::Intercept: return "intercept";
        case VertexStat::Attr: return "attr." + t.name;
        case VertexStat::TimeCov: return "timecov." + t.name;
        case VertexStat::AttrPresence: return "attrpresence." + t.name + ".lag" + std::to_string(t.lag);
        default: return std::string(vertex_stat_name(t.stat)) + ".lag" + std::to_string(t.lag);
    }
}

inline std::vector<std::string> vertex_labels(const VertexSpec& spec)
{
    spec.validate();
    std::vector<std::string> out;
    for (const auto& t : spec.terms) out.push_back(vertex_term_label(t));
    for (std::size_t a = 0; a < out.size(); ++a)
        for (std::size_t b = a + 1; b < out.size(); ++b)
            if (out[a] == out[b]) throw SpecError("term '" + out[a] + "' appears twice");
    return out;
}

inline double numeric_attribute(const NetworkPanel& panel, const std::string& name, std::size_t i)
{
    const auto& s = panel.attribute(name)[i];
    double v = 0.0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size())
        throw SpecError("attribute '" + name + "' value '" + s + "' is not numeric");
    return v;
}

/// Whole-graph vector of a lagged structural vertex statistic.
inline std::vector<double> structural_vertex_stat(VertexStat s, const Graph& g)
{
    switch (s) {
        case VertexStat::Degree: return centrality::degree(g);
        case VertexStat::Eigenvector: return centrality::eigenvector(g);
        case VertexStat::Closeness: return centrality::closeness(g);
        case VertexStat::Betweenness: return centrality::betweenness(g);
        case VertexStat::Cycles: return centrality::triangle_participation(g);
        default: throw SpecError("not a structural vertex statistic");
    }
}

}  // namespace dnr

#endif  // DNR_TERMS_HPP
