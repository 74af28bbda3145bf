#ifndef DNR_PANEL_HPP
#define DNR_PANEL_HPP

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "error.hpp"
#include "graph.hpp"

namespace dnr {

/// Dense N x N real matrix, row-major. Used for per-time edge covariates.
struct DyadMatrix {
    std::size_t n = 0;
    std::vector<double> values;

    DyadMatrix() = default;
    explicit DyadMatrix(std::size_t order, double fill = 0.0) : n(order), values(order * order, fill) {}

    double operator()(std::size_t i, std::size_t j) const { return values[i * n + j]; }
    double& operator()(std::size_t i, std::size_t j) { return values[i * n + j]; }

    friend bool operator==(const DyadMatrix&, const DyadMatrix&) = default;
};

/// Ordered sequence of graphs on a shared vertex universe.
///
/// Time points are indexed 1..T. Every graph is stored on the full universe;
/// a vertex that is inactive at time t has an all-zero row and column in
/// graph(t). Static vertex attributes are strings (categorical); time-varying
/// vertex covariates and edge covariates are real-valued and default to 0.
class NetworkPanel {
public:
    NetworkPanel() = default;

    /// Fixed-vertex panel: all vertices active at all times.
    NetworkPanel(std::vector<std::string> universe, std::vector<Graph> graphs)
        : NetworkPanel(std::move(universe), std::move(graphs), {})
    {
    }

    /// `activity[t][i]` is the membership of vertex i in V_{t+1}; empty means all active.
    NetworkPanel(std::vector<std::string> universe, std::vector<Graph> graphs,
                 std::vector<std::vector<std::uint8_t>> activity)
        : universe_(std::move(universe)), graphs_(std::move(graphs)), activity_(std::move(activity))
    {
        if (graphs_.empty()) throw ValidationError("panel has no time points");
        const std::size_t n = universe_.size();
        directed_ = graphs_.front().directed();
        for (std::size_t t = 0; t < graphs_.size(); ++t) {
            if (graphs_[t].order() != n)
                throw ValidationError("graph at time " + std::to_string(t + 1) + " has order " +
                                      std::to_string(graphs_[t].order()) + ", universe has " +
                                      std::to_string(n));
            if (graphs_[t].directed() != directed_)
                throw ValidationError("graph at time " + std::to_string(t + 1) +
                                      " differs in directedness");
        }
        if (activity_.empty()) {
            activity_.assign(graphs_.size(), std::vector<std::uint8_t>(n, 1));
        } else {
            dynamic_ = true;
            if (activity_.size() != graphs_.size())
                throw ValidationError("activity rows do not match the number of time points");
            for (auto& row : activity_) {
                if (row.size() != n) throw ValidationError("activity row has wrong length");
                for (auto& a : row) a = a ? 1 : 0;
            }
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (!index_.emplace(universe_[i], i).second)
                throw ValidationError("duplicate vertex id '" + universe_[i] + "'");
        }
        for (std::size_t t = 0; t < graphs_.size(); ++t) labels_.push_back(std::to_string(t + 1));
        validate();
    }

    std::size_t length() const noexcept { return graphs_.size(); }
    std::size_t order() const noexcept { return universe_.size(); }
    bool directed() const noexcept { return directed_; }

    /// True when activity was supplied (vertex entry/exit is modelled).
    bool has_vertex_dynamics() const noexcept { return dynamic_; }

    /// Graph at time t, 1-based.
    const Graph& graph(std::size_t t) const { return graphs_.at(t - 1); }
    const std::vector<Graph>& graphs() const noexcept { return graphs_; }

    bool active(std::size_t t, std::size_t i) const { return activity_.at(t - 1).at(i) != 0; }
    const std::vector<std::uint8_t>& activity(std::size_t t) const { return activity_.at(t - 1); }
    std::size_t active_count(std::size_t t) const
    {
        const auto& a = activity(t);
        return static_cast<std::size_t>(std::count(a.begin(), a.end(), std::uint8_t{1}));
    }

    const std::vector<std::string>& universe() const noexcept { return universe_; }

    std::size_t index_of(const std::string& id) const
    {
        auto it = index_.find(id);
        if (it == index_.end()) throw MappingError("unknown vertex id '" + id + "'");
        return it->second;
    }

    /// Original time labels, kept as metadata after normalisation to 1..T.
    const std::vector<std::string>& time_labels() const noexcept { return labels_; }
    void set_time_labels(std::vector<std::string> labels)
    {
        if (labels.size() != graphs_.size()) throw ValidationError("time label count mismatch");
        labels_ = std::move(labels);
    }

    // Static vertex attributes --------------------------------------------

    void set_attribute(const std::string& name, std::vector<std::string> values)
    {
        if (values.size() != order()) throw ValidationError("attribute '" + name + "' has wrong length");
        attributes_[name] = std::move(values);
    }
    bool has_attribute(const std::string& name) const { return attributes_.count(name) != 0; }
    const std::vector<std::string>& attribute(const std::string& name) const
    {
        auto it = attributes_.find(name);
        if (it == attributes_.end()) throw SpecError("unknown vertex attribute '" + name + "'");
        return it->second;
    }
    const std::map<std::string, std::vector<std::string>>& attributes() const noexcept
    {
        return attributes_;
    }

    /// Sorted distinct values of a categorical attribute.
    std::vector<std::string> attribute_levels(const std::string& name) const
    {
        auto values = attribute(name);
        std::sort(values.begin(), values.end());
        values.erase(std::unique(values.begin(), values.end()), values.end());
        return values;
    }

    // Edge covariates ------------------------------------------------------

    /// `per_time[t-1]` is X_t for this covariate. Entries past the last graph
    /// act as a covariate forecast for simulated steps.
    void set_edge_covariate(const std::string& name, std::vector<DyadMatrix> per_time)
    {
        if (per_time.size() < length()) throw ValidationError("edge covariate '" + name + "' is shorter than the panel");
        for (const auto& m : per_time)
            if (m.n != order()) throw ValidationError("edge covariate '" + name + "' has wrong order");
        edge_covariates_[name] = std::move(per_time);
    }
    bool has_edge_covariate(const std::string& name) const { return edge_covariates_.count(name) != 0; }

    /// X_t for covariate `name`; times past the end carry the last observed matrix forward.
    const DyadMatrix& edge_covariate(const std::string& name, std::size_t t) const
    {
        auto it = edge_covariates_.find(name);
        if (it == edge_covariates_.end()) throw SpecError("unknown edge covariate '" + name + "'");
        return it->second.at(std::min(t, it->second.size()) - 1);
    }
    const std::map<std::string, std::vector<DyadMatrix>>& edge_covariates() const noexcept
    {
        return edge_covariates_;
    }

    // Time-varying vertex covariates ----------------------------------------

    /// `per_time[t-1][i]` is the value for vertex i at time t; may extend past the panel.
    void set_vertex_covariate(const std::string& name, std::vector<std::vector<double>> per_time)
    {
        if (per_time.size() < length()) throw ValidationError("vertex covariate '" + name + "' is shorter than the panel");
        for (const auto& row : per_time)
            if (row.size() != order()) throw ValidationError("vertex covariate '" + name + "' has wrong order");
        vertex_covariates_[name] = std::move(per_time);
    }
    bool has_vertex_covariate(const std::string& name) const { return vertex_covariates_.count(name) != 0; }

    /// Value at time t; carried forward past the end.
    double vertex_covariate(const std::string& name, std::size_t t, std::size_t i) const
    {
        auto it = vertex_covariates_.find(name);
        if (it == vertex_covariates_.end()) throw SpecError("unknown vertex covariate '" + name + "'");
        return it->second.at(std::min(t, it->second.size()) - 1).at(i);
    }
    const std::map<std::string, std::vector<std::vector<double>>>& vertex_covariates() const noexcept
    {
        return vertex_covariates_;
    }

    /// Non-fatal issues found during ingestion (dropped loops, imputed covariates).
    const std::vector<std::string>& warnings() const noexcept { return warnings_; }
    void add_warning(std::string w) { warnings_.push_back(std::move(w)); }

    /// Appends one time point. Covariates without a forecast for it carry the last value forward.
    void append(Graph g, std::vector<std::uint8_t> active)
    {
        if (g.order() != order() || g.directed() != directed_)
            throw ValidationError("appended graph does not match the panel");
        if (active.size() != order()) throw ValidationError("appended activity row has wrong length");
        check_activity(g, active, length() + 1);
        for (auto& a : active) a = a ? 1 : 0;
        if (std::count(active.begin(), active.end(), std::uint8_t{0}) > 0) dynamic_ = true;
        graphs_.push_back(std::move(g));
        activity_.push_back(std::move(active));
        std::string label = std::to_string(length());
        while (std::find(labels_.begin(), labels_.end(), label) != labels_.end()) label += "+";
        labels_.push_back(std::move(label));
        for (auto& [name, series] : edge_covariates_)
            if (series.size() < length()) series.push_back(series.back());
        for (auto& [name, series] : vertex_covariates_)
            if (series.size() < length()) series.push_back(series.back());
    }

    /// Panel holding times first..last (inclusive), renumbered from 1.
    NetworkPanel slice(std::size_t first, std::size_t last) const
    {
        if (first < 1 || last > length() || first > last) throw ValidationError("invalid panel slice");
        NetworkPanel out = *this;
        out.graphs_.assign(graphs_.begin() + (first - 1), graphs_.begin() + last);
        out.activity_.assign(activity_.begin() + (first - 1), activity_.begin() + last);
        out.labels_.assign(labels_.begin() + (first - 1), labels_.begin() + last);
        for (auto& [name, series] : out.edge_covariates_)
            series.assign(series.begin() + (first - 1), series.begin() + last);
        for (auto& [name, series] : out.vertex_covariates_)
            series.assign(series.begin() + (first - 1), series.begin() + last);
        return out;
    }

    friend bool operator==(const NetworkPanel& a, const NetworkPanel& b)
    {
        return a.universe_ == b.universe_ && a.graphs_ == b.graphs_ && a.activity_ == b.activity_ &&
               a.dynamic_ == b.dynamic_ && a.labels_ == b.labels_ && a.attributes_ == b.attributes_ &&
               a.edge_covariates_ == b.edge_covariates_ && a.vertex_covariates_ == b.vertex_covariates_;
    }

private:
    static void check_activity(const Graph& g, const std::vector<std::uint8_t>& active, std::size_t t)
    {
        const std::size_t n = g.order();
        for (std::size_t i = 0; i < n; ++i) {
            if (active[i]) continue;
            for (std::size_t j = 0; j < n; ++j) {
                if (g.edge(i, j) || g.edge(j, i)) {
                    throw ValidationError("edge (" + std::to_string(t) + ", " + std::to_string(i) + ", " +
                                          std::to_string(j) + ") is incident to an inactive vertex");
                }
            }
        }
    }

    void validate() const
    {
        for (std::size_t t = 0; t < graphs_.size(); ++t) check_activity(graphs_[t], activity_[t], t + 1);
    }

    std::vector<std::string> universe_;
    std::unordered_map<std::string, std::size_t> index_;
    std::vector<Graph> graphs_;
    std::vector<std::vector<std::uint8_t>> activity_;
    bool directed_ = false;
    bool dynamic_ = false;
    std::vector<std::string> labels_;
    std::map<std::string, std::vector<std::string>> attributes_;
    std::map<std::string, std::vector<DyadMatrix>> edge_covariates_;
    std::map<std::string, std::vector<std::vector<double>>> vertex_covariates_;
    std::vector<std::string> warnings_;
};

/// The k graphs preceding `anchor`, oldest first.
struct Window {
    std::size_t anchor = 0;
    std::size_t lag = 0;
    std::vector<const Graph*> members;

    /// Graph at lag j (1 = newest).
    const Graph& at_lag(std::size_t j) const
    {
        if (j < 1 || j > lag) throw SpecError("lag " + std::to_string(j) + " outside window of length " +
                                               std::to_string(lag));
        return *members[lag - j];
    }
};

/// Window anchored at `anchor` (1-based) with k members. The panel must outlive the window.
inline Window window_at(const NetworkPanel& panel, std::size_t anchor, std::size_t k)
{
    if (k == 0) throw SpecError("window lag must be at least 1");
    if (anchor < k + 1 || anchor > panel.length() + 1)
        throw InsufficientHistory("anchor " + std::to_string(anchor) + " has no full window of " +
                                  std::to_string(k) + " prior graphs");
    Window w{anchor, k, {}};
    for (std::size_t t = anchor - k; t < anchor; ++t) w.members.push_back(&panel.graph(t));
    return w;
}

/// Every full window, anchored at k+1..T.
inline std::vector<Window> windows(const NetworkPanel& panel, std::size_t k)
{
    if (panel.length() <= k)
        throw InsufficientHistory("panel of length " + std::to_string(panel.length()) +
                                  " has no window of lag " + std::to_string(k));
    std::vector<Window> out;
    for (std::size_t t = k + 1; t <= panel.length(); ++t) out.push_back(window_at(panel, t, k));
    return out;
}

/// Re-expresses a graph on a vertex subset onto the full universe.
/// `subset_ids[a]` names vertex a of `g`; vertices not in the subset get zero rows/columns.
inline Graph expand_to_universe(const Graph& g, const std::vector<std::string>& subset_ids,
                                const std::vector<std::string>& universe)
{
    if (subset_ids.size() != g.order()) throw MappingError("id map length does not match graph order");
    std::unordered_map<std::string, std::size_t> pos;
    for (std::size_t i = 0; i < universe.size(); ++i) pos.emplace(universe[i], i);
    std::vector<std::size_t> map(subset_ids.size());
    for (std::size_t a = 0; a < subset_ids.size(); ++a) {
        auto it = pos.find(subset_ids[a]);
        if (it == pos.end()) throw MappingError("vertex '" + subset_ids[a] + "' is not in the universe");
        map[a] = it->second;
    }
    Graph out(universe.size(), g.directed());
    for (std::size_t a = 0; a < g.order(); ++a)
        for (std::size_t b = 0; b < g.order(); ++b)
            if (a != b && g.edge(a, b)) out.set_edge(map[a], map[b], true);
    return out;
}

/// Inverse of expand_to_universe: induced subgraph on `subset_ids`, in that order.
inline Graph restrict_to(const Graph& g, const std::vector<std::string>& universe,
                         const std::vector<std::string>& subset_ids)
{
    std::unordered_map<std::string, std::size_t> pos;
    for (std::size_t i = 0; i < universe.size(); ++i) pos.emplace(universe[i], i);
    std::vector<std::size_t> map(subset_ids.size());
    for (std::size_t a = 0; a < subset_ids.size(); ++a) {
        auto it = pos.find(subset_ids[a]);
        if (it == pos.end()) throw MappingError("vertex '" + subset_ids[a] + "' is not in the universe");
        map[a] = it->second;
    }
    Graph out(subset_ids.size(), g.directed());
    for (std::size_t a = 0; a < map.size(); ++a)
        for (std::size_t b = 0; b < map.size(); ++b)
            if (a != b && g.edge(map[a], map[b])) out.set_edge(a, b, true);
    return out;
}

}  // namespace dnr

#endif  // DNR_PANEL_HPP
