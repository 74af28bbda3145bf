#ifndef DNR_SYNTHETIC_HPP
#define DNR_SYNTHETIC_HPP

#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "config.hpp"
#include "estimator.hpp"
#include "logistic.hpp"
#include "rng.hpp"
#include "simulate.hpp"

namespace dnr {

inline std::vector<std::string> numbered_ids(std::size_t n, const std::string& prefix = "v")
{
    std::vector<std::string> ids;
    for (std::size_t i = 1; i <= n; ++i) ids.push_back(prefix + std::to_string(i));
    return ids;
}

/// Panel drawn from a DNR model with known coefficients (in column order of
/// the resolved spec). The initial window is i.i.d. Bernoulli and discarded
/// together with `burn_in` further steps.
struct DnrGenerator {
    std::size_t n = 20;
    bool directed = false;
    std::size_t length = 50;
    ModelSpec spec;
    std::vector<double> theta;
    double initial_density = 0.1;
    std::size_t burn_in = 20;
    std::uint64_t seed = 1;
    std::map<std::string, std::vector<std::string>> attributes;
    std::map<std::string, std::vector<DyadMatrix>> edge_covariates;  // indexed over generated times
};

struct DnrvGenerator {
    std::size_t n = 30;
    bool directed = false;
    std::size_t length = 50;
    VertexSpec vspec;
    std::vector<double> psi;
    ModelSpec espec;
    std::vector<double> theta;
    double initial_activity = 0.5;
    double initial_density = 0.1;
    std::size_t burn_in = 20;
    std::uint64_t seed = 1;
    std::map<std::string, std::vector<std::string>> attributes;
    std::map<std::string, std::vector<std::vector<double>>> vertex_covariates;
};

namespace detail {

inline NetworkPanel initial_panel(std::size_t n, bool directed, std::size_t k, double activity, double density,
                                  bool dynamic, std::uint64_t seed)
{
    std::vector<Graph> graphs;
    std::vector<std::vector<std::uint8_t>> act;
    const auto dyads = enumerate_dyads(n, directed);
    for (std::size_t t = 1; t <= k; ++t) {
        std::vector<std::uint8_t> a(n, 1);
        if (dynamic)
            for (std::size_t i = 0; i < n; ++i) a[i] = uniform(seed, Stream::Initial, 2 * t, i) < activity ? 1 : 0;
        Graph g(n, directed);
        for (std::size_t r = 0; r < dyads.size(); ++r) {
            const auto [i, j] = dyads[r];
            if (a[i] && a[j] && uniform(seed, Stream::Initial, 2 * t + 1, r) < density) g.set_edge(i, j, true);
        }
        graphs.push_back(std::move(g));
        act.push_back(std::move(a));
    }
    return dynamic ? NetworkPanel(numbered_ids(n), graphs, act) : NetworkPanel(numbered_ids(n), graphs);
}

inline CoefficientBlock known_block(std::vector<std::string> labels, const std::vector<double>& values)
{
    if (labels.size() != values.size())
        throw SpecError("generator has " + std::to_string(values.size()) + " coefficients for " +
                        std::to_string(labels.size()) + " columns");
    CoefficientBlock b;
    b.labels = std::move(labels);
    b.values = values;
    b.std_errors.assign(values.size(), std::numeric_limits<double>::quiet_NaN());
    return b;
}

}  // namespace detail

inline NetworkPanel generate_dnr(const DnrGenerator& g)
{
    const std::size_t k = g.spec.max_lag;
    NetworkPanel p = detail::initial_panel(g.n, g.directed, k, 1.0, g.initial_density, false, g.seed);
    for (const auto& [name, values] : g.attributes) p.set_attribute(name, values);
    for (const auto& [name, series] : g.edge_covariates) p.set_edge_covariate(name, series);
    FittedModel m;
    m.edge_spec = g.spec;
    m.theta = detail::known_block(labels_of(resolve_columns(g.spec, p)), g.theta);
    SimulationOptions opt;
    opt.horizon = g.burn_in + g.length;
    opt.smoother = SmootherKind::None;
    opt.seed = g.seed;
    opt.keep_step_stats = false;
    auto run = simulate_static(p, m, opt);
    auto out = run.panel.slice(k + g.burn_in + 1, run.panel.length());
    out.set_time_labels([&] {
        std::vector<std::string> l;
        for (std::size_t t = 1; t <= out.length(); ++t) l.push_back(std::to_string(t));
        return l;
    }());
    return out;
}

inline NetworkPanel generate_dnrv(const DnrvGenerator& g)
{
    const std::size_t k = std::max(g.vspec.max_lag, g.espec.max_lag);
    NetworkPanel p = detail::initial_panel(g.n, g.directed, k, g.initial_activity, g.initial_density, true, g.seed);
    for (const auto& [name, values] : g.attributes) p.set_attribute(name, values);
    for (const auto& [name, series] : g.vertex_covariates) p.set_vertex_covariate(name, series);
    FittedModel m;
    m.edge_spec = g.espec;
    m.vertex_spec = g.vspec;
    m.theta = detail::known_block(labels_of(resolve_columns(g.espec, p)), g.theta);
    m.psi = detail::known_block(vertex_labels(g.vspec), g.psi);
    SimulationOptions opt;
    opt.horizon = g.burn_in + g.length;
    opt.smoother = SmootherKind::None;
    opt.seed = g.seed;
    opt.keep_step_stats = false;
    auto run = simulate_dynamic(p, m, opt);
    auto out = run.panel.slice(k + g.burn_in + 1, run.panel.length());
    std::vector<std::string> labels;
    for (std::size_t t = 1; t <= out.length(); ++t) labels.push_back(std::to_string(t));
    out.set_time_labels(labels);
    return out;
}

/// Beach-like panel that is not drawn from any DNRV model: a few regular
/// visitors and many occasional ones, a weekend effect on attendance, and
/// persistent friend groups whose ties tend to recur while both members are
/// present. Static attributes: `regular` (1/0) and `group`; vertex covariate
/// `weekend` (1 on days 6 and 7 of each week), provided for `length +
/// forecast` days.
struct BeachGenerator {
    std::size_t universe = 95;
    std::size_t regulars = 15;
    double regular_rate = 0.6;
    double casual_rate = 0.075;
    double weekend_log_odds = 0.8;
    double return_log_odds = 0.5;  // added when the vertex was present the day before
    std::size_t group_size = 4;
    double within_group = 0.45;
    double between_group = 0.02;
    double persistence = 0.7;
    std::size_t length = 30;
    std::size_t forecast = 0;
    std::uint64_t seed = 1;
};

inline NetworkPanel generate_beach_like(const BeachGenerator& g)
{
    const std::size_t n = g.universe;
    std::vector<std::string> regular(n), group(n);
    for (std::size_t i = 0; i < n; ++i) {
        regular[i] = i < g.regulars ? "1" : "0";
        group[i] = std::to_string(i / std::max<std::size_t>(g.group_size, 1) + 1);
    }
    auto weekend = [](std::size_t t) { return (t - 1) % 7 >= 5 ? 1.0 : 0.0; };
    const auto dyads = enumerate_dyads(n, false);

    std::vector<Graph> graphs;
    std::vector<std::vector<std::uint8_t>> activity;
    for (std::size_t t = 1; t <= g.length; ++t) {
        std::vector<std::uint8_t> a(n, 0);
        for (std::size_t i = 0; i < n; ++i) {
            double eta = logit(i < g.regulars ? g.regular_rate : g.casual_rate);
            eta += g.weekend_log_odds * (weekend(t) - 2.0 / 7.0);
            if (t > 1 && activity.back()[i]) eta += g.return_log_odds;
            a[i] = uniform(g.seed, Stream::Vertex, t, i) < inv_logit(eta) ? 1 : 0;
        }
        Graph y(n, false);
        for (std::size_t r = 0; r < dyads.size(); ++r) {
            const auto [i, j] = dyads[r];
            if (!a[i] || !a[j]) continue;
            double p = group[i] == group[j] ? g.within_group : g.between_group;
            if (t > 1 && graphs.back().edge(i, j)) p = g.persistence;
            if (uniform(g.seed, Stream::Edge, t, r) < p) y.set_edge(i, j, true);
        }
        graphs.push_back(std::move(y));
        activity.push_back(std::move(a));
    }
    NetworkPanel p(numbered_ids(n, "p"), graphs, activity);
    p.set_attribute("regular", regular);
    p.set_attribute("group", group);
    std::vector<std::vector<double>> wk;
    for (std::size_t t = 1; t <= g.length + g.forecast; ++t) wk.emplace_back(n, weekend(t));
    p.set_vertex_covariate("weekend", wk);
    return p;
}

/// Directed panel on 47 vertices from edges + lag(1) with coefficients
/// (-3.0, 2.5): sparse and persistent, with a two-level `party` attribute.
inline NetworkPanel generate_blog_like(std::size_t length, std::uint64_t seed, std::size_t burn_in = 50)
{
    DnrGenerator g;
    g.n = 47;
    g.directed = true;
    g.length = length;
    g.spec = parse_edge_formula("edges + lag(1)");
    g.theta = {-3.0, 2.5};
    g.initial_density = inv_logit(-3.0);
    g.burn_in = burn_in;
    g.seed = seed;
    std::vector<std::string> party(g.n);
    for (std::size_t i = 0; i < g.n; ++i) party[i] = i < 23 ? "dem" : "rep";
    g.attributes["party"] = party;
    return generate_dnr(g);
}

}  // namespace dnr

#endif  // DNR_SYNTHETIC_HPP
