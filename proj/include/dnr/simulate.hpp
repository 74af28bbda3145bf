#ifndef DNR_SIMULATE_HPP
#define DNR_SIMULATE_HPP

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "design.hpp"
#include "estimator.hpp"
#include "logistic.hpp"
#include "rng.hpp"
#include "smoothing.hpp"

namespace dnr {

struct SimulationOptions {
    std::size_t horizon = 0;
    SmootherKind smoother = SmootherKind::Mean;
    std::size_t smoothing_window = 0;  // 0 = expanding over training plus simulated windows
    std::uint64_t seed = 1;
    bool keep_step_stats = true;
};

struct SimulationRun {
    NetworkPanel panel;  // input panel extended by `horizon` steps
    std::size_t horizon = 0;
    SmootherKind smoother = SmootherKind::Mean;
    std::uint64_t seed = 0;
    std::vector<std::string> edge_labels;
    std::vector<std::string> vertex_labels;
    // per step, per dyad in enumerate_dyads order; 0 for dyads with an inactive endpoint
    std::vector<std::vector<double>> edge_probabilities;
    std::vector<std::vector<double>> vertex_probabilities;
    // per step, smoothed statistics (rows x cols, row-major)
    std::vector<std::vector<double>> step_stats;
    std::vector<std::vector<double>> step_vertex_stats;
};

/// p = logit^-1(coef . s) for each row of a row-major statistic matrix.
inline std::vector<double> step_probabilities(const std::vector<double>& stats, const std::vector<std::string>& labels,
                                              const CoefficientBlock& coef)
{
    if (labels != coef.labels) {
        std::string got, want;
        for (const auto& l : labels) got += (got.empty() ? "" : ",") + l;
        for (const auto& l : coef.labels) want += (want.empty() ? "" : ",") + l;
        throw SpecError("statistic columns [" + got + "] do not match coefficients [" + want + "]");
    }
    const std::size_t q = labels.size();
    if (q == 0 || stats.size() % q != 0) throw InputError("statistic matrix does not have " + std::to_string(q) + " columns");
    std::vector<double> p(stats.size() / q);
    for (std::size_t r = 0; r < p.size(); ++r) {
        double eta = 0.0;
        for (std::size_t c = 0; c < q; ++c) eta += coef.values[c] * stats[r * q + c];
        p[r] = inv_logit(eta);
    }
    return p;
}

inline std::vector<double> step_edge_probabilities(const std::vector<double>& smoothed,
                                                   const std::vector<std::string>& labels, const CoefficientBlock& theta)
{
    return step_probabilities(smoothed, labels, theta);
}

namespace detail {

inline void check_simulation_history(const NetworkPanel& panel, std::size_t k)
{
    if (panel.length() < k)
        throw InsufficientHistory("panel of length " + std::to_string(panel.length()) + " cannot seed a window of lag " +
                                  std::to_string(k));
}

// Shared loop of both algorithms. With `vspec` unset every new vertex is active.
inline SimulationRun simulate(const NetworkPanel& panel, const FittedModel& model, const VertexSpec* vspec,
                              const SimulationOptions& opt)
{
    const ModelSpec& espec = model.edge_spec;
    espec.validate();
    detail::check_simulation_history(panel, espec.max_lag);
    const auto cols = resolve_columns(espec, panel);

    SimulationRun run;
    run.panel = panel;
    run.horizon = opt.horizon;
    run.smoother = opt.smoother;
    run.seed = opt.seed;
    run.edge_labels = labels_of(cols);
    if (run.edge_labels != model.theta.labels) step_probabilities({}, run.edge_labels, model.theta);  // throws

    StatHistory edge_history(opt.smoother, opt.smoothing_window);
    for (std::size_t t = espec.max_lag + 1; t <= panel.length(); ++t)
        edge_history.push(edge_statistics(panel, cols, espec.max_lag, t).values);

    StatHistory vertex_history(opt.smoother, opt.smoothing_window);
    if (vspec) {
        vspec->validate();
        detail::check_simulation_history(panel, vspec->max_lag);
        run.vertex_labels = vertex_labels(*vspec);
        if (!model.psi) throw SpecError("dynamic simulation needs a fitted vertex model");
        if (run.vertex_labels != model.psi->labels) step_probabilities({}, run.vertex_labels, *model.psi);
        for (std::size_t t = vspec->max_lag + 1; t <= panel.length(); ++t)
            vertex_history.push(vertex_statistics(panel, *vspec, t).values);
    }

    const std::size_t n = panel.order();
    const auto dyads = enumerate_dyads(n, panel.directed());
    for (std::size_t l = 1; l <= opt.horizon; ++l) {
        const std::size_t anchor = run.panel.length() + 1;

        std::vector<std::uint8_t> active(n, 1);
        if (vspec) {
            vertex_history.push(vertex_statistics(run.panel, *vspec, anchor).values);
            auto w = vertex_history.smoothed();
            auto pv = step_probabilities(w, run.vertex_labels, *model.psi);
            for (std::size_t i = 0; i < n; ++i) active[i] = uniform(opt.seed, Stream::Vertex, l, i) < pv[i] ? 1 : 0;
            run.vertex_probabilities.push_back(std::move(pv));
            if (opt.keep_step_stats) run.step_vertex_stats.push_back(std::move(w));
        }

        edge_history.push(edge_statistics(run.panel, cols, espec.max_lag, anchor).values);
        auto s = edge_history.smoothed();
        auto pe = step_probabilities(s, run.edge_labels, model.theta);
        Graph g(n, panel.directed());
        for (std::size_t r = 0; r < dyads.size(); ++r) {
            const auto [i, j] = dyads[r];
            if (!active[i] || !active[j]) {
                pe[r] = 0.0;
                continue;
            }
            if (uniform(opt.seed, Stream::Edge, l, r) < pe[r]) g.set_edge(i, j, true);
        }
        run.edge_probabilities.push_back(std::move(pe));
        if (opt.keep_step_stats) run.step_stats.push_back(std::move(s));
        run.panel.append(std::move(g), std::move(active));
    }
    return run;
}

}  // namespace detail

/// Fixed-vertex forward simulation. Each step computes the statistics of the
/// newest window, adds them to the history, smooths, and draws every dyad
/// independently.
inline SimulationRun simulate_static(const NetworkPanel& panel, const FittedModel& model, const SimulationOptions& opt)
{
    return detail::simulate(panel, model, nullptr, opt);
}

/// Vertex-dynamics simulation: activity is drawn first from the smoothed
/// vertex statistics, then edges among active vertices only.
inline SimulationRun simulate_dynamic(const NetworkPanel& panel, const FittedModel& model, const SimulationOptions& opt)
{
    if (!model.vertex_spec) throw SpecError("dynamic simulation needs a vertex spec");
    return detail::simulate(panel, model, &*model.vertex_spec, opt);
}

}  // namespace dnr

#endif  // DNR_SIMULATE_HPP
