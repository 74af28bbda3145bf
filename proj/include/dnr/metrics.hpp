#ifndef DNR_METRICS_HPP
#define DNR_METRICS_HPP

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "estimator.hpp"
#include "graph.hpp"
#include "panel.hpp"

namespace dnr {

struct ConfusionMetrics {
    std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
    double accuracy = 1.0;
    double misclassification = 0.0;
    double precision = 1.0;  // 1.0 when nothing is predicted
    double recall = 1.0;     // 1.0 when nothing is true
};

/// Confusion counts over off-diagonal dyads (i<j when undirected).
inline ConfusionMetrics confusion_metrics(const Graph& predicted, const Graph& truth)
{
    if (predicted.order() != truth.order() || predicted.directed() != truth.directed())
        throw InputError("predicted and true graphs differ in order or directedness");
    ConfusionMetrics m;
    for (const auto& [i, j] : enumerate_dyads(truth.order(), truth.directed())) {
        const bool p = predicted.edge(i, j), y = truth.edge(i, j);
        if (p && y) ++m.tp;
        else if (p) ++m.fp;
        else if (y) ++m.fn;
        else ++m.tn;
    }
    const auto total = double(m.tp + m.fp + m.fn + m.tn);
    if (total > 0) m.accuracy = double(m.tp + m.tn) / total;
    m.misclassification = 1.0 - m.accuracy;
    if (m.tp + m.fp > 0) m.precision = double(m.tp) / double(m.tp + m.fp);
    if (m.tp + m.fn > 0) m.recall = double(m.tp) / double(m.tp + m.fn);
    return m;
}

/// How closed triads are counted on directed graphs.
enum class TriangleMode {
    Symmetrized,  // undirected reading: y_ij OR y_ji
    Directed      // transitive triples i->j->k with i->k, over two-paths i->j->k
};

struct GraphMetrics {
    double triangles = 0.0;
    double transitivity = 0.0;
    double expected_degree = 0.0;
};

/// Triangles, global transitivity and mean degree. `vertices` is the number of
/// vertices the degree is averaged over (active vertices for dynamic panels);
/// 0 means the graph order.
inline GraphMetrics graph_metrics(const Graph& g, TriangleMode mode = TriangleMode::Symmetrized,
                                  std::size_t vertices = 0)
{
    const std::size_t n = g.order();
    GraphMetrics m;
    const std::size_t denom = vertices ? vertices : n;
    if (denom > 0)
        m.expected_degree = (g.directed() ? 1.0 : 2.0) * double(g.edge_count()) / double(denom);

    if (g.directed() && mode == TriangleMode::Directed) {
        double closed = 0.0, paths = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t i = 0; i < n; ++i) {
                if (i == j || !g.edge(i, j)) continue;
                for (std::size_t k = 0; k < n; ++k) {
                    if (k == i || k == j || !g.edge(j, k)) continue;
                    paths += 1.0;
                    if (g.edge(i, k)) closed += 1.0;
                }
            }
        m.triangles = closed;
        m.transitivity = paths > 0 ? closed / paths : 0.0;
        return m;
    }

    const Graph u = g.directed() ? g.symmetrized() : g;
    double tri = 0.0, triples = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = double(u.out_degree(i));
        triples += d * (d - 1.0) / 2.0;
        for (std::size_t j = i + 1; j < n; ++j) {
            if (!u.edge(i, j)) continue;
            for (std::size_t k = j + 1; k < n; ++k)
                if (u.edge(i, k) && u.edge(j, k)) tri += 1.0;
        }
    }
    m.triangles = tri;
    m.transitivity = triples > 0 ? 3.0 * tri / triples : 0.0;
    return m;
}

struct StepScore {
    std::size_t step = 0;  // 1-based step within the horizon
    ConfusionMetrics confusion;
    GraphMetrics predicted;
    GraphMetrics truth;
    double d_triangles = 0.0;
    double d_transitivity = 0.0;
    double d_expected_degree = 0.0;
};

struct MetricReport {
    std::vector<StepScore> steps;
    // horizon means
    double accuracy = 0.0, misclassification = 0.0, precision = 0.0, recall = 0.0;
    double d_triangles = 0.0, d_transitivity = 0.0, d_expected_degree = 0.0;
    double predicted_expected_degree = 0.0, truth_expected_degree = 0.0;
};

struct ScoreOptions {
    TriangleMode triangles = TriangleMode::Symmetrized;
    // average degree over active vertices when a panel has vertex dynamics
    bool active_degree = true;
};

/// Fills the horizon means of `r` from its steps (sums first, one division).
inline void summarize(MetricReport& r)
{
    double acc = 0, mis = 0, prec = 0, rec = 0, dt = 0, dc = 0, dd = 0, pd = 0, td = 0;
    for (const auto& s : r.steps) {
        acc += s.confusion.accuracy;
        mis += s.confusion.misclassification;
        prec += s.confusion.precision;
        rec += s.confusion.recall;
        dt += s.d_triangles;
        dc += s.d_transitivity;
        dd += s.d_expected_degree;
        pd += s.predicted.expected_degree;
        td += s.truth.expected_degree;
    }
    const double h = r.steps.empty() ? 1.0 : double(r.steps.size());
    r.accuracy = acc / h;
    r.misclassification = mis / h;
    r.precision = prec / h;
    r.recall = rec / h;
    r.d_triangles = dt / h;
    r.d_transitivity = dc / h;
    r.d_expected_degree = dd / h;
    r.predicted_expected_degree = pd / h;
    r.truth_expected_degree = td / h;
}

/// Means of the horizon summaries of several reports (no steps kept).
inline MetricReport average_reports(const std::vector<MetricReport>& reports)
{
    MetricReport m;
    if (reports.empty()) return m;
    for (const auto& r : reports) {
        m.accuracy += r.accuracy;
        m.misclassification += r.misclassification;
        m.precision += r.precision;
        m.recall += r.recall;
        m.d_triangles += r.d_triangles;
        m.d_transitivity += r.d_transitivity;
        m.d_expected_degree += r.d_expected_degree;
        m.predicted_expected_degree += r.predicted_expected_degree;
        m.truth_expected_degree += r.truth_expected_degree;
    }
    const double n = double(reports.size());
    for (double* v : {&m.accuracy, &m.misclassification, &m.precision, &m.recall, &m.d_triangles, &m.d_transitivity,
                      &m.d_expected_degree, &m.predicted_expected_degree, &m.truth_expected_degree})
        *v /= n;
    return m;
}

/// Scores `horizon` steps of `predicted` starting at time `pred_first`
/// against `truth` starting at `truth_first`.
inline MetricReport score_forecast(const NetworkPanel& predicted, std::size_t pred_first, const NetworkPanel& truth,
                                   std::size_t truth_first, std::size_t horizon, const ScoreOptions& opt = {})
{
    if (predicted.universe() != truth.universe()) throw InputError("forecast and truth have different vertex universes");
    if (predicted.directed() != truth.directed()) throw InputError("forecast and truth differ in directedness");
    if (horizon == 0) throw InputError("empty scoring horizon");
    if (pred_first < 1 || pred_first + horizon - 1 > predicted.length() || truth_first < 1 ||
        truth_first + horizon - 1 > truth.length())
        throw InputError("forecast and truth do not cover the scoring horizon");

    auto vertices = [&](const NetworkPanel& p, std::size_t t) -> std::size_t {
        return opt.active_degree && p.has_vertex_dynamics() ? p.active_count(t) : 0;
    };
    MetricReport r;
    for (std::size_t l = 0; l < horizon; ++l) {
        const std::size_t tp = pred_first + l, tt = truth_first + l;
        StepScore s;
        s.step = l + 1;
        s.confusion = confusion_metrics(predicted.graph(tp), truth.graph(tt));
        s.predicted = graph_metrics(predicted.graph(tp), opt.triangles, vertices(predicted, tp));
        s.truth = graph_metrics(truth.graph(tt), opt.triangles, vertices(truth, tt));
        s.d_triangles = std::abs(s.predicted.triangles - s.truth.triangles);
        s.d_transitivity = std::abs(s.predicted.transitivity - s.truth.transitivity);
        s.d_expected_degree = std::abs(s.predicted.expected_degree - s.truth.expected_degree);
        r.steps.push_back(s);
    }
    summarize(r);
    return r;
}

/// Scores the last `horizon` time points of each panel against each other.
inline MetricReport score_forecast(const NetworkPanel& predicted, const NetworkPanel& truth, std::size_t horizon,
                                   const ScoreOptions& opt = {})
{
    if (horizon > predicted.length() || horizon > truth.length())
        throw InputError("scoring horizon is longer than a panel");
    return score_forecast(predicted, predicted.length() - horizon + 1, truth, truth.length() - horizon + 1, horizon,
                          opt);
}

// ---------------------------------------------------------------------------
// Coefficient drift

struct DriftOptions {
    std::size_t first = 0;    // first evaluated time; 0 = first time with a full trailing window
    std::size_t window = 20;  // trailing window length in time points (0 = everything so far)
    SolverOptions solver;
};

struct DriftSeries {
    std::vector<std::string> labels;
    std::vector<std::size_t> times;                 // panel time at which each window ends
    std::vector<std::vector<double>> coefficients;  // one vector per evaluated time
    std::vector<double> drift;                      // |last - first| per coefficient
    std::vector<double> slope;                      // OLS slope per step
    std::vector<double> slope_se;
    bool converged = true;

    std::size_t index_of(const std::string& label) const
    {
        for (std::size_t c = 0; c < labels.size(); ++c)
            if (labels[c] == label) return c;
        throw SpecError("no coefficient named '" + label + "'");
    }
};

/// Least-squares slope of y on 0..n-1 and its standard error.
inline std::pair<double, double> ols_slope(const std::vector<double>& y)
{
    const std::size_t n = y.size();
    if (n < 2) return {0.0, std::numeric_limits<double>::quiet_NaN()};
    const double xbar = (double(n) - 1.0) / 2.0;
    double ybar = 0.0;
    for (double v : y) ybar += v;
    ybar /= double(n);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (double(i) - xbar) * (double(i) - xbar);
        sxy += (double(i) - xbar) * (y[i] - ybar);
    }
    const double b = sxy / sxx;
    if (n < 3) return {b, std::numeric_limits<double>::quiet_NaN()};
    double rss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = y[i] - ybar - b * (double(i) - xbar);
        rss += e * e;
    }
    return {b, std::sqrt(rss / double(n - 2) / sxx)};
}

/// Unpenalized refits of `spec` on the trailing window ending at each
/// evaluated time of `panel`.
inline DriftSeries drift_series(const NetworkPanel& panel, const ModelSpec& spec, const DriftOptions& opt = {})
{
    spec.validate();
    const std::size_t k = spec.max_lag;
    if (opt.window != 0 && opt.window <= k)
        throw InsufficientHistory("drift window of " + std::to_string(opt.window) + " time points holds no lag-" +
                                  std::to_string(k) + " window");
    const std::size_t earliest = opt.window ? opt.window : k + 1;
    const std::size_t first = opt.first ? opt.first : earliest;
    if (first < earliest || first > panel.length())
        throw InsufficientHistory("no refit window ends at time " + std::to_string(first));

    FitOptions fit;
    fit.lambda = 0.0;
    fit.refit = false;
    fit.solver = opt.solver;

    DriftSeries out;
    for (std::size_t t = first; t <= panel.length(); ++t) {
        const std::size_t start = opt.window ? t - opt.window + 1 : 1;
        const auto sub = panel.slice(start, t);
        // with vertex dynamics only dyads among active vertices enter, as in the fit
        const auto block = sub.has_vertex_dynamics() ? conditional_edge_block(sub, spec)
                                                     : stack_designs(sub, spec, all_anchors(sub, spec.max_lag));
        if (block.rows() == 0)
            throw InsufficientHistory("no dyad among active vertices in the window ending at " + std::to_string(t));
        const auto theta = fit_block(block, fit);
        if (out.labels.empty()) out.labels = theta.labels;
        out.times.push_back(t);
        out.coefficients.push_back(theta.values);
        out.converged = out.converged && theta.converged;
    }
    for (std::size_t c = 0; c < out.labels.size(); ++c) {
        std::vector<double> y;
        for (const auto& v : out.coefficients) y.push_back(v[c]);
        out.drift.push_back(std::abs(y.back() - y.front()));
        auto [b, se] = ols_slope(y);
        out.slope.push_back(b);
        out.slope_se.push_back(se);
    }
    return out;
}

}  // namespace dnr

#endif  // DNR_METRICS_HPP
