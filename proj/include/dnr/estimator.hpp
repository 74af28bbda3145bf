#ifndef DNR_ESTIMATOR_HPP
#define DNR_ESTIMATOR_HPP

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "design.hpp"
#include "logistic.hpp"
#include "terms.hpp"

namespace dnr {

/// Labelled coefficients of one logistic block (edges or vertices).
struct CoefficientBlock {
    std::vector<std::string> labels;
    std::vector<double> values;
    // Wald standard errors; NaN where unavailable (penalized fits, dropped terms).
    std::vector<double> std_errors;
    double lambda = 0.0;
    std::vector<std::size_t> support;
    bool refit = false;
    double loglik = 0.0;
    std::size_t n_obs = 0;
    std::size_t iterations = 0;
    bool converged = true;
    std::string failure;
    std::vector<std::string> warnings;

    double at(const std::string& label) const
    {
        for (std::size_t c = 0; c < labels.size(); ++c)
            if (labels[c] == label) return values[c];
        throw SpecError("no coefficient named '" + label + "'");
    }
};

struct FittedModel {
    ModelSpec edge_spec;
    std::optional<VertexSpec> vertex_spec;
    CoefficientBlock theta;
    std::optional<CoefficientBlock> psi;

    bool converged() const { return theta.converged && (!psi || psi->converged); }
};

struct FitOptions {
    std::optional<double> lambda;  // nullopt selects lambda by BIC
    std::vector<double> grid;      // empty uses the default geometric grid
    bool refit = true;             // unpenalized refit on the selected support
    SolverOptions solver;
};

/// Fits one stacked block: lambda (fixed or BIC), L1 fit, optional refit.
inline CoefficientBlock fit_block(const DesignBlock& design, const FitOptions& opt)
{
    const auto data = compress(design);
    double lambda = 0.0;
    if (opt.lambda) {
        lambda = *opt.lambda;
    } else {
        auto grid = opt.grid.empty() ? default_lambda_grid(data, 20, 1e-3, opt.solver) : opt.grid;
        lambda = select_lambda(data, grid, opt.solver).lambda;
    }
    LogisticFit fit = fit_logistic_l1(data, lambda, opt.solver);

    CoefficientBlock out;
    out.labels = design.labels;
    out.lambda = lambda;
    for (std::size_t c = 0; c < fit.coef.size(); ++c)
        if (fit.coef[c] != 0.0 || design.fixed[c]) out.support.push_back(c);

    const bool unpenalized = lambda == 0.0;
    if (opt.refit && !unpenalized && !out.support.empty()) {
        // refit on the support only; dropped columns stay at zero
        CompressedDesign sub;
        sub.cols = out.support.size();
        sub.trials = data.trials;
        sub.successes = data.successes;
        sub.n_obs = data.n_obs;
        for (auto c : out.support) sub.fixed.push_back(data.fixed[c]);
        for (std::size_t r = 0; r < data.rows(); ++r)
            for (auto c : out.support) sub.x.push_back(data.row(r)[c]);
        LogisticFit refit = fit_logistic_l1(sub, 0.0, opt.solver);
        std::vector<double> coef(data.cols, 0.0);
        for (std::size_t k = 0; k < out.support.size(); ++k) coef[out.support[k]] = refit.coef[k];
        refit.warnings.insert(refit.warnings.begin(), fit.warnings.begin(), fit.warnings.end());
        fit.coef = coef;
        fit.loglik = refit.loglik;
        fit.iterations += refit.iterations;
        fit.converged = fit.converged && refit.converged;
        if (!refit.converged) fit.failure = "refit: " + refit.failure;
        fit.separation = fit.separation || refit.separation;
        fit.warnings = refit.warnings;
        out.refit = true;
    }
    out.values = fit.coef;
    out.loglik = fit.loglik;
    out.n_obs = fit.n_obs;
    out.iterations = fit.iterations;
    out.converged = fit.converged;
    out.failure = fit.failure;
    out.warnings = fit.warnings;

    out.std_errors.assign(data.cols, std::numeric_limits<double>::quiet_NaN());
    if ((unpenalized || out.refit) && !out.support.empty()) {
        std::vector<std::size_t> free;  // capped coefficients have no meaningful curvature
        for (auto c : out.support)
            if (std::abs(out.values[c]) < opt.solver.coef_cap * (1 - 1e-12)) free.push_back(c);
        if (!free.empty()) {
            const auto cov = covariance(data, out.values, free);
            for (std::size_t k = 0; k < free.size(); ++k) {
                const double v = cov(Eigen::Index(k), Eigen::Index(k));
                out.std_errors[free[k]] = v > 0 ? std::sqrt(v) : std::numeric_limits<double>::quiet_NaN();
            }
        }
    }
    return out;
}

/// Fixed-vertex model: theta fitted on the edge designs stacked over anchors k+1..T.
inline FittedModel fit_dnr(const NetworkPanel& panel, const ModelSpec& spec, const FitOptions& opt = {})
{
    const auto design = stack_designs(panel, spec, all_anchors(panel, spec.max_lag));
    FittedModel m;
    m.edge_spec = spec;
    m.theta = fit_block(design, opt);
    return m;
}

/// Edge rows whose endpoints are both active at the row's anchor.
inline std::vector<std::uint8_t> active_dyad_mask(const NetworkPanel& panel, const DesignBlock& b)
{
    std::vector<std::uint8_t> keep(b.rows());
    for (std::size_t r = 0; r < b.rows(); ++r)
        keep[r] = panel.active(b.anchors[r], b.dyads[r].i) && panel.active(b.anchors[r], b.dyads[r].j);
    return keep;
}

inline DesignBlock stacked_vertex_block(const NetworkPanel& panel, const VertexSpec& vspec)
{
    return stack_vertex_designs(panel, vspec, all_anchors(panel, vspec.max_lag));
}

inline DesignBlock conditional_edge_block(const NetworkPanel& panel, const ModelSpec& espec)
{
    const auto stacked = stack_designs(panel, espec, all_anchors(panel, espec.max_lag));
    return filter_rows(stacked, active_dyad_mask(panel, stacked));
}

/// Vertex-dynamics model. The vertex block (psi) and the edge block (theta,
/// restricted to dyads with both endpoints active at the anchor) share no
/// parameters and are fitted independently, each over its own lag's anchors.
inline FittedModel fit_dnrv(const NetworkPanel& panel, const VertexSpec& vspec, const ModelSpec& espec,
                            const FitOptions& opt = {})
{
    vspec.validate();
    espec.validate();
    const std::size_t k = std::max(vspec.max_lag, espec.max_lag);
    if (panel.length() <= k)
        throw InsufficientHistory("panel of length " + std::to_string(panel.length()) + " needs more than " +
                                  std::to_string(k) + " time points");
    FittedModel m;
    m.edge_spec = espec;
    m.vertex_spec = vspec;
    m.psi = fit_block(stacked_vertex_block(panel, vspec), opt);
    const auto edges = conditional_edge_block(panel, espec);
    if (edges.rows() == 0) throw InsufficientHistory("no dyad has both endpoints active at any anchor");
    m.theta = fit_block(edges, opt);
    return m;
}

}  // namespace dnr

#endif  // DNR_ESTIMATOR_HPP
