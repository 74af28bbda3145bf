#ifndef DNR_LOGISTIC_HPP
#define DNR_LOGISTIC_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "design.hpp"
#include "error.hpp"

namespace dnr {

struct SolverOptions {
    std::size_t max_outer = 100;
    std::size_t max_inner = 10000;
    double tolerance = 1e-8;   // max coefficient change between outer iterations
    bool standardize = true;   // scale penalized columns to unit variance
    double coef_cap = 30.0;    // |beta| bound on the logit scale
};

struct LogisticFit {
    std::vector<double> coef;
    double lambda = 0.0;
    double loglik = 0.0;
    double objective = 0.0;  // -loglik/N + lambda * sum |scaled beta_j| over penalized j
    std::size_t n_obs = 0;
    std::size_t iterations = 0;
    bool converged = false;
    bool separation = false;
    std::string failure;
    std::vector<std::string> warnings;
    std::vector<double> objective_trace;  // objective after each outer iteration
};

inline double inv_logit(double eta) noexcept
{
    if (eta >= 0) return 1.0 / (1.0 + std::exp(-eta));
    const double e = std::exp(eta);
    return e / (1.0 + e);
}

inline double logit(double p) noexcept { return std::log(p / (1.0 - p)); }

/// log(1 + e^eta) without overflow.
inline double log1p_exp(double eta) noexcept
{
    return eta > 0 ? eta + std::log1p(std::exp(-eta)) : std::log1p(std::exp(eta));
}

/// Binomial-count form of a 0/1 design: identical rows are merged, carrying
/// the number of trials and successes. The likelihood is unchanged.
struct CompressedDesign {
    std::size_t cols = 0;
    std::vector<double> x;        // unique rows, row-major
    std::vector<double> trials;
    std::vector<double> successes;
    std::vector<std::uint8_t> fixed;
    double n_obs = 0;

    std::size_t rows() const noexcept { return trials.size(); }
    const double* row(std::size_t r) const { return x.data() + r * cols; }
};

inline CompressedDesign compress(const DesignBlock& d)
{
    if (d.rows() == 0 || d.cols() == 0) throw InputError("design is empty");
    if (d.response.size() != d.rows()) throw InputError("design has no response");
    for (double v : d.values)
        if (!std::isfinite(v)) throw InputError("design contains a non-finite value");
    for (double y : d.response)
        if (y != 0.0 && y != 1.0) throw InputError("response values must be 0 or 1");

    const std::size_t p = d.cols();
    std::vector<std::size_t> order(d.rows());
    std::iota(order.begin(), order.end(), std::size_t{0});
    auto less = [&](std::size_t a, std::size_t b) {
        const double* ra = d.row(a);
        const double* rb = d.row(b);
        for (std::size_t c = 0; c < p; ++c)
            if (ra[c] != rb[c]) return ra[c] < rb[c];
        return a < b;
    };
    std::sort(order.begin(), order.end(), less);

    CompressedDesign out;
    out.cols = p;
    out.fixed = d.fixed;
    out.n_obs = static_cast<double>(d.rows());
    for (std::size_t k = 0; k < order.size(); ++k) {
        const double* r = d.row(order[k]);
        const bool same = k > 0 && std::equal(r, r + p, d.row(order[k - 1]));
        if (!same) {
            out.x.insert(out.x.end(), r, r + p);
            out.trials.push_back(0.0);
            out.successes.push_back(0.0);
        }
        out.trials.back() += 1.0;
        out.successes.back() += d.response[order[k]];
    }
    return out;
}

namespace detail {

inline double loglik(const CompressedDesign& d, const std::vector<double>& eta)
{
    double ll = 0.0;
    for (std::size_t r = 0; r < d.rows(); ++r) ll += d.successes[r] * eta[r] - d.trials[r] * log1p_exp(eta[r]);
    return ll;
}

inline std::vector<double> linear_predictor(const CompressedDesign& d, const std::vector<double>& beta)
{
    std::vector<double> eta(d.rows(), 0.0);
    for (std::size_t r = 0; r < d.rows(); ++r) {
        const double* x = d.row(r);
        double s = 0.0;
        for (std::size_t c = 0; c < d.cols; ++c) s += x[c] * beta[c];
        eta[r] = s;
    }
    return eta;
}

// Per-column scale: population standard deviation for penalized columns when
// standardizing, 1 otherwise (and for constant columns).
inline std::vector<double> column_scales(const CompressedDesign& d, bool standardize)
{
    std::vector<double> s(d.cols, 1.0);
    if (!standardize) return s;
    for (std::size_t c = 0; c < d.cols; ++c) {
        if (d.fixed[c]) continue;
        double m1 = 0.0, m2 = 0.0;
        for (std::size_t r = 0; r < d.rows(); ++r) {
            const double v = d.row(r)[c];
            m1 += d.trials[r] * v;
            m2 += d.trials[r] * v * v;
        }
        m1 /= d.n_obs;
        m2 /= d.n_obs;
        const double var = m2 - m1 * m1;
        if (var > 1e-24) s[c] = std::sqrt(var);
    }
    return s;
}

inline double soft_threshold(double z, double g) noexcept
{
    if (z > g) return z - g;
    if (z < -g) return z + g;
    return 0.0;
}

}  // namespace detail

/// Gradient of the log-likelihood with respect to each coefficient.
inline std::vector<double> loglik_gradient(const CompressedDesign& d, const std::vector<double>& beta)
{
    auto eta = detail::linear_predictor(d, beta);
    std::vector<double> g(d.cols, 0.0);
    for (std::size_t r = 0; r < d.rows(); ++r) {
        const double res = d.successes[r] - d.trials[r] * inv_logit(eta[r]);
        const double* x = d.row(r);
        for (std::size_t c = 0; c < d.cols; ++c) g[c] += x[c] * res;
    }
    return g;
}

inline double loglik(const CompressedDesign& d, const std::vector<double>& beta)
{
    return detail::loglik(d, detail::linear_predictor(d, beta));
}

/// L1-penalized logistic regression by IRLS with cyclic coordinate descent.
///
/// Minimises -loglik/N + lambda * sum_j |s_j beta_j| over penalized columns,
/// where s_j is the column scale (standard deviation when standardizing).
/// Fixed columns are neither penalized nor scaled. Coefficients are kept in
/// [-coef_cap, coef_cap]; hitting the bound is reported as separation. Each
/// outer step is backtracked so the objective never increases.
inline LogisticFit fit_logistic_l1(const CompressedDesign& d, double lambda, const SolverOptions& opt = {},
                                   std::optional<std::vector<double>> start = std::nullopt)
{
    if (!(lambda >= 0) || !std::isfinite(lambda)) throw InputError("lambda must be finite and non-negative");
    const std::size_t p = d.cols;
    const std::size_t R = d.rows();
    const double N = d.n_obs;
    const auto scale = detail::column_scales(d, opt.standardize);

    // work in scaled coordinates b_j = s_j * beta_j, x~_j = x_j / s_j
    std::vector<double> xs(d.x.size());
    for (std::size_t r = 0; r < R; ++r)
        for (std::size_t c = 0; c < p; ++c) xs[r * p + c] = d.row(r)[c] / scale[c];
    std::vector<double> pen(p);
    for (std::size_t c = 0; c < p; ++c) pen[c] = d.fixed[c] ? 0.0 : lambda;
    std::vector<double> cap(p);
    for (std::size_t c = 0; c < p; ++c) cap[c] = opt.coef_cap * scale[c];

    std::vector<double> b(p, 0.0);
    if (start) {
        if (start->size() != p) throw InputError("warm start has wrong length");
        for (std::size_t c = 0; c < p; ++c) b[c] = std::clamp((*start)[c] * scale[c], -cap[c], cap[c]);
    }

    auto eta_of = [&](const std::vector<double>& coef) {
        std::vector<double> eta(R, 0.0);
        for (std::size_t r = 0; r < R; ++r) {
            double s = 0.0;
            for (std::size_t c = 0; c < p; ++c) s += xs[r * p + c] * coef[c];
            eta[r] = s;
        }
        return eta;
    };
    auto objective_of = [&](const std::vector<double>& coef, const std::vector<double>& eta) {
        double f = -detail::loglik(d, eta) / N;
        for (std::size_t c = 0; c < p; ++c) f += pen[c] * std::abs(coef[c]);
        return f;
    };

    LogisticFit fit;
    fit.lambda = lambda;
    fit.n_obs = static_cast<std::size_t>(N);
    std::vector<double> eta = eta_of(b);
    double f = objective_of(b, eta);

    std::vector<double> w(R), res(R), eta_new(R), xwx(p);
    for (std::size_t outer = 0; outer < opt.max_outer; ++outer) {
        fit.iterations = outer + 1;
        for (std::size_t r = 0; r < R; ++r) {
            const double pr = inv_logit(eta[r]);
            w[r] = d.trials[r] * std::max(pr * (1.0 - pr), 1e-12);
            res[r] = d.successes[r] - d.trials[r] * pr;
        }
        for (std::size_t c = 0; c < p; ++c) {
            double s = 0.0;
            for (std::size_t r = 0; r < R; ++r) s += w[r] * xs[r * p + c] * xs[r * p + c];
            xwx[c] = s / N;
        }

        // coordinate descent on the quadratic model around b
        std::vector<double> bn = b;
        eta_new = eta;
        bool inner_done = false;
        for (std::size_t inner = 0; inner < opt.max_inner; ++inner) {
            double max_change = 0.0;
            for (std::size_t c = 0; c < p; ++c) {
                if (xwx[c] <= 0.0) continue;
                double g = 0.0;
                for (std::size_t r = 0; r < R; ++r)
                    g += xs[r * p + c] * (res[r] - w[r] * (eta_new[r] - eta[r]));
                g = g / N + xwx[c] * bn[c];
                const double next = std::clamp(detail::soft_threshold(g, pen[c]) / xwx[c], -cap[c], cap[c]);
                const double delta = next - bn[c];
                if (delta != 0.0) {
                    for (std::size_t r = 0; r < R; ++r) eta_new[r] += xs[r * p + c] * delta;
                    bn[c] = next;
                    max_change = std::max(max_change, std::abs(delta) / scale[c]);
                }
            }
            if (max_change < opt.tolerance * 1e-2) {
                inner_done = true;
                break;
            }
        }
        if (!inner_done) fit.warnings.push_back("coordinate descent hit the inner iteration cap");

        // backtrack until the penalized objective does not increase
        double f_new = objective_of(bn, eta_new);
        std::vector<double> step(p);
        for (std::size_t c = 0; c < p; ++c) step[c] = bn[c] - b[c];
        double t = 1.0;
        for (int halving = 0; halving < 40 && f_new > f + 1e-15 * std::max(1.0, std::abs(f)); ++halving) {
            t *= 0.5;
            for (std::size_t c = 0; c < p; ++c) bn[c] = b[c] + t * step[c];
            eta_new = eta_of(bn);
            f_new = objective_of(bn, eta_new);
        }
        if (f_new > f) {  // no descent direction left at machine precision
            bn = b;
            eta_new = eta;
            f_new = f;
        }

        double max_change = 0.0;
        for (std::size_t c = 0; c < p; ++c) max_change = std::max(max_change, std::abs(bn[c] - b[c]) / scale[c]);
        b.swap(bn);
        eta.swap(eta_new);
        f = f_new;
        fit.objective_trace.push_back(f);
        if (max_change < opt.tolerance) {
            fit.converged = true;
            break;
        }
    }

    fit.coef.resize(p);
    for (std::size_t c = 0; c < p; ++c) {
        fit.coef[c] = b[c] / scale[c];
        if (std::abs(fit.coef[c]) >= opt.coef_cap * (1 - 1e-12)) fit.separation = true;
    }
    fit.loglik = detail::loglik(d, eta);
    fit.objective = f;
    if (fit.separation)
        fit.warnings.push_back("separation: coefficients capped at |beta| = " + std::to_string(opt.coef_cap));
    if (!fit.converged)
        fit.failure = "no convergence after " + std::to_string(opt.max_outer) + " outer iterations";
    return fit;
}

inline LogisticFit fit_logistic_l1(const DesignBlock& design, double lambda, const SolverOptions& opt = {})
{
    return fit_logistic_l1(compress(design), lambda, opt);
}

/// Largest KKT violation of an L1 fit in scaled coordinates. For penalized
/// column j with scaled gradient g_j = (dloglik/dbeta_j) / (N s_j): zero
/// coefficients need |g_j| <= lambda, non-zero ones need g_j = lambda sign(beta_j).
/// Fixed columns need g_j = 0. Capped coefficients are skipped.
inline double kkt_violation(const CompressedDesign& d, const LogisticFit& fit, const SolverOptions& opt = {})
{
    const auto scale = detail::column_scales(d, opt.standardize);
    const auto grad = loglik_gradient(d, fit.coef);
    double worst = 0.0;
    for (std::size_t c = 0; c < d.cols; ++c) {
        if (std::abs(fit.coef[c]) >= opt.coef_cap * (1 - 1e-12)) continue;
        const double g = grad[c] / (d.n_obs * scale[c]);
        double v;
        if (d.fixed[c]) v = std::abs(g);
        else if (fit.coef[c] == 0.0) v = std::max(0.0, std::abs(g) - fit.lambda);
        else v = std::abs(g - fit.lambda * (fit.coef[c] > 0 ? 1.0 : -1.0));
        worst = std::max(worst, v);
    }
    return worst;
}

inline std::size_t support_size(const std::vector<double>& coef)
{
    return static_cast<std::size_t>(std::count_if(coef.begin(), coef.end(), [](double v) { return v != 0.0; }));
}

/// BIC = -2 loglik + (non-zero coefficients) log N.
inline double bic(const LogisticFit& fit)
{
    return -2.0 * fit.loglik + static_cast<double>(support_size(fit.coef)) * std::log(static_cast<double>(fit.n_obs));
}

/// Smallest lambda at which every penalized coefficient is zero.
inline double lambda_max(const CompressedDesign& d, const SolverOptions& opt = {})
{
    std::vector<std::uint8_t> only_fixed = d.fixed;
    bool any_fixed = std::any_of(only_fixed.begin(), only_fixed.end(), [](auto f) { return f != 0; });
    std::vector<double> beta(d.cols, 0.0);
    if (any_fixed) {
        // null fit on the fixed columns: any lambda larger than every gradient keeps the rest at zero
        auto huge = fit_logistic_l1(d, 1e12, opt);
        beta = huge.coef;
    }
    const auto scale = detail::column_scales(d, opt.standardize);
    const auto grad = loglik_gradient(d, beta);
    double lmax = 0.0;
    for (std::size_t c = 0; c < d.cols; ++c)
        if (!d.fixed[c]) lmax = std::max(lmax, std::abs(grad[c]) / (d.n_obs * scale[c]));
    return lmax;
}

/// Geometric grid from lambda_max down to lambda_max * ratio, followed by 0.
inline std::vector<double> default_lambda_grid(const CompressedDesign& d, std::size_t count = 20, double ratio = 1e-3,
                                               const SolverOptions& opt = {})
{
    const double lmax = lambda_max(d, opt);
    std::vector<double> grid;
    if (lmax > 0) {
        for (std::size_t k = 0; k < count; ++k)
            grid.push_back(lmax * std::pow(ratio, static_cast<double>(k) / static_cast<double>(count - 1)));
    }
    grid.push_back(0.0);
    return grid;
}

struct LambdaSelection {
    double lambda = 0.0;
    std::vector<double> grid;
    std::vector<double> bic;
};

/// Grid value minimising BIC; ties go to the larger lambda.
inline LambdaSelection select_lambda(const CompressedDesign& d, std::vector<double> grid, const SolverOptions& opt = {})
{
    if (grid.empty()) throw SpecError("lambda grid is empty");
    std::sort(grid.begin(), grid.end(), std::greater<>());
    LambdaSelection sel;
    sel.grid = grid;
    double best = std::numeric_limits<double>::infinity();
    for (double lambda : grid) {
        const double b = bic(fit_logistic_l1(d, lambda, opt));
        sel.bic.push_back(b);
        // strictly better only: equal BIC keeps the earlier, larger lambda
        if (!std::isfinite(best) || b < best - 1e-9 * std::max(1.0, std::abs(best))) {
            best = b;
            sel.lambda = lambda;
        }
    }
    return sel;
}

inline LambdaSelection select_lambda(const DesignBlock& design, std::vector<double> grid, const SolverOptions& opt = {})
{
    return select_lambda(compress(design), std::move(grid), opt);
}

/// Independent Gaussian prior per coefficient.
struct PriorSpec {
    std::vector<double> mean;
    std::vector<double> precision;

    void validate(std::size_t cols) const
    {
        if (mean.size() != cols || precision.size() != cols)
            throw SpecError("prior has " + std::to_string(mean.size()) + " means and " +
                            std::to_string(precision.size()) + " precisions for " + std::to_string(cols) + " columns");
        for (double v : precision)
            if (!(v >= 0) || !std::isfinite(v)) throw SpecError("prior precisions must be finite and non-negative");
        for (double v : mean)
            if (!std::isfinite(v)) throw SpecError("prior means must be finite");
    }

    static PriorSpec flat(std::size_t cols) { return {std::vector<double>(cols, 0.0), std::vector<double>(cols, 0.0)}; }
};

/// Posterior mode under a Gaussian prior: maximises
/// loglik - 1/2 sum_j precision_j (beta_j - mean_j)^2 by damped Newton steps.
inline LogisticFit fit_map(const CompressedDesign& d, const PriorSpec& prior, const SolverOptions& opt = {})
{
    prior.validate(d.cols);
    const std::size_t p = d.cols;
    const std::size_t R = d.rows();
    auto objective = [&](const std::vector<double>& beta) {
        double f = loglik(d, beta);
        for (std::size_t c = 0; c < p; ++c) f -= 0.5 * prior.precision[c] * (beta[c] - prior.mean[c]) * (beta[c] - prior.mean[c]);
        return f;
    };

    std::vector<double> beta(p, 0.0);
    LogisticFit fit;
    fit.n_obs = static_cast<std::size_t>(d.n_obs);
    double f = objective(beta);
    for (std::size_t it = 0; it < opt.max_outer; ++it) {
        fit.iterations = it + 1;
        const auto eta = detail::linear_predictor(d, beta);
        Eigen::MatrixXd H = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p));
        Eigen::VectorXd g = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p));
        for (std::size_t r = 0; r < R; ++r) {
            const double pr = inv_logit(eta[r]);
            const double w = d.trials[r] * pr * (1.0 - pr);
            const double res = d.successes[r] - d.trials[r] * pr;
            const double* x = d.row(r);
            for (std::size_t a = 0; a < p; ++a) {
                g(Eigen::Index(a)) += x[a] * res;
                for (std::size_t b = 0; b <= a; ++b) H(Eigen::Index(a), Eigen::Index(b)) += w * x[a] * x[b];
            }
        }
        for (std::size_t a = 0; a < p; ++a) {
            for (std::size_t b = 0; b < a; ++b) H(Eigen::Index(b), Eigen::Index(a)) = H(Eigen::Index(a), Eigen::Index(b));
            H(Eigen::Index(a), Eigen::Index(a)) += prior.precision[a] + 1e-12;
            g(Eigen::Index(a)) -= prior.precision[a] * (beta[a] - prior.mean[a]);
        }
        Eigen::VectorXd step = H.ldlt().solve(g);
        std::vector<double> next(p);
        double t = 1.0, f_next = -std::numeric_limits<double>::infinity();
        for (int halving = 0; halving < 40; ++halving) {
            for (std::size_t c = 0; c < p; ++c)
                next[c] = std::clamp(beta[c] + t * step(Eigen::Index(c)), -opt.coef_cap, opt.coef_cap);
            f_next = objective(next);
            if (f_next >= f - 1e-15 * std::max(1.0, std::abs(f))) break;
            t *= 0.5;
        }
        double change = 0.0;
        for (std::size_t c = 0; c < p; ++c) change = std::max(change, std::abs(next[c] - beta[c]));
        if (f_next < f) {  // no ascent left at machine precision
            fit.converged = true;
            break;
        }
        beta = next;
        f = f_next;
        fit.objective_trace.push_back(-f / d.n_obs);
        if (change < opt.tolerance * 1e-2) {
            fit.converged = true;
            break;
        }
    }
    fit.coef = beta;
    fit.loglik = loglik(d, beta);
    fit.objective = -f / d.n_obs;
    for (double v : beta)
        if (std::abs(v) >= opt.coef_cap * (1 - 1e-12)) fit.separation = true;
    if (fit.separation)
        fit.warnings.push_back("separation: coefficients capped at |beta| = " + std::to_string(opt.coef_cap));
    if (!fit.converged)
        fit.failure = "no convergence after " + std::to_string(opt.max_outer) + " Newton iterations";
    return fit;
}

inline LogisticFit fit_map(const DesignBlock& design, const PriorSpec& prior, const SolverOptions& opt = {})
{
    return fit_map(compress(design), prior, opt);
}

/// Inverse observed information at beta, restricted to `columns`. Used for
/// Wald statistics of unpenalized fits.
inline Eigen::MatrixXd covariance(const CompressedDesign& d, const std::vector<double>& beta,
                                  const std::vector<std::size_t>& columns)
{
    const auto q = static_cast<Eigen::Index>(columns.size());
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(q, q);
    const auto eta = detail::linear_predictor(d, beta);
    for (std::size_t r = 0; r < d.rows(); ++r) {
        const double pr = inv_logit(eta[r]);
        const double w = d.trials[r] * pr * (1.0 - pr);
        const double* x = d.row(r);
        for (Eigen::Index a = 0; a < q; ++a)
            for (Eigen::Index b = 0; b < q; ++b) H(a, b) += w * x[columns[std::size_t(a)]] * x[columns[std::size_t(b)]];
    }
    return H.completeOrthogonalDecomposition().pseudoInverse();
}

}  // namespace dnr

#endif  // DNR_LOGISTIC_HPP
