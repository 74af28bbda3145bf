#ifndef DNR_COMMANDS_HPP
#define DNR_COMMANDS_HPP

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "config.hpp"
#include "estimator.hpp"
#include "io.hpp"
#include "metrics.hpp"
#include "simulate.hpp"
#include "synthetic.hpp"

namespace dnr {

/// Command-line settings. Unset values fall back to the config file, then to
/// the defaults of ExperimentConfig.
struct CommandOptions {
    std::string panel;
    std::string config;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> horizon;
    std::optional<std::string> smoother;
    std::optional<std::string> lambda;
    std::optional<std::size_t> split;
    std::optional<std::size_t> replicates;
    std::string covariate_forecast;
    // evaluate
    std::string forecast;
    bool incremental = false;
    // compare-smoothers
    std::string smoothers = "mean,median,min,max,mode,none";
    // generate
    std::string kind;
    std::size_t n = 20;
    std::size_t length = 50;
    bool directed = false;
    std::string formula;
    std::string vertex_formula;
    std::string theta;
    std::string psi;
    std::size_t burn_in = 20;
    std::size_t threads = 0;  // 0 = hardware concurrency
};

/// Output files keyed by name, written only after the whole command succeeded.
struct CommandResult {
    std::map<std::string, std::string> files;
    bool converged = true;
    std::vector<std::string> messages;
};

namespace detail {

/// Runs body(0..count-1) on a small thread pool. Results are stored by index,
/// so output order never depends on scheduling; the lowest-index exception wins.
template <class T, class F>
std::vector<T> parallel_map(std::size_t count, std::size_t threads, F body)
{
    std::vector<std::optional<T>> results(count);
    std::vector<std::exception_ptr> errors(count);
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, count);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                results[i].emplace(body(i));
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    std::vector<T> out;
    for (auto& r : results) out.push_back(std::move(*r));
    return out;
}

struct Context {
    ExperimentConfig cfg;
    NetworkPanel panel;     // full input panel
    NetworkPanel training;  // times 1..split, covariate series kept whole
    std::size_t split = 0;  // training length
};

inline ExperimentConfig resolve_config(const CommandOptions& o)
{
    if (o.config.empty()) throw SpecError("--config is required");
    auto cfg = parse_experiment_config(read_file(o.config));
    if (o.seed) cfg.seed = *o.seed;
    if (o.horizon) cfg.horizon = *o.horizon;
    if (o.smoother) cfg.smoother = parse_smoother(*o.smoother);
    if (o.lambda) cfg.lambda = parse_lambda(*o.lambda);
    if (o.split) cfg.split = *o.split;
    if (o.replicates) cfg.replicates = *o.replicates;
    if (cfg.replicates < 1) throw SpecError("replicates must be at least 1");
    return cfg;
}

inline NetworkPanel head(const NetworkPanel& p, std::size_t last)
{
    NetworkPanel out = p.slice(1, last);
    for (const auto& [name, series] : p.edge_covariates()) out.set_edge_covariate(name, series);
    for (const auto& [name, series] : p.vertex_covariates()) out.set_vertex_covariate(name, series);
    return out;
}

inline Context load_context(const CommandOptions& o, bool need_split = false)
{
    Context c;
    c.cfg = resolve_config(o);
    if (o.panel.empty()) throw SpecError("--panel is required");
    c.panel = load_panel(o.panel);
    if (!o.covariate_forecast.empty())
        c.panel = merge_covariate_forecast(c.panel, read_file(o.covariate_forecast), o.covariate_forecast);
    const std::size_t k = c.cfg.max_lag();
    const std::size_t T = c.panel.length();
    c.split = c.cfg.split ? c.cfg.split : (need_split ? T / 2 : T);
    if (c.split < k + 1)
        throw SpecError("split " + std::to_string(c.split) + " leaves fewer than " + std::to_string(k + 1) +
                        " training time points");
    if (c.split > T) throw SpecError("split " + std::to_string(c.split) + " is past the panel end " + std::to_string(T));
    if (need_split && c.split == T) throw SpecError("split leaves no holdout time points");
    c.training = head(c.panel, c.split);
    if (c.cfg.vertex && !c.panel.has_vertex_dynamics())
        throw SpecError("a vertex model needs a panel with an [activity] section");
    return c;
}

inline FitOptions fit_options(const ExperimentConfig& cfg)
{
    FitOptions f;
    f.lambda = cfg.lambda;
    return f;
}

inline FittedModel fit_model(const NetworkPanel& panel, const ExperimentConfig& cfg)
{
    if (cfg.vertex) return fit_dnrv(panel, *cfg.vertex, cfg.edge, fit_options(cfg));
    return fit_dnr(panel, cfg.edge, fit_options(cfg));
}

inline SimulationRun run_simulation(const NetworkPanel& panel, const FittedModel& m, const ExperimentConfig& cfg,
                                    SmootherKind smoother, std::size_t horizon, std::uint64_t seed)
{
    SimulationOptions opt;
    opt.horizon = horizon;
    opt.smoother = smoother;
    opt.smoothing_window = cfg.smoothing_window;
    opt.seed = seed;
    opt.keep_step_stats = false;
    return m.vertex_spec ? simulate_dynamic(panel, m, opt) : simulate_static(panel, m, opt);
}

inline double density(const NetworkPanel& p, std::size_t t)
{
    const std::size_t v = p.active_count(t);
    const std::size_t d = dyad_count(v, p.directed());
    return d ? double(p.graph(t).edge_count()) / double(d) : 0.0;
}

/// Share of the last `steps` time points with density strictly inside (0.01, 0.99).
inline double density_fraction(const NetworkPanel& p, std::size_t steps)
{
    if (steps == 0) return 1.0;
    std::size_t ok = 0;
    for (std::size_t t = p.length() - steps + 1; t <= p.length(); ++t) {
        const double d = density(p, t);
        if (d > 0.01 && d < 0.99) ++ok;
    }
    return double(ok) / double(steps);
}

inline std::string coefficient_csv(const FittedModel& m, std::uint64_t seed)
{
    CsvWriter csv(seed, {"block", "term", "value", "std_error", "z", "p_value", "lambda", "refit", "converged"});
    auto emit = [&](const std::string& block, const CoefficientBlock& b) {
        for (std::size_t c = 0; c < b.labels.size(); ++c) {
            const double se = b.std_errors[c];
            const double z = std::isfinite(se) && se > 0 ? b.values[c] / se : std::nan("");
            const double p = std::isfinite(z) ? std::erfc(std::abs(z) / std::sqrt(2.0)) : std::nan("");
            csv.row_begin();
            csv.cell(block).cell(b.labels[c]).cell(b.values[c]).cell(se).cell(z).cell(p).cell(b.lambda);
            csv.cell(std::string(b.refit ? "true" : "false")).cell(std::string(b.converged ? "true" : "false"));
            csv.row_end();
        }
    };
    if (m.psi) emit("vertex", *m.psi);
    emit("edge", m.theta);
    return csv.str();
}

inline std::string replicate_panel_name(std::size_t r, std::size_t count)
{
    return count == 1 ? "simulated.panel" : "simulated_r" + std::to_string(r + 1) + ".panel";
}

inline std::vector<SmootherKind> parse_smoother_list(const std::string& text)
{
    std::vector<SmootherKind> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        tok = trim(tok);
        if (tok.empty()) continue;
        auto k = parse_smoother(tok);
        if (std::find(out.begin(), out.end(), k) != out.end()) throw SpecError("smoother '" + tok + "' listed twice");
        out.push_back(k);
    }
    if (out.empty()) throw SpecError("no smoothers to compare");
    return out;
}

inline std::vector<double> parse_reals(const std::string& text, const std::string& what)
{
    std::vector<double> out;
    std::string s = text;
    std::replace(s.begin(), s.end(), ',', ' ');
    std::stringstream ss(s);
    std::string tok;
    while (ss >> tok) {
        double v = 0.0;
        auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (ec != std::errc{} || p != tok.data() + tok.size() || !std::isfinite(v))
            throw SpecError(what + ": '" + tok + "' is not a finite number");
        out.push_back(v);
    }
    return out;
}

inline void note_convergence(CommandResult& r, const FittedModel& m, const std::string& where)
{
    if (m.converged()) return;
    r.converged = false;
    std::string why = !m.theta.converged ? m.theta.failure : (m.psi ? m.psi->failure : std::string{});
    r.messages.push_back(where + ": fit did not converge" + (why.empty() ? "" : " (" + why + ")"));
}

}  // namespace detail

/// Fits the configured model on the training part of the panel.
inline CommandResult cmd_fit(const CommandOptions& o)
{
    auto c = detail::load_context(o);
    const auto m = detail::fit_model(c.training, c.cfg);
    CommandResult r;
    r.files["model.json"] = model_to_json(m);
    r.files["coefficients.csv"] = detail::coefficient_csv(m, c.cfg.seed);
    detail::note_convergence(r, m, "fit");
    return r;
}

/// Fits on the training part and simulates `horizon` steps past it, once per replicate.
inline CommandResult cmd_simulate(const CommandOptions& o)
{
    auto c = detail::load_context(o);
    const auto m = detail::fit_model(c.training, c.cfg);
    const auto& cfg = c.cfg;
    auto runs = detail::parallel_map<SimulationRun>(cfg.replicates, o.threads, [&](std::size_t rep) {
        return detail::run_simulation(c.training, m, cfg, cfg.smoother, cfg.horizon, derive_seed(cfg.seed, rep));
    });

    CommandResult r;
    r.files["model.json"] = model_to_json(m);
    CsvWriter csv(cfg.seed, {"replicate", "step", "active", "edges", "density", "expected_degree", "triangles",
                             "transitivity", "mean_probability"});
    for (std::size_t rep = 0; rep < runs.size(); ++rep) {
        const auto& run = runs[rep];
        r.files[detail::replicate_panel_name(rep, runs.size())] = format_panel(run.panel);
        for (std::size_t l = 1; l <= run.horizon; ++l) {
            const std::size_t t = c.training.length() + l;
            const auto& g = run.panel.graph(t);
            const auto gm = graph_metrics(g, TriangleMode::Symmetrized,
                                          run.panel.has_vertex_dynamics() ? run.panel.active_count(t) : 0);
            const auto& p = run.edge_probabilities[l - 1];
            double mean_p = 0.0;
            for (double v : p) mean_p += v / double(p.size());
            csv.row_begin();
            csv.cell(rep + 1).cell(l).cell(run.panel.active_count(t)).cell(g.edge_count());
            csv.cell(detail::density(run.panel, t)).cell(gm.expected_degree).cell(gm.triangles).cell(gm.transitivity);
            csv.cell(mean_p);
            csv.row_end();
        }
    }
    r.files["simulation.csv"] = csv.str();
    detail::note_convergence(r, m, "fit");
    return r;
}

namespace detail {

inline void emit_metric_rows(CsvWriter& csv, const std::string& replicate, const MetricReport& rep)
{
    for (const auto& s : rep.steps) {
        csv.row_begin();
        csv.cell(replicate).cell(std::to_string(s.step));
        csv.cell(s.confusion.accuracy).cell(s.confusion.misclassification).cell(s.confusion.precision);
        csv.cell(s.confusion.recall).cell(s.predicted.triangles).cell(s.truth.triangles).cell(s.d_triangles);
        csv.cell(s.predicted.transitivity).cell(s.truth.transitivity).cell(s.d_transitivity);
        csv.cell(s.predicted.expected_degree).cell(s.truth.expected_degree).cell(s.d_expected_degree);
        csv.row_end();
    }
    csv.row_begin();
    csv.cell(replicate).cell(std::string("mean"));
    csv.cell(rep.accuracy).cell(rep.misclassification).cell(rep.precision).cell(rep.recall);
    csv.cell(std::nan("")).cell(std::nan("")).cell(rep.d_triangles);
    csv.cell(std::nan("")).cell(std::nan("")).cell(rep.d_transitivity);
    csv.cell(rep.predicted_expected_degree).cell(rep.truth_expected_degree).cell(rep.d_expected_degree);
    csv.row_end();
}

inline nlohmann::json report_json(const MetricReport& rep)
{
    nlohmann::json j;
    j["accuracy"] = rep.accuracy;
    j["misclassification"] = rep.misclassification;
    j["precision"] = rep.precision;
    j["recall"] = rep.recall;
    j["abs_diff_triangles"] = rep.d_triangles;
    j["abs_diff_transitivity"] = rep.d_transitivity;
    j["abs_diff_expected_degree"] = rep.d_expected_degree;
    j["predicted_expected_degree"] = rep.predicted_expected_degree;
    j["truth_expected_degree"] = rep.truth_expected_degree;
    return j;
}

inline std::vector<std::string> metric_columns()
{
    return {"replicate",   "step",           "accuracy",        "misclassification", "precision",
            "recall",      "triangles_pred", "triangles_true",  "abs_diff_triangles", "transitivity_pred",
            "transitivity_true", "abs_diff_transitivity", "expected_degree_pred", "expected_degree_true",
            "abs_diff_expected_degree"};
}

}  // namespace detail

/// Scores forecasts of the holdout part of the panel. Three sources: the
/// configured model simulated forward (default), a one-step-ahead forecast
/// refitted on all data up to each holdout time (incremental), or an external
/// forecast panel.
inline CommandResult cmd_evaluate(const CommandOptions& o)
{
    auto c = detail::load_context(o, true);
    const auto& cfg = c.cfg;
    const std::size_t T = c.panel.length(), H = T - c.split;
    CommandResult r;
    CsvWriter csv(cfg.seed, detail::metric_columns());
    nlohmann::json summary;
    summary["seed"] = cfg.seed;
    summary["split"] = c.split;
    summary["horizon"] = H;

    if (!o.forecast.empty()) {
        const auto forecast = load_panel(o.forecast);
        if (forecast.length() != H && forecast.length() != T)
            throw ValidationError("forecast panel has " + std::to_string(forecast.length()) + " time points; expected " +
                                  std::to_string(H) + " (holdout) or " + std::to_string(T) + " (full)");
        const auto rep = score_forecast(forecast, forecast.length() - H + 1, c.panel, c.split + 1, H);
        detail::emit_metric_rows(csv, "external", rep);
        summary["source"] = "external";
        summary["mean"] = detail::report_json(rep);
    } else if (o.incremental) {
        auto reports = detail::parallel_map<std::pair<MetricReport, FittedModel>>(
            H, o.threads, [&](std::size_t h) {
                const auto train = detail::head(c.panel, c.split + h);
                const auto m = detail::fit_model(train, cfg);
                const auto run = detail::run_simulation(train, m, cfg, cfg.smoother, 1, derive_seed(cfg.seed, h));
                return std::pair{score_forecast(run.panel, c.split + h + 1, c.panel, c.split + h + 1, 1), m};
            });
        MetricReport all;
        for (std::size_t h = 0; h < H; ++h) {
            auto s = reports[h].first.steps.front();
            s.step = h + 1;
            all.steps.push_back(s);
            detail::note_convergence(r, reports[h].second, "refit at time " + std::to_string(c.split + h));
        }
        summarize(all);
        detail::emit_metric_rows(csv, "incremental", all);
        summary["source"] = "incremental";
        summary["smoother"] = smoother_name(cfg.smoother);
        summary["mean"] = detail::report_json(all);
    } else {
        const auto m = detail::fit_model(c.training, cfg);
        detail::note_convergence(r, m, "fit");
        r.files["model.json"] = model_to_json(m);
        auto reports = detail::parallel_map<MetricReport>(cfg.replicates, o.threads, [&](std::size_t rep) {
            const auto run = detail::run_simulation(c.training, m, cfg, cfg.smoother, H, derive_seed(cfg.seed, rep));
            return score_forecast(run.panel, c.split + 1, c.panel, c.split + 1, H);
        });
        summary["replicates"] = nlohmann::json::array();
        for (std::size_t rep = 0; rep < reports.size(); ++rep) {
            detail::emit_metric_rows(csv, std::to_string(rep + 1), reports[rep]);
            summary["replicates"].push_back(detail::report_json(reports[rep]));
        }
        const auto mean = average_reports(reports);
        summary["source"] = "simulation";
        summary["smoother"] = smoother_name(cfg.smoother);
        summary["mean"] = detail::report_json(mean);
    }
    r.files["metrics.csv"] = csv.str();
    r.files["metrics.json"] = summary.dump(2) + "\n";
    return r;
}

namespace detail {

struct DriftRun {
    DriftSeries series;
    double density_fraction = 0.0;
};

inline DriftRun drift_run(const Context& c, const FittedModel& m, SmootherKind smoother, std::uint64_t seed,
                          std::size_t horizon)
{
    const auto run = run_simulation(c.training, m, c.cfg, smoother, horizon, seed);
    DriftOptions d;
    d.window = c.cfg.drift_window;
    d.first = c.training.length() + 1;
    if (d.window > d.first)
        throw SpecError("drift window " + std::to_string(d.window) + " is longer than the training panel plus one step");
    DriftRun out;
    out.series = drift_series(run.panel, m.edge_spec, d);
    out.density_fraction = density_fraction(run.panel, horizon);
    return out;
}

inline CommandResult drift_command(const CommandOptions& o, const std::vector<SmootherKind>& smoothers)
{
    auto c = detail::load_context(o);
    const auto& cfg = c.cfg;
    if (cfg.horizon == 0) throw SpecError("drift needs a horizon of at least 1");
    const auto m = fit_model(c.training, cfg);
    const std::size_t R = cfg.replicates, S = smoothers.size();
    // every smoother sees the same replicate seeds
    auto runs = parallel_map<DriftRun>(R * S, o.threads, [&](std::size_t job) {
        return drift_run(c, m, smoothers[job % S], derive_seed(cfg.seed, job / S), cfg.horizon);
    });

    CommandResult r;
    r.files["model.json"] = model_to_json(m);
    note_convergence(r, m, "fit");
    CsvWriter series(cfg.seed, {"replicate", "step", "smoother", "term", "value"});
    CsvWriter per_rep(cfg.seed, {"replicate", "smoother", "term", "drift", "slope", "density_fraction"});
    CsvWriter summary(cfg.seed, {"smoother", "term", "mean_drift", "mean_abs_slope", "mean_density_fraction"});
    for (std::size_t s = 0; s < S; ++s) {
        const auto& labels = runs[s].series.labels;
        std::vector<double> drift(labels.size(), 0.0), slope(labels.size(), 0.0);
        double frac = 0.0;
        for (std::size_t rep = 0; rep < R; ++rep) {
            const auto& d = runs[rep * S + s];
            if (!d.series.converged) {
                r.converged = false;
                r.messages.push_back(std::string("drift refit did not converge (") + smoother_name(smoothers[s]) +
                                     ", replicate " + std::to_string(rep + 1) + ")");
            }
            for (std::size_t step = 0; step < d.series.times.size(); ++step)
                for (std::size_t k = 0; k < labels.size(); ++k) {
                    series.row_begin();
                    series.cell(rep + 1).cell(step + 1).cell(std::string(smoother_name(smoothers[s])));
                    series.cell(labels[k]).cell(d.series.coefficients[step][k]);
                    series.row_end();
                }
            for (std::size_t k = 0; k < labels.size(); ++k) {
                per_rep.row_begin();
                per_rep.cell(rep + 1).cell(std::string(smoother_name(smoothers[s]))).cell(labels[k]);
                per_rep.cell(d.series.drift[k]).cell(d.series.slope[k]).cell(d.density_fraction);
                per_rep.row_end();
                drift[k] += d.series.drift[k] / double(R);
                slope[k] += std::abs(d.series.slope[k]) / double(R);
            }
            frac += d.density_fraction / double(R);
        }
        for (std::size_t k = 0; k < labels.size(); ++k) {
            summary.row_begin();
            summary.cell(std::string(smoother_name(smoothers[s]))).cell(labels[k]).cell(drift[k]).cell(slope[k]);
            summary.cell(frac);
            summary.row_end();
        }
    }
    r.files["drift.csv"] = series.str();
    r.files["drift_replicates.csv"] = per_rep.str();
    r.files["drift_summary.csv"] = summary.str();
    return r;
}

}  // namespace detail

/// Refit-coefficient drift over a simulated continuation with the configured smoother.
inline CommandResult cmd_drift(const CommandOptions& o)
{
    const auto cfg = detail::resolve_config(o);
    return detail::drift_command(o, {cfg.smoother});
}

/// Drift for several smoothers on shared replicate seeds.
inline CommandResult cmd_compare_smoothers(const CommandOptions& o)
{
    return detail::drift_command(o, detail::parse_smoother_list(o.smoothers));
}

/// Synthetic panels: dnr / dnrv from known coefficients, or the beach-like and
/// blog-like generators.
inline CommandResult cmd_generate(const CommandOptions& o)
{
    const std::uint64_t seed = o.seed.value_or(1);
    NetworkPanel panel;
    if (o.kind == "dnr") {
        DnrGenerator g;
        g.n = o.n;
        g.directed = o.directed;
        g.length = o.length;
        g.spec = parse_edge_formula(o.formula.empty() ? "edges + lag(1)" : o.formula);
        g.theta = detail::parse_reals(o.theta.empty() ? "-2 2.5" : o.theta, "--theta");
        g.burn_in = o.burn_in;
        g.seed = seed;
        if (!g.theta.empty()) g.initial_density = inv_logit(g.theta.front());
        panel = generate_dnr(g);
    } else if (o.kind == "dnrv") {
        DnrvGenerator g;
        g.n = o.n;
        g.directed = o.directed;
        g.length = o.length;
        g.vspec = parse_vertex_formula(o.vertex_formula.empty() ? "intercept + presence@lag(1)" : o.vertex_formula);
        g.psi = detail::parse_reals(o.psi.empty() ? "-1 2" : o.psi, "--psi");
        g.espec = parse_edge_formula(o.formula.empty() ? "edges + lag(1)" : o.formula);
        g.theta = detail::parse_reals(o.theta.empty() ? "-2 2.5" : o.theta, "--theta");
        g.burn_in = o.burn_in;
        g.seed = seed;
        panel = generate_dnrv(g);
    } else if (o.kind == "beach") {
        BeachGenerator g;
        g.length = o.length;
        g.forecast = o.horizon.value_or(0);
        g.seed = seed;
        panel = generate_beach_like(g);
    } else if (o.kind == "blog") {
        panel = generate_blog_like(o.length, seed);
    } else {
        throw SpecError("unknown generator kind '" + o.kind + "' (expected dnr|dnrv|beach|blog)");
    }
    CommandResult r;
    r.files["generated.panel"] = "# seed=" + std::to_string(seed) + "\n" + format_panel(panel);
    return r;
}

/// Writes every file of a result into `dir` (created if needed). Each file is
/// written to a temporary name and renamed, so readers never see partial files.
inline void write_outputs(const std::string& dir, const CommandResult& r)
{
    namespace fs = std::filesystem;
    const fs::path root = dir.empty() ? fs::path(".") : fs::path(dir);
    fs::create_directories(root);
    for (const auto& [name, content] : r.files) {
        const fs::path target = root / name, tmp = root / (name + ".tmp");
        {
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            if (!out) throw ValidationError("cannot write '" + tmp.string() + "'");
            out << content;
            if (!out) throw ValidationError("failed writing '" + tmp.string() + "'");
        }
        fs::rename(tmp, target);
    }
}

}  // namespace dnr

#endif  // DNR_COMMANDS_HPP
