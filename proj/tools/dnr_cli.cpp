// dnr: fit, simulate and evaluate lagged dynamic network regression models.
//
// Exit codes: 0 success, 2 invalid input or configuration, 3 a fit did not
// converge (outputs are still written, flagged in the model file).

#include <CLI11.hpp>

#include <iostream>
#include <string>

#include "dnr/commands.hpp"

namespace {

void add_common(CLI::App* cmd, dnr::CommandOptions& o)
{
    cmd->add_option("--panel", o.panel, "Panel file")->required();
    cmd->add_option("--config", o.config, "Model / experiment config file")->required();
    cmd->add_option("--out-dir", o.out_dir, "Output directory (default: config out_dir, else .)");
    cmd->add_option("--seed", o.seed, "RNG seed");
    cmd->add_option("--lambda", o.lambda, "Penalty: a value >= 0 or 'auto' (BIC)");
    cmd->add_option("--split", o.split, "Training length; later times are held out");
    cmd->add_option("--covariate-forecast", o.covariate_forecast, "Covariate values for times past the panel");
    cmd->add_option("--threads", o.threads, "Worker threads for replicates (0 = all cores)");
}

void add_simulation(CLI::App* cmd, dnr::CommandOptions& o)
{
    cmd->add_option("--horizon", o.horizon, "Number of simulated steps");
    cmd->add_option("--smoother", o.smoother, "mean|median|min|max|mode|none");
    cmd->add_option("--replicates", o.replicates, "Independent simulation replicates");
}

std::string output_dir(const dnr::CommandOptions& o)
{
    if (!o.out_dir.empty()) return o.out_dir;
    if (!o.config.empty()) {
        auto cfg = dnr::parse_experiment_config(dnr::read_file(o.config));
        if (!cfg.out_dir.empty()) return cfg.out_dir;
    }
    return ".";
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Lagged dynamic network regression: fitting, smoothed simulation, evaluation"};
    app.require_subcommand(1);
    dnr::CommandOptions o;

    auto* fit = app.add_subcommand("fit", "Fit the configured model on the training panel");
    add_common(fit, o);

    auto* sim = app.add_subcommand("simulate", "Fit, then simulate forward from the end of the training panel");
    add_common(sim, o);
    add_simulation(sim, o);

    auto* eval = app.add_subcommand("evaluate", "Score forecasts of the holdout part of the panel");
    add_common(eval, o);
    add_simulation(eval, o);
    eval->add_option("--forecast", o.forecast, "Score this external forecast panel instead of simulating");
    eval->add_flag("--incremental", o.incremental, "Refit on all data before each holdout time, predict one step");

    auto* drift = app.add_subcommand("drift", "Refit-coefficient drift over a simulated continuation");
    add_common(drift, o);
    add_simulation(drift, o);

    auto* cmp = app.add_subcommand("compare-smoothers", "Drift for several smoothers on shared seeds");
    add_common(cmp, o);
    add_simulation(cmp, o);
    cmp->add_option("--smoothers", o.smoothers, "Comma-separated smoother list")->capture_default_str();

    auto* gen = app.add_subcommand("generate", "Write a synthetic panel");
    gen->add_option("--kind", o.kind, "dnr|dnrv|beach|blog")->required();
    gen->add_option("--out-dir", o.out_dir, "Output directory");
    gen->add_option("--seed", o.seed, "RNG seed");
    gen->add_option("--n", o.n, "Vertices (dnr, dnrv)")->capture_default_str();
    gen->add_option("--length", o.length, "Time points")->capture_default_str();
    gen->add_flag("--directed", o.directed, "Directed graphs (dnr, dnrv)");
    gen->add_option("--formula", o.formula, "Edge formula (dnr, dnrv)");
    gen->add_option("--vertex-formula", o.vertex_formula, "Vertex formula (dnrv)");
    gen->add_option("--theta", o.theta, "Edge coefficients, in column order");
    gen->add_option("--psi", o.psi, "Vertex coefficients, in column order");
    gen->add_option("--burn-in", o.burn_in, "Discarded initial steps")->capture_default_str();
    gen->add_option("--horizon", o.horizon, "Extra days of covariates past the panel (beach)");

    CLI11_PARSE(app, argc, argv);

    try {
        dnr::CommandResult r;
        if (*fit) r = dnr::cmd_fit(o);
        else if (*sim) r = dnr::cmd_simulate(o);
        else if (*eval) r = dnr::cmd_evaluate(o);
        else if (*drift) r = dnr::cmd_drift(o);
        else if (*cmp) r = dnr::cmd_compare_smoothers(o);
        else r = dnr::cmd_generate(o);
        dnr::write_outputs(output_dir(o), r);
        for (const auto& m : r.messages) std::cerr << "warning: " << m << '\n';
        return r.converged ? 0 : 3;
    } catch (const dnr::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 1;
    }
}
