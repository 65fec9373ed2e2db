// Apache License, Version 2.0, refer to LICENSE.txt

// accrual: forecast additional unique participants from first-period daily
// counts. Run `accrual --help` for the subcommands.

#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "accrual/app.hpp"

namespace {

using accrual::RunConfig;

struct RawFlags {
    std::string horizons;
    std::string lambda_grid;
    std::string alpha = "2";
    std::string beta = "50";
    double lambda = 10.0;
    std::int64_t n0 = 0;
};

const std::map<std::string, accrual::OutputFormat> kFormats{{"json", accrual::OutputFormat::json},
                                                            {"csv", accrual::OutputFormat::csv}};

void add_common(CLI::App* sub, RunConfig& cfg) {
    sub->add_option("--d", cfg.d, "First-period length in days")->capture_default_str();
    sub->add_option("--seed", cfg.seed, "Seed for all randomness")->capture_default_str();
    sub->add_option("--format", cfg.format, "Report format: json or csv")
        ->transform(CLI::CheckedTransformer(kFormats, CLI::ignore_case))
        ->default_str("json");
    sub->add_option("--out", cfg.out, "Write the report here instead of stdout");
}

void add_model(CLI::App* sub, RunConfig& cfg) {
    sub->add_option("--input", cfg.input, "Daily counts CSV (day,count)");
    sub->add_option("--draws", cfg.n_draws, "Posterior draws")->capture_default_str();
    sub->add_option("--workers", cfg.workers, "Worker threads")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
    RunConfig cfg;
    RawFlags raw;
    CLI::App app{"Forecast accrual of new unique participants with a censored Beta-Geometric model"};
    app.require_subcommand(1);

    auto* fc = app.add_subcommand("forecast", "Posterior-predictive forecast for one experiment");
    add_common(fc, cfg);
    add_model(fc, cfg);
    fc->add_option("--horizons", raw.horizons, "Comma-separated days after the first period")
        ->default_str("7,14,21,28");
    auto* fc_lambda = fc->add_option("--lambda", raw.lambda, "Plug-in multiplier for n0")->default_str("10");
    auto* fc_n0 = fc->add_option("--n0", raw.n0, "Known number of first-period non-participants");
    fc_lambda->excludes(fc_n0);
    fc->add_flag("--emit-draws", cfg.emit_draws, "Include per-draw weekly curves");

    auto* sw = app.add_subcommand("sweep-lambda", "Forecast at one horizon for each lambda in a grid");
    add_common(sw, cfg);
    add_model(sw, cfg);
    sw->add_option("--lambda-grid", raw.lambda_grid, "a:b[:step] or comma list")->default_str("1:30");
    sw->add_option("--sweep-horizon", cfg.sweep_horizon, "Horizon in days")->capture_default_str();

    auto* be = app.add_subcommand("batch-eval", "Score the Bayesian and log-linear predictors on a corpus");
    add_common(be, cfg);
    be->add_option("--corpus", cfg.corpus, "Directory of <experiment_id>.csv files")->required();
    be->add_option("--truth", cfg.truth, "CSV experiment_id,week,actual_new")->required();
    be->add_option("--lambda", raw.lambda, "Plug-in multiplier for n0")->default_str("10");
    be->add_option("--draws", cfg.n_draws, "Posterior draws per experiment")->capture_default_str();
    be->add_option("--workers", cfg.workers, "Worker threads")->capture_default_str();

    auto* si = app.add_subcommand("simulate", "Simulate a Beta-Geometric experiment or corpus");
    add_common(si, cfg);
    si->add_option("--alpha", raw.alpha, "alpha, or lo:hi drawn log-uniformly per experiment")
        ->capture_default_str();
    si->add_option("--beta", raw.beta, "beta, or lo:hi drawn log-uniformly per experiment")
        ->capture_default_str();
    si->add_option("--n", cfg.population, "Population size")->capture_default_str();
    si->add_option("--total-days", cfg.total_days, "Days simulated, first period included")
        ->capture_default_str();
    si->add_option("--experiments", cfg.experiments, "Write a corpus of this many experiments to --out")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cout << accrual::error_report("request", e.what());
        return accrual::exit_code_for(accrual::ErrorKind::request);
    }

    try {
        if (app.got_subcommand(fc)) {
            cfg.command = accrual::Command::forecast;
            if (!raw.horizons.empty()) cfg.horizons = accrual::parse_horizons(raw.horizons);
            if (*fc_n0)
                cfg.n0 = raw.n0;
            else
                cfg.lambda = raw.lambda;
        } else if (app.got_subcommand(sw)) {
            cfg.command = accrual::Command::sweep_lambda;
            cfg.lambda_grid = accrual::parse_lambda_grid(raw.lambda_grid.empty() ? "1:30" : raw.lambda_grid);
        } else if (app.got_subcommand(be)) {
            cfg.command = accrual::Command::batch_eval;
            cfg.lambda = raw.lambda;
        } else {
            cfg.command = accrual::Command::simulate;
            cfg.alpha = accrual::parse_value_range(raw.alpha);
            cfg.beta = accrual::parse_value_range(raw.beta);
        }
    } catch (const accrual::Error& e) {
        std::cout << accrual::error_report(accrual::to_string(e.kind()), e.what());
        return accrual::exit_code_for(e.kind());
    }

    const auto result = accrual::run(cfg);
    std::cout << result.output;
    return result.exit_code;
}
