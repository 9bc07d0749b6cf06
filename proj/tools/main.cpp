#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "comemnet/errors.hpp"
#include "commands.hpp"

namespace cli = comemnet::cli;

int main(int argc, char** argv) {
    CLI::App app{"continual traffic forecasting pipeline"};
    app.require_subcommand(1);

    cli::SynthArgs synth;
    auto* s = app.add_subcommand("synth", "generate a synthetic expanding-network dataset");
    s->add_option("--periods", synth.periods, "number of periods")->check(CLI::PositiveNumber);
    s->add_option("--nodes", synth.nodes, "nodes in the first period")->check(CLI::PositiveNumber);
    s->add_option("--growth", synth.growth, "nodes added per period")
        ->check(CLI::NonNegativeNumber);
    s->add_option("--drift", synth.drift, "fraction of old nodes that drift each period")
        ->check(CLI::Range(0.0, 1.0));
    s->add_option("--days", synth.days, "simulated days per period")->check(CLI::PositiveNumber);
    s->add_option("--seed", synth.seed, "generator seed");
    s->add_option("--out", synth.out, "output dataset directory");

    cli::IngestArgs ingest;
    auto* i = app.add_subcommand("ingest", "load, clean and summarize a dataset manifest");
    i->add_option("manifest", ingest.manifest, "path to manifest.json")->required();
    i->add_option("--out", ingest.out, "directory for ingest_summary.json");
    i->add_option("--max-missing-rate", ingest.max_missing_rate,
                  "drop sensors missing more than this fraction")
        ->check(CLI::Range(0.0, 1.0));
    i->add_option("--adjacency-delta", ingest.adjacency_delta, "gaussian kernel width (miles)");
    i->add_option("--adjacency-epsilon", ingest.adjacency_epsilon,
                  "zero out edges beyond this distance (miles)");
    i->add_option("--post-mile-max", ingest.post_mile_max,
                  "keep only sensors with post-mile below this value");

    auto add_train_options = [](CLI::App* cmd, cli::TrainArgs& args) {
        cmd->add_option("manifest", args.manifest, "path to manifest.json")->required();
        cmd->add_option("--config", args.config, "JSON file with training config keys");
        cmd->add_option("--seed", args.seed, "override the config seed");
        cmd->add_option("--out", args.out, "parent directory for run output");
        cmd->add_option("--variant", args.variant,
                        "comemnet | static | retrained | expansible, with optional "
                        "_no_increase/_no_replay/_no_tmrb/_random_select/_no_update suffixes");
        cmd->add_flag("--forgetting", args.forgetting,
                      "re-evaluate earlier periods after each period");
        cmd->add_option("--post-mile-max", args.post_mile_max,
                        "keep only sensors with post-mile below this value");
    };

    cli::TrainArgs train;
    auto* t = app.add_subcommand("train", "run the continual training protocol");
    add_train_options(t, train);

    cli::SweepArgs sweep;
    auto* w = app.add_subcommand("sweep", "train once per value of rho or K");
    add_train_options(w, sweep.base);
    w->add_option("--param", sweep.param, "rho | K")->required();
    w->add_option("--values", sweep.values, "comma-separated values")
        ->required()
        ->delimiter(',');
    w->add_option("--parallel", sweep.parallel, "independent runs in flight")
        ->check(CLI::PositiveNumber);

    cli::ReportArgs report;
    auto* r = app.add_subcommand("report", "render CSV tables and SVG plots for a run");
    r->add_option("run_dir", report.run_dir, "run directory written by train")->required();
    r->add_option("--out", report.out, "output directory (default: <run_dir>/report)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2; // help/version exit clean, anything else is usage
    }

    try {
        if (*s) return cli::cmd_synth(synth);
        if (*i) return cli::cmd_ingest(ingest);
        if (*t) return cli::cmd_train(train);
        if (*w) return cli::cmd_sweep(sweep);
        if (*r) return cli::cmd_report(report);
    } catch (const comemnet::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
