#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace comemnet::cli {

struct SynthArgs {
    int periods = 3;
    int nodes = 40;
    int growth = 10;
    double drift = 0.1;
    int days = 7;
    std::uint64_t seed = 7;
    std::string out = "synth_data";
};

struct IngestArgs {
    std::string manifest;
    std::string out; // empty: print the summary only
    double max_missing_rate = 0.10;
    double adjacency_delta = 100.0;
    double adjacency_epsilon = 1.0;
    std::optional<double> post_mile_max;
};

struct TrainArgs {
    std::string manifest;
    std::string config;  // optional JSON file with TrainConfig keys
    std::string variant = "comemnet";
    std::string out = "runs";
    std::optional<std::uint64_t> seed;
    bool forgetting = false;
    std::optional<double> post_mile_max;
};

struct SweepArgs {
    TrainArgs base;
    std::string param; // rho | K
    std::vector<std::string> values;
    int parallel = 1;
};

struct ReportArgs {
    std::string run_dir;
    std::string out; // empty: <run_dir>/report
};

int cmd_synth(const SynthArgs& args);
int cmd_ingest(const IngestArgs& args);
int cmd_train(const TrainArgs& args);
int cmd_sweep(const SweepArgs& args);
int cmd_report(const ReportArgs& args);

} // namespace comemnet::cli
