#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "comemnet/matrix.hpp"

namespace comemnet {

// Desk-scale surrogate for yearly PeMS exports: monotone node growth plus
// optional re-drawn generators on a fraction of old nodes at each boundary.
struct SynthConfig {
    int periods = 3;
    int initial_nodes = 40;
    int growth = 10;
    double drift_fraction = 0.1;
    int days = 7; // timesteps per period = days × 288
    std::uint64_t seed = 7;
};

struct SynthPeriod {
    std::string name;
    std::vector<std::string> sensor_ids;
    std::vector<double> post_miles;
    Matrix flow; // T×N, no missing values
    std::vector<std::string> new_ids;     // nodes first seen this period
    std::vector<std::string> drifted_ids; // old nodes whose generator was re-drawn
};

struct SynthResult {
    SynthConfig config;
    std::vector<SynthPeriod> periods;
};

SynthResult synth_generate(const SynthConfig& config);

// Emits per-period flow/sensors/metadata CSVs plus manifest.json and
// synth_info.json into out_dir; the files round-trip through ingest_network.
void write_synth_dataset(const SynthResult& result, const std::string& out_dir);

} // namespace comemnet
