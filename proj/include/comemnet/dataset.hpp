#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "comemnet/matrix.hpp"

namespace comemnet {

constexpr int k_tod_slots = 288; // 24h at 5-minute resolution
constexpr int k_dow_slots = 7;

struct PeriodGraph {
    std::string name;
    std::vector<std::string> sensor_ids; // global IDs, order fixed within the period
    std::vector<std::pair<int, int>> edges;
    Matrix adjacency; // symmetric, zero diagonal, entries in [0,1]
};

// V grows monotonically: every sensor of period τ−1 appears in period τ,
// and shared sensors keep their positional index (new ones are appended).
struct ExpandingNetwork {
    std::vector<PeriodGraph> periods;
};

struct SplitRange {
    int begin = 0;
    int end = 0; // half-open
    int length() const { return end - begin; }
};

struct PeriodDataset {
    std::string name;
    Matrix flow; // T×N, original units (vehicles per interval)
    std::vector<int> tod_index;
    std::vector<int> dow_index;
    SplitRange train, val, test;
    // z-score over the train range, shared by all sensors of the period
    double norm_mean = 0.0;
    double norm_std = 1.0;
};

struct ManifestEntry {
    std::string name;
    std::string flow_file;
    std::string sensors_file;
    std::string metadata_file;
    int interval_minutes = 5;
    int start_dow = 0;  // 0 = Monday
    int start_slot = 0; // time-of-day slot of row 0
};

struct DatasetManifest {
    std::vector<ManifestEntry> entries;
    static DatasetManifest load(const std::string& path); // paths resolved against the manifest dir
};

struct IngestOptions {
    double max_missing_rate = 0.10;
    double adjacency_delta = 100.0;
    double adjacency_epsilon = 1.0;
    std::optional<double> post_mile_max; // e.g. 100 to reproduce the regional curation
};

// Raw per-sensor series use NaN as the missing marker.
struct CleanResult {
    Matrix flow; // columns of dropped sensors removed
    std::vector<std::string> kept_ids;
    std::vector<std::string> dropped_ids;
};
CleanResult filter_and_interpolate(const Matrix& raw, const std::vector<std::string>& ids,
                                   double max_missing_rate);

// Suffix-intersection closure: a sensor survives period τ only if it appears
// in every later period, which restores monotone expansion.
std::vector<std::vector<std::string>> enforce_continuity(
    const std::vector<std::vector<std::string>>& sets_per_period);

Matrix build_adjacency(const std::vector<double>& post_miles, double delta, double epsilon);

SplitRange train_split(int total);
SplitRange val_split(int total);
SplitRange test_split(int total);

// Start indices t of windows [t, t+T_h) → [t+T_h, t+T_h+T_f) lying fully
// inside the split. Empty when the split is too short.
std::vector<int> window_starts(const SplitRange& split, int t_h, int t_f);

struct IngestResult {
    ExpandingNetwork network;
    std::vector<PeriodDataset> datasets;
};
IngestResult ingest_network(const DatasetManifest& manifest, const IngestOptions& options);

} // namespace comemnet
