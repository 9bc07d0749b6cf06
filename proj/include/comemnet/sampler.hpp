#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "comemnet/backbone.hpp"
#include "comemnet/dataset.hpp"

namespace comemnet {

// Whole-matrix min/max scaling to [0,1]; a constant matrix maps to zeros.
Matrix normalize_features(const Matrix& f);

struct NodeHistogram {
    std::string node_id;
    std::vector<double> bins; // sum to 1, each >= 0
};

// Uniform bins [ (i−1)/n, i/n ) with the last bin closed at 1, counts
// divided by the value count so mass is conserved.
std::vector<double> histogram_bins(const double* values, int count, int n_bins);

enum class DriftMode { paper, cdf_w1 };
DriftMode drift_mode_from_string(const std::string& s);
std::string to_string(DriftMode mode);

// paper: Σᵢ cᵢ·|h_prev(i) − h_cur(i)|  (c defaults to all ones)
// cdf_w1: (1/n)·Σᵢ|CDF_prev(i) − CDF_cur(i)|, the exact 1-D Wasserstein-1
// on the shared [0,1] support.
double drift_score(const std::vector<double>& h_prev, const std::vector<double>& h_cur,
                   const std::vector<double>& c, DriftMode mode);

struct SamplerReport {
    std::string period;
    double rho = 0.0;
    int m = 0;                          // floor(ρ·N_τ)
    std::vector<std::string> scored_ids; // V_{τ−1}, in period order
    std::vector<double> scores;          // aligned with scored_ids
    std::vector<std::string> top_m;      // selection order: score desc, id asc
    std::vector<std::string> new_nodes;  // V_τ ∖ V_{τ−1}
    std::vector<std::string> selected;   // top_m ∪ new_nodes, ascending id
    std::vector<NodeHistogram> hist_prev;
    std::vector<NodeHistogram> hist_cur;

    nlohmann::json to_json() const;
};

// Top-M drifted old nodes (ties by ascending sensor id) unioned with every
// new node. scores must cover exactly prev_ids.
SamplerReport select_nodes(const std::vector<std::string>& prev_ids,
                           const std::vector<double>& scores,
                           const std::vector<std::string>& cur_ids, double rho);

// Mean of encode_features over `sample_batches` seeded train-split batches
// of `batch_windows` windows each, through the given (target) backbone with
// a constant memory prior. Pure read.
Matrix compute_period_features(BackboneNet& backbone, const PeriodDataset& ds,
                               const std::vector<std::string>& sensor_ids, const Matrix& h_prior,
                               int sample_batches, int batch_windows, std::uint64_t seed);

} // namespace comemnet
