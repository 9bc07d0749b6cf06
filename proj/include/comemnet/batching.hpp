#pragma once

#include <string>
#include <vector>

#include "comemnet/backbone.hpp"
#include "comemnet/dataset.hpp"

namespace comemnet {

// Positional flow columns for the given sensor ids within one period.
std::vector<int> columns_for(const PeriodGraph& graph, const std::vector<std::string>& ids);

// Flattened window-major batch over the given windows × nodes. Inputs are
// z-scored with the period's train statistics; tod/dow taken at the last
// historical step of each window.
BatchInputs build_batch_inputs(const PeriodDataset& ds, const std::vector<int>& node_cols,
                               const std::vector<int>& node_slots, const std::vector<int>& starts,
                               int t_h);

// Matching targets, rows aligned with build_batch_inputs.
Matrix build_batch_targets(const PeriodDataset& ds, const std::vector<int>& node_cols,
                           const std::vector<int>& starts, int t_h, int t_f, bool normalized);

inline double normalize_value(const PeriodDataset& ds, double v) {
    return (v - ds.norm_mean) / ds.norm_std;
}
inline double denormalize_value(const PeriodDataset& ds, double v) {
    return v * ds.norm_std + ds.norm_mean;
}

} // namespace comemnet
