#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "comemnet/branches.hpp"
#include "comemnet/dataset.hpp"
#include "comemnet/evaluation.hpp"
#include "comemnet/memory_buffer.hpp"
#include "comemnet/sampler.hpp"

namespace comemnet {

struct TrainConfig {
    // window and architecture sizes
    int t_h = 12;
    int t_f = 12;
    int n_layers = 3;
    int h_dim = 64;
    int e_n = 32;
    int d_d = 16;
    int d_w = 16;

    // optimization
    int batch_size = 128; // windows per batch (each window contributes every node row)
    double lr = 0.01;
    double weight_decay = 0.0;
    int epochs = 50;
    double lr_decay = 0.5; // applied after patience/2 non-improving epochs
    int patience = 10;     // early stop after this many non-improving epochs
    double beta = 0.99;    // EMA momentum of the target branch
    int ema_every_steps = 1;

    // drift sampler
    double rho = 0.05;
    std::string sampler_mode = "paper"; // paper | cdf_w1
    int n_bins = 10;
    std::vector<double> sampler_c; // per-bin weights; empty = all ones
    int sampler_batches = 4;
    int sampler_batch_windows = 8;

    // temporal memory
    int k = 12;

    // evaluation and desk-scale caps (0 = uncapped)
    double mape_threshold = 1.0;
    int max_train_batches_per_epoch = 0;
    int max_eval_windows = 0;

    // protocol
    std::uint64_t seed = 1;
    bool retrained_cumulative = true; // retrained paradigm pools all periods up to τ

    BackboneConfig backbone() const;
    EvalOptions eval_options() const;
    void validate() const;

    // unknown keys are an error: a silent typo would quietly change a run
    static TrainConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
};

struct PeriodSummary {
    std::string period;
    int nodes_total = 0;
    int nodes_trained = 0; // union of per-epoch training subsets
    int epochs_run = 0;
    double best_val_mae = 0.0; // original units, full node set
    double final_lr = 0.0;
    std::vector<SamplerReport> sampler_reports; // one per epoch when the sampler ran
};

struct RunState {
    std::string run_id;
    std::string variant;
    DualBranchModel model;
    TemporalMemoryBuffer buffer;
    std::vector<PeriodSummary> summaries;
    std::vector<MetricRow> metrics;          // per-period test rows
    std::vector<ForgettingCell> forgetting;  // filled when requested
};

std::string make_run_id(const VariantSpec& spec, const TrainConfig& cfg);

// One period of the continual loop: node growth, per-epoch subset selection,
// gradient steps with the memory prior, EMA, early stopping on full-set
// validation MAE, best-checkpoint restore, buffer commit.
PeriodSummary train_period(DualBranchModel& model, TemporalMemoryBuffer& buffer,
                           const IngestResult& data, int tau, const TrainConfig& cfg,
                           const VariantSpec& spec, Rng& node_rng, Rng& select_rng);

// Full protocol for one variant over all periods, including per-period test
// metrics and (optionally) the lower-triangular forgetting matrix.
RunState run_variant(const VariantSpec& spec, const IngestResult& data, const TrainConfig& cfg,
                     bool forgetting = false);

// The primary pipeline: run_variant with the comemnet paradigm, no ablations.
RunState run_continual(const IngestResult& data, const TrainConfig& cfg,
                       bool forgetting = false);

} // namespace comemnet
