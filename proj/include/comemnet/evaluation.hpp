#pragma once

#include <string>
#include <vector>

#include "comemnet/backbone.hpp"
#include "comemnet/branches.hpp"
#include "comemnet/dataset.hpp"

namespace comemnet {

// One CSV row of the run-level metrics file. `horizon` is step-3/step-6/
// step-12/avg-12; `metric` is MAE, RMSE or MAPE (percent, masked).
struct MetricRow {
    std::string run_id;
    std::string variant;
    std::string period;
    std::string horizon;
    std::string metric;
    double value = 0.0;
    int nodes_total = 0;
    int nodes_trained = 0;
};

// Training protocol plus architecture toggles. Paradigms change what is
// trained when; ablation flags remove pieces of the full pipeline and are
// only meaningful under the comemnet paradigm.
struct VariantSpec {
    std::string paradigm = "comemnet"; // comemnet | static | retrained | expansible
    bool no_increase = false;          // drop new nodes from the training subset
    bool no_replay = false;            // drop the drift-ranked old nodes
    bool no_tmrb = false;              // zero memory prior, no buffer updates
    bool random_select = false;        // uniform instead of Top-K memory rows
    bool no_update = false;            // skip the gate: H = H_a

    void validate() const; // unknown paradigm or flags on a non-comemnet paradigm
    std::string name() const;
    static VariantSpec from_name(const std::string& s);
};

struct HorizonStat {
    std::string horizon;
    double mae = 0.0;
    double rmse = 0.0;
    double mape = 0.0;        // percent
    bool mape_present = false; // false when every target fell under the mask
};

// Pooled point-horizon metrics (steps 3/6/12 where available) plus the
// all-step average, in the units of the supplied matrices.
std::vector<HorizonStat> horizon_stats(const std::vector<Matrix>& preds,
                                       const std::vector<Matrix>& truths,
                                       double mape_threshold);

struct EvalOptions {
    int batch_windows = 128;
    int max_eval_windows = 0; // 0 = every window; otherwise an even subsample
    double mape_threshold = 1.0;
};

// Forward the given nodes over the split's windows with a fixed memory
// prior, denormalize, and pool metrics. Read-only and deterministic.
std::vector<HorizonStat> evaluate_nodes(BackboneNet& backbone, const PeriodDataset& ds,
                                        const PeriodGraph& graph,
                                        const std::vector<std::string>& ids,
                                        const Matrix& h_prior, const SplitRange& split,
                                        const EvalOptions& opt);

// Memory context rebuilt per evaluation chunk the same way a training step
// builds it: the chunk's time features are blended into the stored state
// through the gate. Null weights feed h_prev to the backbone unchanged.
// The stored state itself is never written during evaluation.
struct MemoryContext {
    MemoryWeights* weights = nullptr;
    Matrix h_prev; // 1×D stored or running state
    int k = 1;
    bool gate = true; // false: the averaged current features alone
};

std::vector<HorizonStat> evaluate_nodes(BackboneNet& backbone, const PeriodDataset& ds,
                                        const PeriodGraph& graph,
                                        const std::vector<std::string>& ids,
                                        const MemoryContext& ctx, const SplitRange& split,
                                        const EvalOptions& opt);

// Node indices reachable from the seeds within two hops on the binary
// support of the adjacency (seeds included).
std::vector<int> two_hop_nodes(const Matrix& adjacency, const std::vector<int>& seeds);

struct ForgettingCell {
    int train_period = 0; // model state: just finished training this period
    int eval_period = 0;  // test split evaluated, eval_period <= train_period
    std::string train_label;
    std::string eval_label;
    double mae = 0.0;               // avg-horizon MAE, original units
    double backward_transfer = 0.0; // mae - diagonal mae of eval_period
};

std::string metrics_csv(const std::vector<MetricRow>& rows);
std::string forgetting_csv(const std::vector<ForgettingCell>& cells);

} // namespace comemnet
