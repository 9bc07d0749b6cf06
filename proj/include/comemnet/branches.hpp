#pragma once

#include <functional>

#include "comemnet/backbone.hpp"
#include "comemnet/optimizer.hpp"

namespace comemnet {

// Gate weights of the temporal memory. They sit beside the backbone in each
// branch so the optimizer and the EMA treat them like every other parameter.
struct MemoryWeights {
    Param w;   // D×D
    Param w_r; // 2D×D
    Param w_z; // 2D×D
    Param w_t; // 2D×D

    void init(int dim, Rng& rng);
    std::vector<std::pair<std::string, Param*>> named_params();
};

struct BranchParams {
    BackboneNet backbone;
    MemoryWeights memory;

    std::vector<std::pair<std::string, Param*>> named_params();
    std::vector<Param*> params();
};

// Builds the memory-prior rows on the step's tape. Returns the rows×D value
// for the backbone plus the 1×D state to persist after the step (-1 when the
// variant keeps no running state).
using PriorBuilder = std::function<std::pair<Val, Val>(Tape&)>;

// Online branch takes gradient steps; target follows by exponential moving
// average and is never touched by the optimizer.
class DualBranchModel {
public:
    BranchParams online;
    BranchParams target;
    double beta = 0.99;
    int ema_every_steps = 1;
    AdamW opt;

    void init(const BackboneConfig& cfg, Rng& rng);

    // ensure_nodes on online, with the new rows copied verbatim into target
    // (EMA from an unrelated random row would poison the sampler features).
    std::vector<std::string> ensure_nodes(const std::vector<std::string>& ids, Rng& rng);

    // One gradient step on the subset batch: forward with the built prior,
    // mean-absolute-error loss, backward, optimizer over every online param.
    // h_state_out receives the detached post-step memory state when the
    // builder exposes one.
    double online_step(const BatchInputs& batch, const Matrix& targets,
                       const PriorBuilder& prior_builder, Matrix* h_state_out = nullptr);

    // θ_t ← β·θ_t + (1−β)·θ_o elementwise over every parameter pair.
    void ema_update();

    // online_step counter for the ema_every_steps cadence
    long steps_taken() const { return m_steps; }
    void maybe_ema(); // applies ema_update when the cadence divides the step count

private:
    long m_steps = 0;
};

} // namespace comemnet
