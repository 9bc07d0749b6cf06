#include "comemnet/branches.hpp"

#include <cmath>

#include "comemnet/errors.hpp"

namespace comemnet {

void MemoryWeights::init(int dim, Rng& rng) {
    auto gauss = [&](int r, int c) {
        Matrix m(r, c);
        for (double& v : m.data) v = rng.normal(0.0, 0.02);
        return Param(std::move(m));
    };
    w = gauss(dim, dim);
    w_r = gauss(2 * dim, dim);
    w_z = gauss(2 * dim, dim);
    w_t = gauss(2 * dim, dim);
}

std::vector<std::pair<std::string, Param*>> MemoryWeights::named_params() {
    return {{"memory_w", &w}, {"memory_w_r", &w_r}, {"memory_w_z", &w_z}, {"memory_w_t", &w_t}};
}

std::vector<std::pair<std::string, Param*>> BranchParams::named_params() {
    auto out = backbone.named_params();
    for (auto& [name, p] : memory.named_params()) out.emplace_back(name, p);
    return out;
}

std::vector<Param*> BranchParams::params() {
    std::vector<Param*> out;
    for (auto& [name, p] : named_params()) out.push_back(p);
    return out;
}

void DualBranchModel::init(const BackboneConfig& cfg, Rng& rng) {
    online.backbone.init(cfg, rng);
    online.memory.init(cfg.memory_dim(), rng);
    target = online; // identical start; diverges only through EMA
    m_steps = 0;
}

std::vector<std::string> DualBranchModel::ensure_nodes(const std::vector<std::string>& ids,
                                                       Rng& rng) {
    auto added = online.backbone.ensure_nodes(ids, rng);
    for (const auto& id : added) {
        const int s = online.backbone.slot(id);
        const Matrix& table = online.backbone.node_embed().value;
        target.backbone.append_node_row(id, table.data.data() +
                                                static_cast<std::size_t>(s) * table.cols);
    }
    return added;
}

double DualBranchModel::online_step(const BatchInputs& batch, const Matrix& targets,
                                    const PriorBuilder& prior_builder, Matrix* h_state_out) {
    Tape t;
    auto [prior_rows, h_state] = prior_builder(t);
    Val pred = online.backbone.forward(t, batch, prior_rows);
    Val loss = t.mae_loss(pred, targets);
    const double loss_value = t.value(loss)(0, 0);
    if (!std::isfinite(loss_value)) throw NumericsError("non-finite training loss");
    t.backward(loss);
    opt.step(online.params());
    m_steps += 1;
    if (h_state_out && h_state >= 0) *h_state_out = t.value(h_state);
    return loss_value;
}

void DualBranchModel::ema_update() {
    auto on = online.named_params();
    auto tg = target.named_params();
    if (on.size() != tg.size()) throw ConfigError("ema_update: branch param sets differ");
    for (std::size_t i = 0; i < on.size(); ++i) {
        Matrix& tv = tg[i].second->value;
        const Matrix& ov = on[i].second->value;
        if (!tv.same_shape(ov))
            throw ConfigError("ema_update: shape mismatch at " + on[i].first);
        for (std::size_t k = 0; k < tv.data.size(); ++k)
            tv.data[k] = beta * tv.data[k] + (1.0 - beta) * ov.data[k];
    }
}

void DualBranchModel::maybe_ema() {
    if (ema_every_steps <= 0) return;
    if (m_steps % ema_every_steps == 0) ema_update();
}

} // namespace comemnet
