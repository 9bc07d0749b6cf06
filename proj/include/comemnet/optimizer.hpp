#pragma once

#include "comemnet/autodiff.hpp"

namespace comemnet {

// Decoupled-weight-decay Adam. Throws NumericsError on a non-finite gradient
// so the caller can abort the epoch; the gradient is zeroed after the update.
struct AdamW {
    double lr = 0.01;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double weight_decay = 0.0;

    void step(Param& p) const;
    void step(const std::vector<Param*>& params) const;
};

} // namespace comemnet
