#include "comemnet/optimizer.hpp"

#include <cmath>

#include "comemnet/errors.hpp"

namespace comemnet {

void AdamW::step(Param& p) const {
    if (!all_finite(p.grad)) throw NumericsError("non-finite gradient in optimizer step");
    p.step_count += 1;
    const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(p.step_count));
    const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(p.step_count));
    for (std::size_t i = 0; i < p.value.data.size(); ++i) {
        const double g = p.grad.data[i];
        double& m = p.adam_m.data[i];
        double& v = p.adam_v.data[i];
        m = beta1 * m + (1.0 - beta1) * g;
        v = beta2 * v + (1.0 - beta2) * g * g;
        const double m_hat = m / bc1;
        const double v_hat = v / bc2;
        p.value.data[i] -= lr * (m_hat / (std::sqrt(v_hat) + eps) + weight_decay * p.value.data[i]);
    }
    p.zero_grad();
}

void AdamW::step(const std::vector<Param*>& params) const {
    for (Param* p : params) step(*p);
}

} // namespace comemnet
