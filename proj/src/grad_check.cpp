#include "comemnet/grad_check.hpp"

#include <algorithm>
#include <cmath>

namespace comemnet {

double finite_diff_check(const std::vector<Param*>& params,
                         const std::function<double()>& loss,
                         int max_coords_per_param, Rng& rng, double eps) {
    if (params.empty()) return 0.0;

    for (Param* p : params) p->zero_grad();
    loss();
    std::vector<Matrix> analytic;
    analytic.reserve(params.size());
    for (Param* p : params) analytic.push_back(p->grad);

    double max_rel = 0.0;
    for (std::size_t pi = 0; pi < params.size(); ++pi) {
        Param& p = *params[pi];
        const int n = p.value.count();
        if (n == 0) continue;
        std::vector<int> coords;
        if (n <= max_coords_per_param) {
            coords.resize(static_cast<std::size_t>(n));
            for (int i = 0; i < n; ++i) coords[static_cast<std::size_t>(i)] = i;
        } else {
            for (int i = 0; i < max_coords_per_param; ++i)
                coords.push_back(static_cast<int>(rng.index(static_cast<std::size_t>(n))));
        }
        for (int c : coords) {
            const double saved = p.value.data[static_cast<std::size_t>(c)];
            p.value.data[static_cast<std::size_t>(c)] = saved + eps;
            const double lp = loss();
            p.value.data[static_cast<std::size_t>(c)] = saved - eps;
            const double lm = loss();
            p.value.data[static_cast<std::size_t>(c)] = saved;
            const double fd = (lp - lm) / (2.0 * eps);
            const double a = analytic[pi].data[static_cast<std::size_t>(c)];
            const double rel = std::fabs(a - fd) / (std::fabs(a) + 1e-8);
            max_rel = std::max(max_rel, rel);
        }
    }
    // perturbed evaluations polluted the grads; leave them clean
    for (Param* p : params) p->zero_grad();
    return max_rel;
}

} // namespace comemnet
