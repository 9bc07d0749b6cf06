#pragma once

#include <functional>
#include <vector>

#include "comemnet/autodiff.hpp"
#include "comemnet/rng.hpp"

namespace comemnet {

// Validation harness: compares analytic gradients against central finite
// differences. `loss` must deterministically map the current param values to
// a scalar and populate param grads as a side effect (forward + backward).
// Returns the max over sampled coordinates of
// |analytic − fd| / (|analytic| + 1e-8); 0 when params is empty.
double finite_diff_check(const std::vector<Param*>& params,
                         const std::function<double()>& loss,
                         int max_coords_per_param, Rng& rng, double eps = 1e-5);

} // namespace comemnet
