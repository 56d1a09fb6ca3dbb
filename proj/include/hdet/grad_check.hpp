#pragma once

#include <functional>

#include "hdet/param_store.hpp"

namespace hdet {

// Central-difference gradient check. `loss` must be a deterministic function of
// the current parameter values (dropout off, fixed inputs). Analytic gradients
// are read from the grad buffers in `params`; values are perturbed in place and
// restored. Returns the max over all entries of |a - n| / max(floor, |a| + |n|).
// Throws NumericError if `loss` ever returns a non-finite value.
double grad_check(const std::function<double()>& loss, ParamStore& params, double eps,
                  double floor = 1e-8);

}  // namespace hdet
