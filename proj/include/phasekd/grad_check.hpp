#pragma once

#include <functional>

#include "phasekd/tensor.hpp"

namespace phasekd {

/// Compares the analytic gradient of `forward` with central finite
/// differences at step h, coordinate by coordinate of x. `forward` must
/// recompute the scalar loss from the current contents of x (which may be a
/// network parameter or an input). Returns
///   max_i |analytic_i - numeric_i| / max(1, |analytic_i|).
/// Clears x's gradient before and after; restores x's values.
double grad_check(const std::function<Tensor()>& forward, Tensor x, double h = 1e-5);

}  // namespace phasekd
