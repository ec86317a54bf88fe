#pragma once

#include <functional>
#include <vector>

#include "tsad/autodiff.hpp"

namespace tsad {

// A differentiable loss for checking: given a fresh tape and leaf vars for
// the parameters (in order), build the graph and return the scalar loss var.
using TapeLossFn = std::function<Var(Tape&, const std::vector<Var>&)>;

// Compares the tape gradient of `loss_fn` against central finite differences
// perturbing every entry of every parameter. Returns the maximum of
// |analytic - numeric| / max(|analytic|, |numeric|, 1e-8).
double finite_diff_check(const TapeLossFn& loss_fn, const std::vector<Mat>& params,
                         double epsilon);

}  // namespace tsad
