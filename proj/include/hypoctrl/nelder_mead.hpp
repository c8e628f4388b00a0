#pragma once

#include <functional>

#include "hypoctrl/model.hpp"

namespace hypoctrl {

struct NelderMeadOptions {
    double rel_tol = 1e-6;   // relative simplex diameter
    int max_evals = 500;
    double initial_step = 0.25;  // relative edge length of the starting simplex
};

struct NelderMeadResult {
    Vec x;
    double fval = 0.0;
    int evals = 0;
    bool converged = false;
};

/// Downhill simplex minimization with standard reflection/expansion/
/// contraction/shrink coefficients. Stops when the simplex diameter falls
/// below rel_tol * (1 + ||best||) or the evaluation budget is spent.
NelderMeadResult nelder_mead(const std::function<double(const Vec&)>& f, const Vec& x0,
                             const NelderMeadOptions& opts = {});

}  // namespace hypoctrl
