#pragma once

#include <optional>

#include "hypoctrl/lq.hpp"

namespace hypoctrl {

struct IterationOptions {
    double epsilon = -1.0;  // < 0: defaults to 1e-6 * n
    int max_iter = 30;
    Vec z0_guess;  // starting constant profile when Z0 is unknown; zeros if empty
};

struct TrackingResult {
    ControlSolution sol;
    int iterations = 0;
    bool converged = false;
    double last_change = 0.0;  // sum_i ||Z_i^l - Z_i^{l-1}||^2 at the final iterate
};

/// Iterated frozen-coefficient LQ solve: linearize at the previous state
/// predictor, run riccati_backward + control_forward (profiling Z0 when it
/// is not given), and stop when the squared iterate change drops below
/// epsilon or max_iter is hit. Non-convergence is flagged, not fatal.
TrackingResult solve_tracking(const ModelSpec& model, const Vec& psi, const Mat& Y,
                              double dt, double w, const IterationOptions& opts,
                              const std::optional<Vec>& Z0);

}  // namespace hypoctrl
