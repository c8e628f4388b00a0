#include "hypoctrl/tracking.hpp"

#include <stdexcept>

namespace hypoctrl {

TrackingResult solve_tracking(const ModelSpec& model, const Vec& psi, const Mat& Y,
                              double dt, double w, const IterationOptions& opts,
                              const std::optional<Vec>& Z0) {
    const int n = static_cast<int>(Y.rows()) - 1;
    if (n < 1) throw std::invalid_argument("solve_tracking: need at least 2 observation rows");
    if (!(w > 0.0)) throw std::invalid_argument("solve_tracking: w must be > 0");
    if (opts.max_iter < 1) throw std::invalid_argument("solve_tracking: max_iter must be >= 1");
    const double epsilon = opts.epsilon > 0.0 ? opts.epsilon : 1e-6 * n;
    const int d = model.d();

    Vec start = Z0 ? *Z0 : (opts.z0_guess.size() == d ? opts.z0_guess : Vec::Zero(d).eval());
    Mat Zprev = start.transpose().replicate(n + 1, 1);

    TrackingResult result;
    for (int l = 1; l <= opts.max_iter; ++l) {
        Linearization lin = build_linearization(model, psi, Zprev, Y, dt, w);
        RiccatiSolution ricc = riccati_backward(lin);
        Vec z0 = Z0 ? *Z0 : estimate_Z0(ricc);
        result.sol = control_forward(lin, ricc, z0);
        result.iterations = l;
        result.last_change = (result.sol.Z_bar - Zprev).squaredNorm();
        if (result.last_change < epsilon) {
            result.converged = true;
            break;
        }
        Zprev = result.sol.Z_bar;
    }
    return result;
}

}  // namespace hypoctrl
