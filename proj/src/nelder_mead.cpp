#include "hypoctrl/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace hypoctrl {

NelderMeadResult nelder_mead(const std::function<double(const Vec&)>& f, const Vec& x0,
                             const NelderMeadOptions& opts) {
    const int dim = static_cast<int>(x0.size());
    const double alpha = 1.0, gamma = 2.0, rho = 0.5, sigma = 0.5;

    NelderMeadResult result;
    auto eval = [&](const Vec& x) {
        ++result.evals;
        return f(x);
    };

    std::vector<Vec> x(dim + 1, x0);
    std::vector<double> fx(dim + 1);
    for (int k = 0; k < dim; ++k)
        x[k + 1][k] += opts.initial_step * (1.0 + std::abs(x0[k]));
    for (int k = 0; k <= dim; ++k) fx[k] = eval(x[k]);

    std::vector<int> order(dim + 1);
    while (result.evals < opts.max_evals) {
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](int a, int b) { return fx[a] < fx[b]; });
        const int best = order[0], worst = order[dim], second_worst = order[dim - 1];

        double diam = 0.0;
        for (int k = 0; k <= dim; ++k)
            diam = std::max(diam, (x[k] - x[best]).lpNorm<Eigen::Infinity>());
        if (diam < opts.rel_tol * (1.0 + x[best].lpNorm<Eigen::Infinity>())) {
            result.converged = true;
            break;
        }

        Vec centroid = Vec::Zero(dim);
        for (int k = 0; k <= dim; ++k)
            if (k != worst) centroid += x[k];
        centroid /= dim;

        Vec xr = centroid + alpha * (centroid - x[worst]);
        double fr = eval(xr);
        if (fr < fx[best]) {
            Vec xe = centroid + gamma * (xr - centroid);
            double fe = eval(xe);
            if (fe < fr) { x[worst] = xe; fx[worst] = fe; }
            else         { x[worst] = xr; fx[worst] = fr; }
        } else if (fr < fx[second_worst]) {
            x[worst] = xr;
            fx[worst] = fr;
        } else {
            Vec xc = centroid + rho * (x[worst] - centroid);
            double fc = eval(xc);
            if (fc < fx[worst]) {
                x[worst] = xc;
                fx[worst] = fc;
            } else {
                for (int k = 0; k <= dim; ++k) {
                    if (k == best) continue;
                    x[k] = x[best] + sigma * (x[k] - x[best]);
                    fx[k] = eval(x[k]);
                }
            }
        }
    }

    int best = 0;
    for (int k = 1; k <= dim; ++k)
        if (fx[k] < fx[best]) best = k;
    result.x = x[best];
    result.fval = fx[best];
    return result;
}

}  // namespace hypoctrl
