#pragma once

#include <cstdint>
#include <stdexcept>

#include "hypoctrl/model.hpp"

namespace hypoctrl {

/// Euler-Maruyama sample path on a uniform grid of n steps over [0, T].
/// Row i of `states` is the full state at t_i = i * T/n; `observations`
/// is C * states row-wise.
struct Trajectory {
    Vec times;         // n+1 points
    Mat states;        // (n+1) x d
    Mat observations;  // (n+1) x d_o
    std::uint64_t seed = 0;

    int n_steps() const { return static_cast<int>(times.size()) - 1; }
    double dt() const { return times[1] - times[0]; }
};

struct ExplosionError : std::runtime_error {
    int step;
    explicit ExplosionError(int i)
        : std::runtime_error("trajectory exploded (non-finite or |z| > 1e8) at step " +
                             std::to_string(i)),
          step(i) {}
};

/// Simulates Z_{i+1} = Z_i + dt f(Z_i,t_i) + sqrt(dt) Gamma(Z_i,t_i) u_i with
/// u_i iid standard normal d_U-vectors from a generator seeded by `seed`.
/// Deterministic given (inputs, seed). Throws ExplosionError on blow-up.
Trajectory simulate(const ModelSpec& model, const Vec& psi, const Vec& Z0, double T,
                    int n, std::uint64_t seed);

/// C * states, row by row. Identical to Trajectory::observations.
Mat observe(const ModelSpec& model, const Trajectory& traj);

/// Stream-split a base seed into per-trial seeds (splitmix64 mixing), so
/// Monte Carlo trials draw from disjoint reproducible streams.
std::uint64_t derive_seed(std::uint64_t seed0, std::uint64_t stream);

}  // namespace hypoctrl
