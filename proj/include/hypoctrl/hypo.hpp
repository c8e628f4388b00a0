#pragma once

#include <optional>
#include <vector>

#include "hypoctrl/model.hpp"
#include "hypoctrl/simulate.hpp"

namespace hypoctrl {

/// Noise-propagation lags derived from the drift dependency graph.
///
/// Lag convention: the graph has an edge a -> b when d(drift_b)/d(z_a) is
/// nonzero at some probe state, and m_l is the edge count of the shortest
/// path from any rough coordinate to smooth coordinate l through smooth
/// intermediates. m_B = max_l m_l (0 when d_V = 0). A noise increment
/// injected at step i first reaches smooth coordinate l at step i + m_l + 1
/// in the Euler scheme, and the contrast uses residuals lagged by m_B + 1.
/// This convention is pinned by the three built-ins: cyclic 2, FHN 1,
/// elliptic 0.
struct LagReport {
    std::vector<std::optional<int>> m_l;  // per smooth coordinate; nullopt = no path
    int m_B = 0;
    double h1_min_singular_value = 0.0;
};

struct ConnexityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Builds the coordinate dependency graph by central finite differences at
/// the probe states (nonzero when |fd| > 1e-8 * (1 + |drift|), OR-ed over
/// probes) and returns the per-coordinate lags. Throws ConnexityError if a
/// smooth coordinate is unreachable from every rough one.
LagReport connexity_lags(const ModelSpec& model, const Vec& psi,
                         const std::vector<Vec>& probe_states);

/// Minimum over i of the smallest singular value of
/// C (prod_{l=1}^{m_B} Abar_{i+l}) Gamma(Z_i, t_i) along the trajectory,
/// with Abar = I + dt A. Values near 0 indicate an (H1) failure.
double h1_rank_check(const ModelSpec& model, const Vec& psi, const Trajectory& traj,
                     int m_B);

/// Runs the deterministic Euler map from z0 twice, injecting a +-delta
/// noise-style perturbation into rough coordinate j during the first step,
/// and returns the first lag k (central differences) at which smooth
/// coordinate l moves. Per the propagation property this equals m_l + 1.
/// Returns nullopt if nothing moves within a horizon of d_V + 2 steps.
std::optional<int> verify_lag_finite_difference(const ModelSpec& model, const Vec& psi,
                                                const Vec& z0, double dt, int j, int l);

/// Uniform draws in [lo, hi]^d from a seeded generator; the default probe
/// box for connexity_lags.
std::vector<Vec> probe_box(int d, double lo, double hi, int count, std::uint64_t seed);

}  // namespace hypoctrl
