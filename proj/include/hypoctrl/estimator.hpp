#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "hypoctrl/contrast.hpp"
#include "hypoctrl/nelder_mead.hpp"
#include "hypoctrl/tracking.hpp"

namespace hypoctrl {

/// Value returned by the middle objective when the tracking solve or the
/// contrast evaluation fails, so the simplex search can retreat.
inline constexpr double kObjectiveSentinel = 1e12;

struct EstimationOptions {
    IterationOptions tracking;
    NelderMeadOptions simplex;
    int m_B = -1;             // < 0: derive from connexity_lags
    bool profile_z0 = false;  // profile the initial condition instead of fixing it
    std::optional<Vec> Z0;    // required when profile_z0 is false
    bool maximize_K = true;   // flip to reproduce the argmin-K reading
    int threads = 0;          // 0: HYPOCTRL_THREADS env var, then hardware
};

struct WeightFit {
    double w = 0.0;
    double logK = 0.0;
    Vec psi;
    double contrast = 0.0;
    double mean_u_sq = 0.0;  // mean ||u_i||^2 at the fitted parameters
    int fit_evals = 0;
    bool failed = false;
};

struct EstimationResult {
    Vec psi_hat;
    double w_hat = 0.0;
    Vec z0_hat;
    double contrast_value = 0.0;
    std::vector<WeightFit> k_table;
    int m_B = 0;
    double wall_time_s = 0.0;
};

struct MonteCarloReport {
    Vec mean;      // per parameter, over successful trials
    Vec variance;  // per parameter (population variance)
    int trials = 0;
    int failures = 0;
    double mean_trial_seconds = 0.0;
};

/// H^{m_B}(psi | Y, Zbar_psi): tracking solve followed by the lagged
/// contrast. Returns kObjectiveSentinel instead of surfacing errors.
double middle_objective(const ModelSpec& model, const Vec& psi, const Mat& Y, double dt,
                        double w, int m_B, const EstimationOptions& opts);

struct FitResult {
    Vec psi;
    double contrast = 0.0;
    int evals = 0;
    bool failed = false;  // every evaluation hit the sentinel
};

/// Minimizes the middle objective over the free parameters by Nelder-Mead
/// in log coordinates for positivity-flagged entries, with one restart
/// from the best point.
FitResult fit_psi(const ModelSpec& model, const Mat& Y, double dt, double w, int m_B,
                  const Vec& psi_init, const EstimationOptions& opts);

/// log K(w) = sum_i [(d_U/2 - 1) log ||u_i||^2 - ||u_i||^2 / 2]. Zero-norm
/// rows contribute 0 when d_U == 2, are skipped when d_U == 1 (-inf if
/// every row is zero), and give -inf when d_U >= 3.
double k_criterion(const Mat& u_bar, int d_U);

/// Nested procedure: fit psi for each w in the grid, score each fit by
/// log K, and select the best weight (ties toward smaller w).
EstimationResult select_weight(const ModelSpec& model, const Mat& Y, double dt,
                               const std::vector<double>& W, const Vec& psi_init,
                               const EstimationOptions& opts);

/// Seeded Monte Carlo benchmark: simulate `trials` trajectories, run
/// select_weight on each (psi_init = truth perturbed up to +-50% from the
/// trial's stream), and aggregate per-parameter mean and variance. Trials
/// run on a bounded worker pool; results merge deterministically by index.
MonteCarloReport monte_carlo(const ModelSpec& model, const Vec& psi_true, const Vec& Z0,
                             double T, int n, const std::vector<double>& W, int trials,
                             std::uint64_t seed0, const EstimationOptions& opts,
                             std::vector<EstimationResult>* per_trial = nullptr);

/// m_B for a model: the config override if set, else the connexity
/// analysis at default probe states.
int resolve_m_B(const ModelSpec& model, const Vec& psi, const EstimationOptions& opts);

int worker_count(const EstimationOptions& opts, int work_items);

}  // namespace hypoctrl
