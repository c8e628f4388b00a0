#include "hypoctrl/estimator.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <random>
#include <thread>

#include "hypoctrl/hypo.hpp"
#include "hypoctrl/simulate.hpp"

namespace hypoctrl {

namespace {

// Map between the free-parameter optimization space (log coordinates for
// positivity-flagged entries) and the full parameter vector.
struct ParamTransform {
    const ModelSpec& model;
    std::vector<int> free_idx;
    Vec fixed_template;

    ParamTransform(const ModelSpec& m, const Vec& psi_ref)
        : model(m), free_idx(m.free_indices()), fixed_template(psi_ref) {
        for (int k = 0; k < m.n_params(); ++k)
            if (m.params[k].fixed) fixed_template[k] = *m.params[k].fixed;
    }

    Vec to_opt(const Vec& psi) const {
        Vec x(free_idx.size());
        for (size_t a = 0; a < free_idx.size(); ++a) {
            const int k = free_idx[a];
            x[a] = model.params[k].positive ? std::log(psi[k]) : psi[k];
        }
        return x;
    }

    Vec to_psi(const Vec& x) const {
        Vec psi = fixed_template;
        for (size_t a = 0; a < free_idx.size(); ++a) {
            const int k = free_idx[a];
            psi[k] = model.params[k].positive ? std::exp(x[a]) : x[a];
        }
        return psi;
    }
};

}  // namespace

int resolve_m_B(const ModelSpec& model, const Vec& psi, const EstimationOptions& opts) {
    if (opts.m_B >= 0) return opts.m_B;
    auto probes = probe_box(model.d(), -3.0, 3.0, 50, 42);
    return connexity_lags(model, psi, probes).m_B;
}

double middle_objective(const ModelSpec& model, const Vec& psi, const Mat& Y, double dt,
                        double w, int m_B, const EstimationOptions& opts) {
    try {
        model.validate_params(psi);
        TrackingResult track =
            solve_tracking(model, psi, Y, dt, w, opts.tracking, opts.profile_z0
                                                                   ? std::nullopt
                                                                   : opts.Z0);
        ContrastEval ev = lagged_terms(model, psi, track.sol.Z_bar, Y, dt, m_B);
        return std::isfinite(ev.value) ? ev.value : kObjectiveSentinel;
    } catch (const std::exception&) {
        return kObjectiveSentinel;
    }
}

FitResult fit_psi(const ModelSpec& model, const Mat& Y, double dt, double w, int m_B,
                  const Vec& psi_init, const EstimationOptions& opts) {
    model.validate_params(psi_init);
    ParamTransform tf(model, psi_init);

    FitResult result;
    double best_seen = std::numeric_limits<double>::infinity();
    auto objective = [&](const Vec& x) {
        Vec psi = tf.to_psi(x);
        if (!psi.allFinite()) return kObjectiveSentinel;
        double v = middle_objective(model, psi, Y, dt, w, m_B, opts);
        best_seen = std::min(best_seen, v);
        return v;
    };

    NelderMeadOptions nm = opts.simplex;
    NelderMeadResult run = nelder_mead(objective, tf.to_opt(psi_init), nm);
    result.evals = run.evals;
    // one restart from the best point, within the remaining budget
    if (run.evals < nm.max_evals) {
        NelderMeadOptions nm2 = nm;
        nm2.max_evals = nm.max_evals - run.evals;
        NelderMeadResult run2 = nelder_mead(objective, run.x, nm2);
        result.evals += run2.evals;
        if (run2.fval < run.fval) run = run2;
    }

    result.psi = tf.to_psi(run.x);
    result.contrast = run.fval;
    result.failed = !(best_seen < kObjectiveSentinel);
    return result;
}

double k_criterion(const Mat& u_bar, int d_U) {
    const double expo = 0.5 * d_U - 1.0;
    double logK = 0.0;
    int nonzero = 0;
    for (int i = 0; i < u_bar.rows(); ++i) {
        const double s = u_bar.row(i).squaredNorm();
        if (s == 0.0) {
            // Zero rows occur structurally: the last m_B controls vanish
            // whenever C Gamma-products are zero. d_U == 2 has exponent 0;
            // d_U == 1 skips them (they carry no scale information);
            // d_U >= 3 makes the density vanish.
            if (d_U >= 3) return -std::numeric_limits<double>::infinity();
            continue;
        }
        logK += expo * std::log(s) - 0.5 * s;
        ++nonzero;
    }
    if (nonzero == 0 && d_U != 2)
        return -std::numeric_limits<double>::infinity();
    return logK;
}

EstimationResult select_weight(const ModelSpec& model, const Mat& Y, double dt,
                               const std::vector<double>& W, const Vec& psi_init,
                               const EstimationOptions& opts) {
    if (W.empty()) throw std::invalid_argument("select_weight: weight grid is empty");
    const auto t0 = std::chrono::steady_clock::now();

    EstimationResult result;
    result.m_B = resolve_m_B(model, psi_init, opts);

    for (double w : W) {
        WeightFit entry;
        entry.w = w;
        FitResult fit = fit_psi(model, Y, dt, w, result.m_B, psi_init, opts);
        entry.fit_evals = fit.evals;
        entry.failed = fit.failed;
        if (!fit.failed) {
            entry.psi = fit.psi;
            entry.contrast = fit.contrast;
            try {
                TrackingResult track = solve_tracking(
                    model, fit.psi, Y, dt, w, opts.tracking,
                    opts.profile_z0 ? std::nullopt : opts.Z0);
                entry.logK = k_criterion(track.sol.u_bar, model.d_U);
                entry.mean_u_sq =
                    track.sol.u_bar.rowwise().squaredNorm().mean();
            } catch (const std::exception&) {
                entry.failed = true;
            }
        }
        result.k_table.push_back(entry);
    }

    int best = -1;
    for (size_t k = 0; k < result.k_table.size(); ++k) {
        const auto& e = result.k_table[k];
        if (e.failed) continue;
        if (best < 0) { best = static_cast<int>(k); continue; }
        const auto& b = result.k_table[best];
        const bool better = opts.maximize_K ? e.logK > b.logK : e.logK < b.logK;
        if (better) best = static_cast<int>(k);  // ties keep the smaller w
    }
    if (best < 0) throw std::runtime_error("select_weight: estimation failed for every weight");

    const auto& chosen = result.k_table[best];
    result.psi_hat = chosen.psi;
    result.w_hat = chosen.w;
    result.contrast_value = chosen.contrast;
    {
        TrackingResult track = solve_tracking(model, chosen.psi, Y, dt, chosen.w,
                                              opts.tracking,
                                              opts.profile_z0 ? std::nullopt : opts.Z0);
        result.z0_hat = track.sol.Z0_used;
    }
    result.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return result;
}

int worker_count(const EstimationOptions& opts, int work_items) {
    int n = opts.threads;
    if (n <= 0) {
        if (const char* env = std::getenv("HYPOCTRL_THREADS")) n = std::atoi(env);
    }
    if (n <= 0) n = static_cast<int>(std::thread::hardware_concurrency());
    if (n <= 0) n = 1;
    return std::min(n, std::max(work_items, 1));
}

MonteCarloReport monte_carlo(const ModelSpec& model, const Vec& psi_true, const Vec& Z0,
                             double T, int n, const std::vector<double>& W, int trials,
                             std::uint64_t seed0, const EstimationOptions& opts,
                             std::vector<EstimationResult>* per_trial) {
    if (trials < 1) throw std::invalid_argument("monte_carlo: trials must be >= 1");
    const double dt = T / n;
    const int np = model.n_params();

    std::vector<std::optional<EstimationResult>> results(trials);
    std::atomic<int> next{0};
    auto worker = [&]() {
        for (int trial = next.fetch_add(1); trial < trials; trial = next.fetch_add(1)) {
            try {
                Trajectory traj =
                    simulate(model, psi_true, Z0, T, n, derive_seed(seed0, trial));
                // starting point: truth perturbed up to +-50%, per-trial stream
                std::mt19937_64 gen(derive_seed(seed0, 1000000 + trial));
                std::uniform_real_distribution<double> unif(0.5, 1.5);
                Vec psi_init = psi_true;
                for (int k : model.free_indices()) psi_init[k] *= unif(gen);

                EstimationOptions trial_opts = opts;
                if (!trial_opts.profile_z0 && !trial_opts.Z0) trial_opts.Z0 = Z0;
                results[trial] =
                    select_weight(model, traj.observations, dt, W, psi_init, trial_opts);
            } catch (const std::exception&) {
                results[trial] = std::nullopt;
            }
        }
    };

    const int n_workers = worker_count(opts, trials);
    std::vector<std::thread> pool;
    for (int k = 1; k < n_workers; ++k) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    MonteCarloReport report;
    report.trials = trials;
    report.mean = Vec::Zero(np);
    report.variance = Vec::Zero(np);
    int ok = 0;
    double total_time = 0.0;
    for (int trial = 0; trial < trials; ++trial) {
        if (!results[trial]) {
            ++report.failures;
            continue;
        }
        report.mean += results[trial]->psi_hat;
        total_time += results[trial]->wall_time_s;
        ++ok;
        if (per_trial) per_trial->push_back(*results[trial]);
    }
    if (ok > 0) {
        report.mean /= ok;
        for (int trial = 0; trial < trials; ++trial)
            if (results[trial]) {
                Vec dev = results[trial]->psi_hat - report.mean;
                report.variance += dev.cwiseProduct(dev);
            }
        report.variance /= ok;
        report.mean_trial_seconds = total_time / ok;
    }
    return report;
}

}  // namespace hypoctrl
