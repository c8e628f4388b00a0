#include "hypoctrl/hypo.hpp"

#include <cmath>
#include <deque>
#include <random>

namespace hypoctrl {

namespace {

// Adjacency: depends[b][a] true when drift_b depends on z_a at some probe.
std::vector<std::vector<bool>> dependency_graph(const ModelSpec& model, const Vec& psi,
                                                const std::vector<Vec>& probes) {
    const int d = model.d();
    std::vector<std::vector<bool>> dep(d, std::vector<bool>(d, false));
    for (const Vec& z : probes) {
        const double t = 0.0;
        Vec f0 = model.drift(z, t, psi);
        for (int a = 0; a < d; ++a) {
            const double step = 1e-5 * (1.0 + std::abs(z[a]));
            Vec zp = z, zm = z;
            zp[a] += step;
            zm[a] -= step;
            Vec df = (model.drift(zp, t, psi) - model.drift(zm, t, psi)) / (2.0 * step);
            for (int b = 0; b < d; ++b)
                if (std::abs(df[b]) > 1e-8 * (1.0 + std::abs(f0[b]))) dep[b][a] = true;
        }
    }
    return dep;
}

}  // namespace

LagReport connexity_lags(const ModelSpec& model, const Vec& psi,
                         const std::vector<Vec>& probe_states) {
    if (probe_states.empty())
        throw std::invalid_argument("connexity_lags: probe_states must be nonempty");
    const int d = model.d(), d_V = model.d_V;
    auto dep = dependency_graph(model, psi, probe_states);

    // Multi-source BFS from the rough coordinates along edges a -> b
    // (dep[b][a]), restricted to smooth targets. dist = edge count.
    std::vector<int> dist(d, -1);
    std::deque<int> queue;
    for (int j = d_V; j < d; ++j) {
        dist[j] = 0;
        queue.push_back(j);
    }
    while (!queue.empty()) {
        int a = queue.front();
        queue.pop_front();
        for (int b = 0; b < d_V; ++b) {
            if (dist[b] < 0 && b != a && dep[b][a]) {
                dist[b] = dist[a] + 1;
                queue.push_back(b);
            }
        }
    }

    LagReport report;
    report.m_l.resize(d_V);
    for (int l = 0; l < d_V; ++l) {
        if (dist[l] > 0) {
            report.m_l[l] = dist[l];
            report.m_B = std::max(report.m_B, dist[l]);
        } else {
            report.m_l[l] = std::nullopt;
        }
    }
    for (int l = 0; l < d_V; ++l)
        if (!report.m_l[l])
            throw ConnexityError("connexity violated: smooth coordinate " +
                                 std::to_string(l + 1) +
                                 " is unreachable from every rough coordinate");
    return report;
}

double h1_rank_check(const ModelSpec& model, const Vec& psi, const Trajectory& traj,
                     int m_B) {
    const int n = traj.n_steps();
    if (n <= m_B) throw std::invalid_argument("h1_rank_check: trajectory shorter than m_B");
    if (traj.states.cols() != model.d())
        throw std::invalid_argument("h1_rank_check: state dimension mismatch");
    const double dt = traj.dt();
    const int d = model.d();
    const Mat I = Mat::Identity(d, d);

    double min_sv = std::numeric_limits<double>::infinity();
    for (int i = 0; i + m_B < n; ++i) {
        Mat prod = I;
        for (int l = 1; l <= m_B; ++l) {
            Vec z = traj.states.row(i + l).transpose();
            prod = (I + dt * model.pseudo_A(z, traj.times[i + l], psi)) * prod;
        }
        Vec zi = traj.states.row(i).transpose();
        Mat M = model.C * prod * model.gamma(zi, traj.times[i], psi);
        Eigen::JacobiSVD<Mat> svd(M);
        min_sv = std::min(min_sv, svd.singularValues().minCoeff());
    }
    return min_sv;
}

std::optional<int> verify_lag_finite_difference(const ModelSpec& model, const Vec& psi,
                                                const Vec& z0, double dt, int j, int l) {
    if (!(dt > 0.0)) throw std::invalid_argument("verify_lag_finite_difference: dt must be > 0");
    if (model.d_V == 0) return 0;  // elliptic: the rough coordinate moves instantly

    const int d_V = model.d_V;
    const int horizon = d_V + 2;
    const double delta = 1e-6;

    // Deterministic Euler step (no noise term).
    auto euler = [&](Vec z, double t) { return (z + dt * model.drift(z, t, psi)).eval(); };

    // The perturbation enters like a noise increment: added to rough
    // coordinate j during the transition from step 0 to step 1.
    Vec zp = euler(z0, 0.0), zm = zp;
    zp[d_V + j] += delta;
    zm[d_V + j] -= delta;
    for (int k = 1; k <= horizon; ++k) {
        const double diff = std::abs(zp[l] - zm[l]) / (2.0 * delta);
        if (diff > 1e-8) return k;
        const double t = k * dt;
        zp = euler(zp, t);
        zm = euler(zm, t);
    }
    return std::nullopt;
}

std::vector<Vec> probe_box(int d, double lo, double hi, int count, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> unif(lo, hi);
    std::vector<Vec> probes(count);
    for (auto& z : probes) {
        z = Vec(d);
        for (int k = 0; k < d; ++k) z[k] = unif(gen);
    }
    return probes;
}

}  // namespace hypoctrl
