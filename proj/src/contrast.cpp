#include "hypoctrl/contrast.hpp"

#include <cmath>
#include <random>

namespace hypoctrl {

ContrastEval lagged_terms(const ModelSpec& model, const Vec& psi, const Mat& Zbar,
                          const Mat& Y, double dt, int m_B) {
    const int n = static_cast<int>(Y.rows()) - 1;
    if (n <= m_B + 1) throw std::invalid_argument("lagged_terms: need n > m_B + 1");
    const int d = model.d();
    const int d_o = model.d_o();
    const double sqdt = std::sqrt(dt);
    const Mat I = Mat::Identity(d, d);

    // One-step transition matrices frozen at the predictor states.
    std::vector<Mat> Abar(n);
    for (int i = 0; i < n; ++i)
        Abar[i] = I + dt * model.pseudo_A(Zbar.row(i).transpose(), i * dt, psi);

    const int n_windows = n - m_B - 1;
    ContrastEval ev;
    ev.X = Mat::Zero(n_windows, d_o);
    ev.Sigma.resize(n_windows);
    ev.logdets.resize(n_windows);

    std::vector<Mat> CP(m_B + 1);  // CP[r] = C * prod_{l=r+1}^{m_B} Abar_{i+l}
    for (int i = 0; i < n_windows; ++i) {
        CP[m_B] = model.C;
        for (int r = m_B - 1; r >= 0; --r) CP[r] = CP[r + 1] * Abar[i + r + 1];
        Mat Cfull = CP[0] * Abar[i];  // C * prod_{r=0}^{m_B}

        Vec X = Y.row(i + m_B + 1).transpose() - Cfull * Zbar.row(i).transpose();
        Mat Sigma = Mat::Zero(d_o, d_o);
        int nonzero_blocks = 0;
        for (int r = 0; r <= m_B; ++r) {
            const double t = (i + r) * dt;
            X -= dt * CP[r] * model.pseudo_r(t, psi);
            Mat G = sqdt * CP[r] * model.gamma(Zbar.row(i + r).transpose(), t, psi);
            Sigma += G * G.transpose();
            if (G.lpNorm<Eigen::Infinity>() > 1e-300) ++nonzero_blocks;
        }
        if (nonzero_blocks > 1) ev.overlapping_residuals = true;

        const double jitter = 1e-12 * Sigma.trace() / d_o;
        Mat Sigma_j = Sigma + jitter * Mat::Identity(d_o, d_o);
        Eigen::LLT<Mat> llt(Sigma_j);
        if (llt.info() != Eigen::Success) throw H1ViolationError(i);
        double logdet = 0.0;
        for (int k = 0; k < d_o; ++k) {
            const double Lkk = llt.matrixL()(k, k);
            if (!(Lkk > 0.0) || !std::isfinite(std::log(Lkk))) throw H1ViolationError(i);
            logdet += 2.0 * std::log(Lkk);
        }
        ev.X.row(i) = X.transpose();
        ev.Sigma[i] = Sigma;
        ev.logdets[i] = logdet;
        ev.value += X.dot(llt.solve(X)) + logdet;
    }
    if (!std::isfinite(ev.value)) throw std::runtime_error("lagged_terms: non-finite contrast");
    return ev;
}

Mat mc_covariance_check(const ModelSpec& model, const Vec& psi,
                        const std::vector<Vec>& z_window, double dt, int m_B,
                        int n_samples, std::uint64_t seed) {
    if (static_cast<int>(z_window.size()) != m_B + 1)
        throw std::invalid_argument("mc_covariance_check: z_window must hold m_B + 1 states");
    const int d = model.d();
    const int d_o = model.d_o();
    const int d_U = model.d_U;
    const double sqdt = std::sqrt(dt);
    const Mat I = Mat::Identity(d, d);

    std::vector<Mat> G(m_B + 1);
    Mat CP = model.C;
    for (int r = m_B; r >= 0; --r) {
        const double t = r * dt;
        G[r] = sqdt * CP * model.gamma(z_window[r], t, psi);
        if (r > 0) CP = CP * (I + dt * model.pseudo_A(z_window[r], t, psi));
    }

    std::mt19937_64 gen(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Mat cov = Mat::Zero(d_o, d_o);
    Vec x(d_o), u(d_U);
    for (int s = 0; s < n_samples; ++s) {
        x.setZero();
        for (int r = 0; r <= m_B; ++r) {
            for (int j = 0; j < d_U; ++j) u[j] = normal(gen);
            x += G[r] * u;
        }
        cov += x * x.transpose();
    }
    return cov / n_samples;
}

}  // namespace hypoctrl
