#include <doctest.h>

#include "hypoctrl/contrast.hpp"
#include "hypoctrl/simulate.hpp"

using namespace hypoctrl;

namespace {

ModelSpec make_elliptic_toy() {
    ModelSpec m;
    m.name = "elliptic_toy";
    m.d_V = 0;
    m.d_U = 2;
    m.C = Mat::Identity(2, 2);
    m.params = {{"a", false, false, {}}, {"s1", true, true, {}}, {"s2", true, true, {}}};
    m.pseudo_A = [](const Vec&, double, const Vec& psi) {
        Mat A(2, 2);
        A << -psi[0], 0.5, 0.2, -psi[0];
        return A;
    };
    m.pseudo_r = [](double, const Vec&) { return Vec::Zero(2).eval(); };
    m.drift = [A = m.pseudo_A](const Vec& z, double t, const Vec& psi) {
        return (A(z, t, psi) * z).eval();
    };
    m.diffusion_B = [](const Vec&, double, const Vec& psi) {
        Mat B = Mat::Zero(2, 2);
        B(0, 0) = psi[1];
        B(1, 1) = psi[2];
        return B;
    };
    return m;
}

}  // namespace

TEST_CASE("elliptic case m_B = 0 reduces to the one-step Euler Gaussian contrast") {
    ModelSpec m = make_elliptic_toy();
    Vec psi(3);
    psi << 0.3, 0.2, 0.4;
    Trajectory traj = simulate(m, psi, Vec::Ones(2), 2.0, 200, 51);
    const double dt = traj.dt();
    ContrastEval ev = lagged_terms(m, psi, traj.states, traj.observations, dt, 0);

    Mat Sigma_ref = dt * Mat::Zero(2, 2);
    Sigma_ref(0, 0) = dt * psi[1] * psi[1];
    Sigma_ref(1, 1) = dt * psi[2] * psi[2];
    double value_ref = 0.0;
    for (int i = 0; i < 199; ++i) {
        Vec z = traj.states.row(i).transpose();
        Vec pred = z + dt * m.drift(z, traj.times[i], psi);
        Vec x = traj.observations.row(i + 1).transpose() - pred;
        CHECK((ev.X.row(i).transpose() - x).lpNorm<Eigen::Infinity>() < 1e-12);
        CHECK((ev.Sigma[i] - Sigma_ref).lpNorm<Eigen::Infinity>() < 1e-15);
        value_ref += x[0] * x[0] / Sigma_ref(0, 0) + x[1] * x[1] / Sigma_ref(1, 1) +
                     std::log(Sigma_ref(0, 0) * Sigma_ref(1, 1));
    }
    CHECK(ev.value == doctest::Approx(value_ref).epsilon(1e-8));
    CHECK_FALSE(ev.overlapping_residuals);
}

TEST_CASE("cyclic window covariance: only the r = 0 block survives, Sigma = c^2 dt^5") {
    ModelSpec m = make_cyclic_feedback();
    Vec psi(2);
    psi << 0.2, 0.15;
    const double dt = 0.01;
    Trajectory traj = simulate(m, psi, Vec::Zero(3), dt * 100, 100, 52);
    ContrastEval ev = lagged_terms(m, psi, traj.states, traj.observations, dt, 2);
    // G = sqrt(dt) * dt^2 * c = 1.5e-6 at c = 0.15, dt = 0.01: the (1,3)
    // entry of C Abar Abar is exactly dt^2 thanks to the bidiagonal zeros
    const double sigma_ref = std::pow(dt, 5) * 0.15 * 0.15;
    for (const Mat& S : ev.Sigma)
        CHECK(S(0, 0) == doctest::Approx(sigma_ref).epsilon(1e-10));
    CHECK_FALSE(ev.overlapping_residuals);
}

TEST_CASE("FHN window covariance equals dt^3 sigma^2 / eps^2") {
    ModelSpec m = make_fhn();
    Vec psi(5);
    psi << 0.1, 1.5, 0.8, 0.0, 0.3;
    const double dt = 0.01;
    Trajectory traj = simulate(m, psi, Vec::Zero(2), 1.0, 100, 53);
    ContrastEval ev = lagged_terms(m, psi, traj.states, traj.observations, dt, 1);
    const double sigma_ref = std::pow(dt, 3) * 0.3 * 0.3 / (0.1 * 0.1);  // 9e-6
    CHECK(sigma_ref == doctest::Approx(9e-6));
    for (const Mat& S : ev.Sigma)
        CHECK(S(0, 0) == doctest::Approx(sigma_ref).epsilon(1e-10));
}

TEST_CASE("window covariance matches the Monte Carlo oracle within 5%") {
    ModelSpec m = make_synaptic_conductance();
    Vec psi(5);
    psi << 0.5, 1.0, 9.4, 0.1, 0.1;
    const double dt = 0.02;
    std::vector<Vec> window = {(Vec(3) << -60.0, 12.0, 2.0).finished(),
                               (Vec(3) << -59.5, 11.5, 2.1).finished()};
    // a 4-point series whose first window is exactly `window`
    Mat Zbar(4, 3);
    Zbar.row(0) = window[0].transpose();
    Zbar.row(1) = window[1].transpose();
    Zbar.row(2) = window[1].transpose();
    Zbar.row(3) = window[1].transpose();
    Mat Y = Zbar.leftCols(1);
    ContrastEval ev = lagged_terms(m, psi, Zbar, Y, dt, 1);
    Mat mc = mc_covariance_check(m, psi, window, dt, 1, 400000);
    CHECK(ev.Sigma[0](0, 0) == doctest::Approx(mc(0, 0)).epsilon(0.05));
}

TEST_CASE("zero diffusion raises an H1 violation") {
    ModelSpec m = make_cyclic_feedback();
    Vec psi(2);
    psi << 0.2, 0.15;
    Trajectory traj = simulate(m, psi, Vec::Zero(3), 1.0, 100, 54);
    Vec psi0 = psi;
    psi0[1] = 0.0;
    CHECK_THROWS_AS(
        lagged_terms(m, psi0, traj.states, traj.observations, traj.dt(), 2),
        H1ViolationError);
}

TEST_CASE("deterministic data gives zero residuals and value = sum of logdets") {
    // drift of the cyclic model does not involve c, so a path simulated with
    // c ~ 0 is the exact deterministic recursion; evaluate at c = 0.15
    ModelSpec m = make_cyclic_feedback();
    Vec psi_det(2), psi(2);
    psi_det << 0.2, 1e-120;
    psi << 0.2, 0.15;
    Trajectory traj = simulate(m, psi_det, (Vec(3) << 1, 0.5, -0.2).finished(), 1.0, 100, 55);
    ContrastEval ev = lagged_terms(m, psi, traj.states, traj.observations, traj.dt(), 2);
    CHECK(ev.X.lpNorm<Eigen::Infinity>() < 1e-12);
    double logdet_sum = 0.0;
    for (double ld : ev.logdets) logdet_sum += ld;
    CHECK(ev.value == doctest::Approx(logdet_sum).epsilon(1e-12));
}

TEST_CASE("forcing an elliptic model to lag 1 flags overlapping residual blocks") {
    ModelSpec m = make_elliptic_toy();
    Vec psi(3);
    psi << 0.3, 0.2, 0.4;
    Trajectory traj = simulate(m, psi, Vec::Ones(2), 1.0, 100, 56);
    ContrastEval ev = lagged_terms(m, psi, traj.states, traj.observations, traj.dt(), 1);
    CHECK(ev.overlapping_residuals);
}

TEST_CASE("series shorter than the window is rejected") {
    ModelSpec m = make_cyclic_feedback();
    Vec psi(2);
    psi << 0.2, 0.15;
    Trajectory traj = simulate(m, psi, Vec::Zero(3), 0.03, 3, 57);
    CHECK_THROWS_AS(lagged_terms(m, psi, traj.states, traj.observations, traj.dt(), 2),
                    std::invalid_argument);
}
