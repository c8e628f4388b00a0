#include <doctest.h>

#include "hypoctrl/lq.hpp"
#include "hypoctrl/simulate.hpp"

using namespace hypoctrl;

TEST_CASE("equilibrium start with negligible noise stays at the equilibrium") {
    ModelSpec m = make_cyclic_feedback();
    Vec psi(2);
    psi << 0.2, 1e-12;  // drift vanishes at the origin
    Trajectory traj = simulate(m, psi, Vec::Zero(3), 1.0, 100, 3);
    for (int i = 0; i <= 100; ++i)
        CHECK(traj.states.row(i).lpNorm<Eigen::Infinity>() < 1e-9);
}

TEST_CASE("scalar linear recursion when only X1 is nonzero") {
    ModelSpec m = make_cyclic_feedback();
    Vec psi(2);
    psi << 0.2, 1e-300;  // c ~ 0: X2, X3 stay 0
    Vec z0(3);
    z0 << 1, 0, 0;
    const int n = 50;
    Trajectory traj = simulate(m, psi, z0, 5.0, n, 4);
    const double dt = traj.dt();
    CHECK(traj.states(n, 0) == doctest::Approx(std::pow(1.0 - 0.2 * dt, n)).epsilon(1e-12));
    CHECK(traj.states(n, 1) == doctest::Approx(0.0));
}

TEST_CASE("rough increment variance matches c^2 dt") {
    ModelSpec m = make_cyclic_feedback();
    Vec psi(2);
    psi << 0.2, 0.15;
    const int n = 10000;
    Trajectory traj = simulate(m, psi, Vec::Zero(3), 20.0, n, 5);
    const double dt = traj.dt();
    Vec inc = traj.states.col(2).tail(n) - traj.states.col(2).head(n);
    const double mean = inc.mean();
    const double var = (inc.array() - mean).square().sum() / (n - 1);
    CHECK(var == doctest::Approx(0.15 * 0.15 * dt).epsilon(0.15));
}

TEST_CASE("reproducibility: same seed gives bitwise-identical paths") {
    ModelSpec m = make_fhn();
    Vec psi(5);
    psi << 0.1, 1.5, 0.8, 0.0, 0.3;
    Trajectory a = simulate(m, psi, Vec::Zero(2), 5.0, 500, 77);
    Trajectory b = simulate(m, psi, Vec::Zero(2), 5.0, 500, 77);
    Trajectory c = simulate(m, psi, Vec::Zero(2), 5.0, 500, 78);
    CHECK((a.states - b.states).lpNorm<Eigen::Infinity>() == 0.0);
    CHECK((a.states - c.states).lpNorm<Eigen::Infinity>() > 0.0);
}

TEST_CASE("smooth coordinates receive no single-step noise") {
    ModelSpec m = make_fhn();
    Vec psi(5);
    psi << 0.1, 1.5, 0.8, 0.0, 0.3;
    Trajectory traj = simulate(m, psi, Vec::Zero(2), 2.0, 200, 9);
    const double dt = traj.dt();
    for (int i = 0; i < 200; ++i) {
        Vec z = traj.states.row(i).transpose();
        const double expected = z[0] + dt * m.drift(z, traj.times[i], psi)[0];
        CHECK(traj.states(i + 1, 0) == doctest::Approx(expected).epsilon(1e-14));
    }
}

TEST_CASE("noiseless simulation equals the tracking dynamics with u = 0") {
    ModelSpec m = make_cyclic_feedback();
    Vec psi(2);
    psi << 0.2, 1e-300;
    Vec z0(3);
    z0 << 0.5, -0.3, 0.2;
    const int n = 100;
    Trajectory traj = simulate(m, psi, z0, 2.0, n, 11);
    Linearization lin =
        build_linearization(m, psi, traj.states, traj.observations, traj.dt(), 1.0);
    Mat u = Mat::Zero(n, 1);
    Vec z = z0;
    for (int i = 0; i < n; ++i) {
        z = lin.Abar[i] * z + lin.dt * lin.r[i];
        CHECK((z - traj.states.row(i + 1).transpose()).lpNorm<Eigen::Infinity>() < 1e-10);
    }
    CHECK(cost_eval(lin, u, z0) < 1e-15);
}

TEST_CASE("observe") {
    ModelSpec m = make_cyclic_feedback();
    Vec psi(2);
    psi << 0.2, 0.15;
    Trajectory traj = simulate(m, psi, Vec::Zero(3), 1.0, 50, 13);
    SUBCASE("matches the stored observations and the first column") {
        Mat Y = observe(m, traj);
        CHECK((Y - traj.observations).lpNorm<Eigen::Infinity>() == 0.0);
        CHECK((Y.col(0) - traj.states.col(0)).lpNorm<Eigen::Infinity>() == 0.0);
    }
    SUBCASE("identity C returns the full state") {
        ModelSpec full = m;
        full.C = Mat::Identity(3, 3);
        Mat Y = observe(full, traj);
        CHECK((Y - traj.states).lpNorm<Eigen::Infinity>() == 0.0);
    }
}

TEST_CASE("explosion guard reports the step index") {
    ModelSpec m;
    m.name = "blowup";
    m.d_V = 0;
    m.d_U = 1;
    m.C = Mat::Identity(1, 1);
    m.params = {{"s", true, true, {}}};
    m.drift = [](const Vec& z, double, const Vec&) { return (z.array() * 1e5).matrix().eval(); };
    m.pseudo_A = [](const Vec&, double, const Vec&) { return (1e5 * Mat::Identity(1, 1)).eval(); };
    m.pseudo_r = [](double, const Vec&) { return Vec::Zero(1).eval(); };
    m.diffusion_B = [](const Vec&, double, const Vec& psi) {
        Mat B(1, 1);
        B << psi[0];
        return B;
    };
    CHECK_THROWS_AS(simulate(m, (Vec(1) << 1.0).finished(), Vec::Ones(1), 10.0, 100, 1),
                    ExplosionError);
}

TEST_CASE("argument validation") {
    ModelSpec m = make_cyclic_feedback();
    Vec psi(2);
    psi << 0.2, 0.15;
    CHECK_THROWS_AS(simulate(m, psi, Vec::Zero(3), 0.0, 10, 1), std::invalid_argument);
    CHECK_THROWS_AS(simulate(m, psi, Vec::Zero(3), 1.0, 0, 1), std::invalid_argument);
    CHECK_THROWS_AS(simulate(m, psi, Vec::Zero(2), 1.0, 10, 1), std::invalid_argument);
}
