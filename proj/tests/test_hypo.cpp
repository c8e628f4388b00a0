#include <doctest.h>

#include "hypoctrl/hypo.hpp"
#include "hypoctrl/simulate.hpp"

using namespace hypoctrl;

namespace {

// Elliptic toy: d_V = 0, two rough coordinates, linear drift.
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

Vec cyclic_psi() { return (Vec(2) << 0.2, 0.15).finished(); }
Vec fhn_psi() { return (Vec(5) << 0.1, 1.5, 0.8, 0.0, 0.3).finished(); }

}  // namespace

TEST_CASE("connexity lags match the published values") {
    auto probes3 = probe_box(3, -3, 3, 50, 1);
    auto probes2 = probe_box(2, -3, 3, 50, 2);

    LagReport cyclic = connexity_lags(make_cyclic_feedback(), cyclic_psi(), probes3);
    CHECK(cyclic.m_B == 2);
    REQUIRE(cyclic.m_l.size() == 2);
    CHECK(*cyclic.m_l[0] == 2);  // X3 -> X2 -> X1
    CHECK(*cyclic.m_l[1] == 1);  // X3 -> X2

    LagReport fhn = connexity_lags(make_fhn(), fhn_psi(), probes2);
    CHECK(fhn.m_B == 1);
    CHECK(*fhn.m_l[0] == 1);

    LagReport elliptic = connexity_lags(make_elliptic_toy(),
                                        (Vec(3) << 0.3, 0.2, 0.2).finished(), probes2);
    CHECK(elliptic.m_B == 0);
    CHECK(elliptic.m_l.empty());

    Vec psi_syn(5);
    psi_syn << 0.5, 1.0, 9.4, 0.1, 0.1;
    LagReport syn = connexity_lags(make_synaptic_conductance(), psi_syn, probes3);
    CHECK(syn.m_B == 1);
}

TEST_CASE("connexity is invariant to positive rescaling of the parameters") {
    auto probes = probe_box(3, -3, 3, 50, 3);
    ModelSpec m = make_cyclic_feedback();
    LagReport a = connexity_lags(m, cyclic_psi(), probes);
    LagReport b = connexity_lags(m, (10.0 * cyclic_psi()).eval(), probes);
    CHECK(a.m_B == b.m_B);
    CHECK(*a.m_l[0] == *b.m_l[0]);
    CHECK(*a.m_l[1] == *b.m_l[1]);
}

TEST_CASE("connexity failure detected") {
    // smooth coordinate decoupled from the rough one
    ModelSpec m;
    m.d_V = 1;
    m.d_U = 1;
    m.C = Mat::Identity(1, 2);
    m.params = {{"s", true, true, {}}};
    m.drift = [](const Vec& z, double, const Vec&) {
        Vec f(2);
        f[0] = -z[0];
        f[1] = -z[1];
        return f;
    };
    m.pseudo_A = [](const Vec&, double, const Vec&) {
        return (-Mat::Identity(2, 2)).eval();
    };
    m.pseudo_r = [](double, const Vec&) { return Vec::Zero(2).eval(); };
    m.diffusion_B = [](const Vec&, double, const Vec& psi) {
        Mat B(1, 1);
        B << psi[0];
        return B;
    };
    CHECK_THROWS_AS(connexity_lags(m, (Vec(1) << 0.3).finished(), probe_box(2, -3, 3, 20, 4)),
                    ConnexityError);
}

TEST_CASE("H1 rank check") {
    SUBCASE("FHN product is nonzero") {
        ModelSpec m = make_fhn();
        Trajectory traj = simulate(m, fhn_psi(), Vec::Zero(2), 2.0, 200, 5);
        const double dt = traj.dt();
        // symbolic: C(I + dt A)Gamma = dt * (-sigma/eps)
        const double expected = dt * 0.3 / 0.1;
        CHECK(h1_rank_check(m, fhn_psi(), traj, 1) == doctest::Approx(expected).epsilon(1e-9));
    }
    SUBCASE("cyclic: only the dt^2 c term of (I + dt A)^2 survives") {
        ModelSpec m = make_cyclic_feedback();
        Trajectory traj = simulate(m, cyclic_psi(), Vec::Zero(3), 2.0, 100, 6);
        const double dt = traj.dt();
        CHECK(h1_rank_check(m, cyclic_psi(), traj, 2) ==
              doctest::Approx(dt * dt * 0.15).epsilon(1e-9));
    }
    SUBCASE("zero diffusion fails H1") {
        ModelSpec m = make_cyclic_feedback();
        Trajectory traj = simulate(m, cyclic_psi(), Vec::Zero(3), 1.0, 50, 7);
        Vec psi0 = cyclic_psi();
        psi0[1] = 0.0;
        CHECK(h1_rank_check(m, psi0, traj, 2) == 0.0);
    }
}

TEST_CASE("finite-difference lag equals m_l + 1 for every built-in smooth coordinate") {
    auto probes3 = probe_box(3, -3, 3, 50, 8);
    auto probes2 = probe_box(2, -3, 3, 50, 9);
    const double dt = 0.01;

    struct Case {
        ModelSpec model;
        Vec psi;
        Vec z0;
        std::vector<Vec>* probes;
    };
    Vec psi_syn(5);
    psi_syn << 0.5, 1.0, 9.4, 0.1, 0.1;
    std::vector<Case> cases;
    cases.push_back({make_cyclic_feedback(), cyclic_psi(),
                     (Vec(3) << 0.4, -0.2, 0.3).finished(), &probes3});
    cases.push_back({make_fhn(), fhn_psi(), (Vec(2) << 0.3, 0.1).finished(), &probes2});
    cases.push_back({make_synaptic_conductance(), psi_syn,
                     (Vec(3) << -60.0, 10.0, 1.0).finished(), &probes3});

    for (auto& tc : cases) {
        LagReport lags = connexity_lags(tc.model, tc.psi, *tc.probes);
        for (int l = 0; l < tc.model.d_V; ++l) {
            int best = 1 << 20;
            for (int j = 0; j < tc.model.d_U; ++j) {
                auto lag = verify_lag_finite_difference(tc.model, tc.psi, tc.z0, dt, j, l);
                if (lag) best = std::min(best, *lag);
            }
            CHECK(best == *lags.m_l[l] + 1);
        }
    }
}

TEST_CASE("finite-difference lag on the elliptic toy is 0") {
    ModelSpec m = make_elliptic_toy();
    auto lag = verify_lag_finite_difference(m, (Vec(3) << 0.3, 0.2, 0.2).finished(),
                                            (Vec(2) << 1.0, -1.0).finished(), 0.01, 0, 0);
    REQUIRE(lag.has_value());
    CHECK(*lag == 0);
}
