#include "hypoctrl/simulate.hpp"

#include <cmath>
#include <random>

namespace hypoctrl {

std::uint64_t derive_seed(std::uint64_t seed0, std::uint64_t stream) {
    // splitmix64 over (seed0, stream)
    std::uint64_t x = seed0 + 0x9E3779B97F4A7C15ULL * (stream + 1);
    x ^= x >> 30; x *= 0xBF58476D1CE4E5B9ULL;
    x ^= x >> 27; x *= 0x94D049BB133111EBULL;
    x ^= x >> 31;
    return x;
}

Trajectory simulate(const ModelSpec& model, const Vec& psi, const Vec& Z0, double T,
                    int n, std::uint64_t seed) {
    if (!(T > 0.0)) throw std::invalid_argument("simulate: T must be > 0");
    if (n < 1) throw std::invalid_argument("simulate: n must be >= 1");
    if (Z0.size() != model.d()) throw std::invalid_argument("simulate: Z0 has wrong dimension");
    model.validate_params(psi);

    const int d = model.d();
    const double dt = T / n;
    const double sqdt = std::sqrt(dt);

    Trajectory traj;
    traj.seed = seed;
    traj.times = Vec::LinSpaced(n + 1, 0.0, T);
    traj.states = Mat::Zero(n + 1, d);
    traj.states.row(0) = Z0.transpose();

    std::mt19937_64 gen(derive_seed(seed, 0));
    std::normal_distribution<double> normal(0.0, 1.0);

    Vec z = Z0, u(model.d_U);
    for (int i = 0; i < n; ++i) {
        const double t = traj.times[i];
        for (int j = 0; j < model.d_U; ++j) u[j] = normal(gen);
        Vec f = model.drift(z, t, psi);
        Mat B = model.diffusion_B(z, t, psi);
        z.head(model.d_V) += dt * f.head(model.d_V);
        z.tail(model.d_U) += dt * f.tail(model.d_U) + sqdt * (B * u);
        if (!z.allFinite() || z.lpNorm<Eigen::Infinity>() > 1e8) throw ExplosionError(i + 1);
        traj.states.row(i + 1) = z.transpose();
    }
    traj.observations = traj.states * model.C.transpose();
    return traj;
}

Mat observe(const ModelSpec& model, const Trajectory& traj) {
    return traj.states * model.C.transpose();
}

}  // namespace hypoctrl
