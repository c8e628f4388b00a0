#include "hypoctrl/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hypoctrl {

Mat ModelSpec::gamma(const Vec& z, double t, const Vec& psi) const {
    Mat G = Mat::Zero(d(), d_U);
    G.bottomRows(d_U) = diffusion_B(z, t, psi);
    return G;
}

void ModelSpec::validate_params(const Vec& psi) const {
    if (psi.size() != n_params())
        throw std::invalid_argument(name + ": expected " + std::to_string(n_params()) +
                                    " parameters, got " + std::to_string(psi.size()));
    for (int k = 0; k < n_params(); ++k) {
        const auto& p = params[k];
        if (p.positive && !(psi[k] > 0.0))
            throw std::invalid_argument(name + ": parameter " + p.name + " must be > 0");
        if (p.fixed && psi[k] != *p.fixed)
            throw std::invalid_argument(name + ": parameter " + p.name + " is fixed to " +
                                        std::to_string(*p.fixed));
    }
}

int ModelSpec::param_index(const std::string& pname) const {
    for (int k = 0; k < n_params(); ++k)
        if (params[k].name == pname) return k;
    throw std::invalid_argument(name + ": no parameter named " + pname);
}

std::vector<int> ModelSpec::free_indices() const {
    std::vector<int> idx;
    for (int k = 0; k < n_params(); ++k)
        if (!params[k].fixed) idx.push_back(k);
    return idx;
}

ModelSpec make_cyclic_feedback() {
    ModelSpec m;
    m.name = "cyclic";
    m.d_V = 2;
    m.d_U = 1;
    m.C = Mat::Zero(1, 3);
    m.C(0, 0) = 1.0;
    m.params = {{"nu", false, false, {}}, {"c", true, true, {}}};
    m.pseudo_A = [](const Vec&, double, const Vec& psi) {
        const double nu = psi[0];
        Mat A = Mat::Zero(3, 3);
        A(0, 0) = -nu; A(0, 1) = 1.0;
        A(1, 1) = -nu; A(1, 2) = 1.0;
        A(2, 2) = -nu;
        return A;
    };
    m.pseudo_r = [](double, const Vec&) { return Vec::Zero(3).eval(); };
    m.drift = [A = m.pseudo_A](const Vec& z, double t, const Vec& psi) {
        return (A(z, t, psi) * z).eval();
    };
    m.diffusion_B = [](const Vec&, double, const Vec& psi) {
        Mat B(1, 1);
        B(0, 0) = psi[1];
        return B;
    };
    return m;
}

ModelSpec make_fhn() {
    ModelSpec m;
    m.name = "fhn";
    m.d_V = 1;
    m.d_U = 1;
    m.C = Mat::Zero(1, 2);
    m.C(0, 0) = 1.0;
    m.params = {{"eps", true, false, {}},
                {"gamma", false, false, {}},
                {"beta", false, false, {}},
                {"s", false, false, 0.0},
                {"sigma", true, true, {}}};
    m.pseudo_A = [](const Vec& z, double, const Vec& psi) {
        const double eps = psi[0], gam = psi[1];
        const double V = z[0];
        Mat A(2, 2);
        A(0, 0) = (1.0 - V * V) / eps; A(0, 1) = -1.0 / eps;
        A(1, 0) = gam;                 A(1, 1) = -1.0;
        return A;
    };
    m.pseudo_r = [](double, const Vec& psi) {
        Vec r(2);
        r[0] = psi[3] / psi[0];  // s / eps
        r[1] = psi[2];           // beta
        return r;
    };
    m.drift = [](const Vec& z, double, const Vec& psi) {
        const double eps = psi[0], gam = psi[1], beta = psi[2], s = psi[3];
        const double V = z[0], U = z[1];
        Vec f(2);
        f[0] = (V - V * V * V - U + s) / eps;
        f[1] = gam * V - U + beta;
        return f;
    };
    m.diffusion_B = [](const Vec&, double, const Vec& psi) {
        Mat B(1, 1);
        B(0, 0) = psi[4];
        return B;
    };
    return m;
}

ModelSpec make_synaptic_conductance(const SynapticConstants& c) {
    if (!(c.C_c > 0.0))
        throw std::invalid_argument("synaptic: capacitance C_c must be > 0");
    ModelSpec m;
    m.name = "synaptic";
    m.d_V = 1;
    m.d_U = 2;
    m.C = Mat::Zero(1, 3);
    m.C(0, 0) = 1.0;
    m.params = {{"tau_E", true, false, {}},
                {"tau_I", true, false, {}},
                {"g_I", true, false, {}},
                {"sigma_E", true, true, {}},
                {"sigma_I", true, true, {}}};
    m.pseudo_A = [c](const Vec& z, double, const Vec& psi) {
        const double tau_E = psi[0], tau_I = psi[1];
        const double V = z[0];
        Mat A = Mat::Zero(3, 3);
        A(0, 0) = -c.G_L / c.C_c;
        A(0, 1) = -(V - c.V_E) / c.C_c;
        A(0, 2) = -(V - c.V_I) / c.C_c;
        A(1, 1) = -1.0 / tau_E;
        A(2, 2) = -1.0 / tau_I;
        return A;
    };
    m.pseudo_r = [c](double, const Vec& psi) {
        Vec r(3);
        r[0] = (c.G_L * c.V_L + c.I_inj) / c.C_c;
        r[1] = c.g_E / psi[0];
        r[2] = psi[2] / psi[1];  // g_I / tau_I
        return r;
    };
    m.drift = [c](const Vec& z, double, const Vec& psi) {
        const double tau_E = psi[0], tau_I = psi[1], g_I = psi[2];
        const double V = z[0], G_E = z[1], G_I = z[2];
        Vec f(3);
        f[0] = (-c.G_L * (V - c.V_L) - G_E * (V - c.V_E) - G_I * (V - c.V_I) + c.I_inj) / c.C_c;
        f[1] = -(G_E - c.g_E) / tau_E;
        f[2] = -(G_I - g_I) / tau_I;
        return f;
    };
    m.diffusion_B = [](const Vec& z, double, const Vec& psi) {
        // sqrt-clamp: Euler steps may push a conductance below zero
        Mat B = Mat::Zero(2, 2);
        B(0, 0) = psi[3] * std::sqrt(std::max(z[1], 0.0));
        B(1, 1) = psi[4] * std::sqrt(std::max(z[2], 0.0));
        return B;
    };
    return m;
}

ModelSpec model_by_name(const std::string& id) {
    if (id == "cyclic") return make_cyclic_feedback();
    if (id == "fhn") return make_fhn();
    if (id == "synaptic") return make_synaptic_conductance();
    throw std::invalid_argument("unknown model '" + id + "'; available: cyclic, fhn, synaptic");
}

std::vector<std::string> builtin_model_names() { return {"cyclic", "fhn", "synaptic"}; }

double check_pseudo_linear(const ModelSpec& model, const Vec& psi,
                           const std::vector<std::pair<Vec, double>>& samples) {
    if (samples.empty())
        throw std::invalid_argument("check_pseudo_linear: samples must be nonempty");
    double worst = 0.0;
    for (const auto& [z, t] : samples) {
        Vec resid = model.pseudo_A(z, t, psi) * z + model.pseudo_r(t, psi) -
                    model.drift(z, t, psi);
        worst = std::max(worst, resid.lpNorm<Eigen::Infinity>());
    }
    return worst;
}

}  // namespace hypoctrl
