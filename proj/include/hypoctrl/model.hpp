#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace hypoctrl {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// One named parameter. Entries flagged `positive` must stay > 0; entries
/// with a `fixed` value are frozen and excluded from optimization. `sigma`
/// marks diffusion parameters (the rest belong to the drift).
struct ParamDescriptor {
    std::string name;
    bool positive = false;
    bool sigma = false;
    std::optional<double> fixed;
};

/// SDE model in pseudo-linear form. The state z = (V, U) stacks d_V smooth
/// coordinates over d_U rough ones. The drift must satisfy
///   pseudo_A(z,t,psi) * z + pseudo_r(t,psi) == drift(z,t,psi)
/// and only the rough block receives noise: Gamma = [0; B].
/// All evaluators take the full flattened parameter vector psi (ordered as
/// in `params`) and must be pure so concurrent workers can share a model.
struct ModelSpec {
    std::string name;
    int d_V = 0;
    int d_U = 0;
    Mat C;  // d_o x d, constant, full row rank
    std::vector<ParamDescriptor> params;

    std::function<Vec(const Vec& z, double t, const Vec& psi)> drift;
    std::function<Mat(const Vec& z, double t, const Vec& psi)> pseudo_A;  // d x d
    std::function<Vec(double t, const Vec& psi)> pseudo_r;                // d
    std::function<Mat(const Vec& z, double t, const Vec& psi)> diffusion_B;  // d_U x d_U

    int d() const { return d_V + d_U; }
    int d_o() const { return static_cast<int>(C.rows()); }
    int n_params() const { return static_cast<int>(params.size()); }

    /// Full diffusion matrix Gamma = [0_{d_V x d_U}; B], d x d_U.
    Mat gamma(const Vec& z, double t, const Vec& psi) const;

    /// Throws std::invalid_argument on positivity or fixed-value violations.
    void validate_params(const Vec& psi) const;

    int param_index(const std::string& pname) const;

    /// Indices of parameters free for optimization (no fixed value).
    std::vector<int> free_indices() const;
};

/// Monotone cyclic feedback system: three coordinates, linear drift with
/// -nu on the diagonal and 1 on the superdiagonal, noise on X3 only.
ModelSpec make_cyclic_feedback();

/// Hypoelliptic FitzHugh-Nagumo model; stimulus s is fixed to 0.
ModelSpec make_fhn();

struct SynapticConstants {
    double C_c = 1.0;
    double G_L = 50.0;
    double V_L = -70.0;
    double V_E = 0.0;
    double V_I = -80.0;
    double I_inj = -60.0;
    double g_E = 17.8;
};

/// Synaptic-conductance model with the given frozen physical constants.
/// Free parameters: tau_E, tau_I, g_I, sigma_E, sigma_I (all positive).
/// Throws std::invalid_argument if C_c <= 0.
ModelSpec make_synaptic_conductance(const SynapticConstants& c = {});

/// Lookup by identifier "cyclic" | "fhn" | "synaptic"; throws on unknown id.
ModelSpec model_by_name(const std::string& id);

std::vector<std::string> builtin_model_names();

/// Max over samples of |A(z,t)z + r(t) - f(z,t)|_inf, a registration-time
/// self-check of the pseudo-linear decomposition.
double check_pseudo_linear(const ModelSpec& model, const Vec& psi,
                           const std::vector<std::pair<Vec, double>>& samples);

}  // namespace hypoctrl
