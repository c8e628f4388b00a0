#pragma once

#include <vector>

#include "hypoctrl/model.hpp"

namespace hypoctrl {

/// Frozen-coefficient linearization of the tracking problem: dynamics
///   Z_{i+1} = Abar_i Z_i + dt r_i + sqrt(dt) Gamma_i u_i,  i = 0..n-1,
/// with Abar_i = I + dt A(z_i, t_i), observations Y (rows 0..n) and balance
/// weight w > 0.
struct Linearization {
    std::vector<Mat> Abar;   // n matrices, d x d
    std::vector<Vec> r;      // n vectors, d
    std::vector<Mat> Gamma;  // n matrices, d x d_U
    double dt = 0.0;
    Mat C;  // d_o x d
    Mat Y;  // (n+1) x d_o
    double w = 1.0;

    int n_steps() const { return static_cast<int>(Abar.size()); }
    int d() const { return static_cast<int>(C.cols()); }
    int d_o() const { return static_cast<int>(C.rows()); }
    int d_U() const { return Gamma.empty() ? 0 : static_cast<int>(Gamma[0].cols()); }
};

/// Backward Riccati sequences, indexed 0..n. E_n = C^T C, h_n = -C^T Y_n.
/// E_0 and h_0 carry the full profiled quadratic in Z0 (the i = 0 data term
/// included), which estimate_Z0 minimizes.
struct RiccatiSolution {
    std::vector<Mat> E;
    std::vector<Vec> h;
};

/// Optimal tracking solution. `cost` is C_w under the convention: data
/// terms i = 1..n, control terms i = 0..n-1 (the i = 0 data term is
/// constant in u and excluded from the reported value).
struct ControlSolution {
    Mat u_bar;  // n x d_U
    Mat Z_bar;  // (n+1) x d
    double cost = 0.0;
    Vec Z0_used;
};

/// Backward recursion of the tracking Riccati equation, run down to index
/// 0 with per-step resymmetrization of E.
RiccatiSolution riccati_backward(const Linearization& lin);

/// Forward pass: u_i = -sqrt(dt) G(E_{i+1}) Gamma_i^T (E_{i+1}(Abar_i Z_i +
/// dt r_i) + h_{i+1}) and the induced state sequence.
ControlSolution control_forward(const Linearization& lin, const RiccatiSolution& ricc,
                                const Vec& Z0);

/// Rolls the dynamics with the given control and evaluates C_w(u | Y; Z0).
double cost_eval(const Linearization& lin, const Mat& u, const Vec& Z0);

/// Profiled initial condition -E_0^{-1} h_0. Throws std::runtime_error when
/// E_0 is numerically singular (non-identifiable initial condition).
Vec estimate_Z0(const RiccatiSolution& ricc);

/// Builds the Linearization for `model` with coefficients frozen at the
/// states `Zlin` (rows 0..n; row i used for step i).
Linearization build_linearization(const ModelSpec& model, const Vec& psi, const Mat& Zlin,
                                  const Mat& Y, double dt, double w);

}  // namespace hypoctrl
