#pragma once

#include <vector>

#include "hypoctrl/model.hpp"

namespace hypoctrl {

/// Per-window pieces of the lagged contrast H^{m_B}. Row i of X is the
/// residual of the (m_B+1)-step-ahead observation; Sigma[i] is its
/// covariance built from the propagated diffusion blocks.
struct ContrastEval {
    Mat X;                   // (n - m_B - 1) x d_o
    std::vector<Mat> Sigma;  // d_o x d_o each
    std::vector<double> logdets;
    double value = 0.0;
    bool overlapping_residuals = false;  // diagnostic: several G-blocks nonzero
};

struct H1ViolationError : std::runtime_error {
    int index;
    explicit H1ViolationError(int i)
        : std::runtime_error("covariance not positive definite at window " +
                             std::to_string(i) + " (H1 violation)"),
          index(i) {}
};

/// Evaluates the lagged residuals, covariances and contrast value from the
/// state predictor Zbar. Products of the one-step transition matrices use
/// sequential left multiplication with empty product = identity. Throws
/// H1ViolationError when a window covariance is singular after jitter.
ContrastEval lagged_terms(const ModelSpec& model, const Vec& psi, const Mat& Zbar,
                          const Mat& Y, double dt, int m_B);

/// Monte Carlo oracle for a single window covariance: draws standard
/// normal increments, forms sum_r G_{i+r} u_{i+r}, and returns the
/// empirical covariance. `z_window` holds the m_B + 1 linearization states.
Mat mc_covariance_check(const ModelSpec& model, const Vec& psi,
                        const std::vector<Vec>& z_window, double dt, int m_B,
                        int n_samples, std::uint64_t seed = 7777);

}  // namespace hypoctrl
