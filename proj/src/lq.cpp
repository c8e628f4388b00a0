#include "hypoctrl/lq.hpp"

#include <cmath>
#include <stdexcept>

namespace hypoctrl {

RiccatiSolution riccati_backward(const Linearization& lin) {
    const int n = lin.n_steps();
    const int d = lin.d();
    const int m = lin.d_U();
    if (!(lin.w > 0.0)) throw std::invalid_argument("riccati_backward: w must be > 0");
    if (lin.Y.rows() != n + 1) throw std::invalid_argument("riccati_backward: Y/A length mismatch");

    const Mat CtC = lin.C.transpose() * lin.C;
    const Mat Im_over_w = (1.0 / lin.w) * Mat::Identity(m, m);

    RiccatiSolution ricc;
    ricc.E.resize(n + 1);
    ricc.h.resize(n + 1);
    ricc.E[n] = CtC;
    ricc.h[n] = -lin.C.transpose() * lin.Y.row(n).transpose();

    for (int i = n - 1; i >= 0; --i) {
        const Mat& A = lin.Abar[i];
        const Mat& G_i = lin.Gamma[i];
        const Mat& En = ricc.E[i + 1];
        const Vec& hn = ricc.h[i + 1];
        const Vec& ri = lin.r[i];

        Mat EG = En * G_i;                              // d x m
        Mat inner = Im_over_w + lin.dt * G_i.transpose() * EG;  // SPD for w > 0
        Eigen::LLT<Mat> llt(inner);
        if (llt.info() != Eigen::Success)
            throw std::runtime_error("riccati_backward: inner matrix not SPD at step " +
                                     std::to_string(i));
        Mat AtEG = A.transpose() * EG;                  // d x m
        Mat Ei = A.transpose() * En * A + CtC -
                 lin.dt * AtEG * llt.solve(AtEG.transpose());
        ricc.E[i] = 0.5 * (Ei + Ei.transpose());

        Vec Er = En * ri;
        ricc.h[i] = lin.dt * A.transpose() * Er + A.transpose() * hn -
                    lin.C.transpose() * lin.Y.row(i).transpose() -
                    lin.dt * AtEG * llt.solve(G_i.transpose() * (hn + lin.dt * Er));
        if (!ricc.E[i].allFinite() || !ricc.h[i].allFinite())
            throw std::runtime_error("riccati_backward: non-finite propagation at step " +
                                     std::to_string(i));
    }
    return ricc;
}

ControlSolution control_forward(const Linearization& lin, const RiccatiSolution& ricc,
                                const Vec& Z0) {
    const int n = lin.n_steps();
    const int m = lin.d_U();
    const double sqdt = std::sqrt(lin.dt);
    const Mat Im_over_w = (1.0 / lin.w) * Mat::Identity(m, m);

    ControlSolution sol;
    sol.Z0_used = Z0;
    sol.u_bar = Mat::Zero(n, m);
    sol.Z_bar = Mat::Zero(n + 1, lin.d());
    sol.Z_bar.row(0) = Z0.transpose();

    Vec z = Z0;
    for (int i = 0; i < n; ++i) {
        const Mat& G_i = lin.Gamma[i];
        const Mat& En = ricc.E[i + 1];
        Vec pred = lin.Abar[i] * z + lin.dt * lin.r[i];
        Mat inner = Im_over_w + lin.dt * G_i.transpose() * En * G_i;
        Vec u = -sqdt * Eigen::LLT<Mat>(inner).solve(
                            G_i.transpose() * (En * pred + ricc.h[i + 1]));
        z = pred + sqdt * G_i * u;
        if (!z.allFinite())
            throw std::runtime_error("control_forward: non-finite state at step " +
                                     std::to_string(i + 1));
        sol.u_bar.row(i) = u.transpose();
        sol.Z_bar.row(i + 1) = z.transpose();
    }
    sol.cost = cost_eval(lin, sol.u_bar, Z0);
    return sol;
}

double cost_eval(const Linearization& lin, const Mat& u, const Vec& Z0) {
    const int n = lin.n_steps();
    if (u.rows() != n || u.cols() != lin.d_U())
        throw std::invalid_argument("cost_eval: control has wrong shape");
    const double sqdt = std::sqrt(lin.dt);

    double cost = 0.0;
    Vec z = Z0;
    for (int i = 0; i < n; ++i) {
        cost += u.row(i).squaredNorm() / lin.w;
        z = lin.Abar[i] * z + lin.dt * lin.r[i] + sqdt * lin.Gamma[i] * u.row(i).transpose();
        cost += (lin.C * z - lin.Y.row(i + 1).transpose()).squaredNorm();
    }
    return cost;
}

Vec estimate_Z0(const RiccatiSolution& ricc) {
    const Mat& E0 = ricc.E[0];
    Eigen::FullPivLU<Mat> lu(E0);
    if (!lu.isInvertible())
        throw std::runtime_error("estimate_Z0: E_0 singular, initial condition not identifiable");
    return -lu.solve(ricc.h[0]);
}

Linearization build_linearization(const ModelSpec& model, const Vec& psi, const Mat& Zlin,
                                  const Mat& Y, double dt, double w) {
    const int n = static_cast<int>(Y.rows()) - 1;
    const int d = model.d();
    Linearization lin;
    lin.dt = dt;
    lin.C = model.C;
    lin.Y = Y;
    lin.w = w;
    lin.Abar.resize(n);
    lin.r.resize(n);
    lin.Gamma.resize(n);
    const Mat I = Mat::Identity(d, d);
    for (int i = 0; i < n; ++i) {
        const double t = i * dt;
        Vec z = Zlin.row(i).transpose();
        lin.Abar[i] = I + dt * model.pseudo_A(z, t, psi);
        lin.r[i] = model.pseudo_r(t, psi);
        lin.Gamma[i] = model.gamma(z, t, psi);
    }
    return lin;
}

}  // namespace hypoctrl
