#pragma once

// exp(-i H t) psi for Hermitian H by Lanczos-Krylov projection with adaptive substeps.
// Step acceptance uses the standard a-posteriori estimate
//   err ~ ||psi|| * beta_m * |[exp(-i tau T_m) e_1]_m|.

#include <bectwist/errors.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>

namespace bectwist {

struct KrylovOptions {
  int krylov_dim = 30;
  double tolerance = 1e-10;       // per-step error estimate
  double min_step = 1e-12;        // relative to |t|; smaller steps count as underflow
  double max_norm_drift = 1e-6;
};

struct PropagationStats {
  int steps = 0;
  int rejected = 0;
  long matvecs = 0;
  double max_error_estimate = 0.0;
  double norm_error = 0.0;
};

template <class Op>
Eigen::VectorXcd krylov_propagate(const Op& op, Eigen::VectorXcd psi, double t,
                                  const KrylovOptions& opts = {}, PropagationStats* stats = nullptr) {
  using cplx = std::complex<double>;
  PropagationStats local;
  PropagationStats& st = stats ? *stats : local;
  st = {};
  const double norm0 = psi.norm();
  if (t == 0.0 || norm0 == 0.0) return psi;

  const Eigen::Index dim = psi.size();
  const int m_max = static_cast<int>(std::min<Eigen::Index>(opts.krylov_dim, dim));
  const double direction = t > 0.0 ? 1.0 : -1.0;
  double remaining = std::abs(t);
  double tau_guess = remaining;

  Eigen::MatrixXcd basis(dim, m_max);
  Eigen::VectorXcd v(dim), w(dim);

  while (remaining > 0.0) {
    const double beta0 = psi.norm();
    basis.col(0) = psi / beta0;
    Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(m_max, m_max);
    int m = m_max;
    double beta_next = 0.0;
    for (int k = 0; k < m_max; ++k) {
      v = basis.col(k);
      op(v, w);
      ++st.matvecs;
      for (int pass = 0; pass < 2; ++pass) {
        const Eigen::VectorXcd overlaps = basis.leftCols(k + 1).adjoint() * w;
        w.noalias() -= basis.leftCols(k + 1) * overlaps;
        if (pass == 0) tri(k, k) = overlaps(k).real();
      }
      const double b = w.norm();
      if (b < 1e-13 * std::max(1.0, std::abs(tri(k, k)))) {  // invariant subspace: exact
        m = k + 1;
        beta_next = 0.0;
        break;
      }
      if (k + 1 < m_max) {
        tri(k, k + 1) = tri(k + 1, k) = b;
        basis.col(k + 1) = w / b;
      } else {
        beta_next = b;
      }
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tri.topLeftCorner(m, m));
    const Eigen::VectorXd first_row = es.eigenvectors().row(0).transpose();
    auto small_exp = [&](double tau) {
      Eigen::VectorXcd c(m);
      for (int i = 0; i < m; ++i) c(i) = std::polar(first_row(i), -direction * tau * es.eigenvalues()(i));
      return Eigen::VectorXcd(es.eigenvectors().cast<cplx>() * c);
    };

    double tau = std::min(tau_guess, remaining);
    Eigen::VectorXcd y;
    double err = 0.0;
    while (true) {
      y = small_exp(tau);
      err = beta0 * beta_next * std::abs(y(m - 1));
      if (err <= opts.tolerance || beta_next == 0.0) break;
      ++st.rejected;
      tau *= std::clamp(0.9 * std::pow(opts.tolerance / err, 1.0 / m), 0.05, 0.9);
      if (tau < opts.min_step * std::abs(t))
        throw NumericalError("Krylov propagation step size underflow");
    }

    psi = beta0 * (basis.leftCols(m) * y);
    remaining -= tau;
    if (remaining < 1e-14 * std::abs(t)) remaining = 0.0;
    ++st.steps;
    st.max_error_estimate = std::max(st.max_error_estimate, err);
    const double grow = err > 0.0 ? std::clamp(0.9 * std::pow(opts.tolerance / err, 1.0 / m), 1.0, 2.0) : 2.0;
    tau_guess = tau * grow;
  }

  st.norm_error = std::abs(psi.norm() - norm0) / norm0;
  if (st.norm_error > opts.max_norm_drift)
    throw NumericalError("Krylov propagation norm drift " + std::to_string(st.norm_error));
  return psi;
}

}  // namespace bectwist
