#pragma once

// Lowest eigenpair of a Hermitian operator by Lanczos with full reorthogonalisation and
// explicit restarts. The operator is any callable op(const VectorXcd& x, VectorXcd& y)
// that writes y = H x.

#include <bectwist/errors.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

namespace bectwist {

struct LanczosOptions {
  int max_krylov = 250;
  int max_restarts = 40;
  double tolerance = 1e-10;  // on || H x - theta x ||
  int check_every = 5;
  std::uint32_t seed = 20090601u;
};

struct LanczosResult {
  double eigenvalue = 0.0;
  Eigen::VectorXcd eigenvector;
  int iterations = 0;  // total matrix-vector products
  double residual = 0.0;
};

/// Deterministic pseudo-random unit vector (raw mt19937 words, no distribution objects,
/// so the sequence is identical across standard libraries).
inline Eigen::VectorXcd deterministic_start_vector(Eigen::Index dim, std::uint32_t seed) {
  std::mt19937 gen(seed);
  Eigen::VectorXcd v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    const double re = static_cast<double>(gen()) / 4294967296.0 - 0.5;
    const double im = static_cast<double>(gen()) / 4294967296.0 - 0.5;
    v(i) = {re, im};
  }
  return v / v.norm();
}

template <class Op>
LanczosResult lanczos_ground_state(const Op& op, Eigen::Index dim, const LanczosOptions& opts = {}) {
  if (dim <= 0) throw ValidationError("dimension", "must be positive");
  Eigen::VectorXcd start = deterministic_start_vector(dim, opts.seed);
  const int m_max = static_cast<int>(std::min<Eigen::Index>(opts.max_krylov, dim));

  LanczosResult best;
  best.residual = std::numeric_limits<double>::infinity();
  Eigen::MatrixXcd basis(dim, m_max);
  Eigen::VectorXcd w(dim), v(dim);

  for (int restart = 0; restart <= opts.max_restarts; ++restart) {
    std::vector<double> alpha, beta;
    basis.col(0) = start;
    int k = 0;
    bool stop = false;
    while (!stop) {
      v = basis.col(k);
      op(v, w);
      ++best.iterations;
      const double a = std::real(basis.col(k).dot(w));
      alpha.push_back(a);
      // two passes of classical Gram-Schmidt against the whole basis
      for (int pass = 0; pass < 2; ++pass) {
        const Eigen::VectorXcd overlaps = basis.leftCols(k + 1).adjoint() * w;
        w.noalias() -= basis.leftCols(k + 1) * overlaps;
      }
      const double b = w.norm();

      const bool last = (k + 1 == m_max);
      const bool breakdown = b < 1e-13 * std::max(1.0, std::abs(a));
      if (last || breakdown || (k + 1) % opts.check_every == 0) {
        const int n = k + 1;
        Eigen::MatrixXd t = Eigen::MatrixXd::Zero(n, n);
        for (int i = 0; i < n; ++i) {
          t(i, i) = alpha[static_cast<std::size_t>(i)];
          if (i + 1 < n) t(i, i + 1) = t(i + 1, i) = beta[static_cast<std::size_t>(i)];
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
        const Eigen::VectorXd s = es.eigenvectors().col(0);
        const double estimate = breakdown ? 0.0 : b * std::abs(s(n - 1));
        if (estimate < opts.tolerance || last || breakdown) {
          Eigen::VectorXcd x = basis.leftCols(n) * s.cast<std::complex<double>>();
          x /= x.norm();
          Eigen::VectorXcd hx(dim);
          op(x, hx);
          ++best.iterations;
          const double rq = std::real(x.dot(hx));
          const double residual = (hx - rq * x).norm();
          best.eigenvalue = rq;
          best.eigenvector = x;
          best.residual = residual;
          if (residual < opts.tolerance) return best;
          start = x;
          stop = true;
          continue;
        }
      }
      beta.push_back(b);
      basis.col(k + 1) = w / b;
      ++k;
    }
  }
  throw ConvergenceError(best.residual, "Lanczos ground state did not converge");
}

}  // namespace bectwist
