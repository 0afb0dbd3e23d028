#pragma once

// Single impurity on a ring lattice with a Peierls twist per bond. Time in units of
// hbar / J_a (t_d), energies in units of J_a. Exact propagation by dense diagonalisation.

#include <bectwist/errors.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

namespace bectwist {

using cplx = std::complex<double>;

struct LatticeState {
  Eigen::VectorXcd amplitudes;
  double time_t_d = 0.0;
};

struct DriftRunConfig {
  int N_s = 30;
  double alpha_a = 0.0;
  int j0 = 15;  // 1-based site index
  double w_ini = std::numbers::sqrt2;
  std::vector<double> times;
  double hopping_scale = 1.0;  // J~_a / J_a
};

inline void validate(const DriftRunConfig& cfg) {
  if (cfg.N_s < 3) throw ValidationError("N_s", "ring needs at least 3 sites");
  if (cfg.j0 < 1 || cfg.j0 > cfg.N_s) throw ValidationError("j0", "must lie in [1, N_s]");
  if (!(cfg.w_ini > 0.0)) throw ValidationError("w_ini", "must be positive");
  if (!(cfg.hopping_scale >= 0.0) || !std::isfinite(cfg.hopping_scale))
    throw ValidationError("hopping_scale", "must be finite and >= 0");
  if (!std::isfinite(cfg.alpha_a)) throw ValidationError("alpha_a", "must be finite");
  for (std::size_t k = 0; k < cfg.times.size(); ++k) {
    if (!(cfg.times[k] >= 0.0)) throw ValidationError("times", "must be nonnegative");
    if (k > 0 && !(cfg.times[k] > cfg.times[k - 1]))
      throw ValidationError("times", "must be strictly increasing");
  }
}

/// Tight-binding ring with H(j, j+1) = -J e^{2 pi i alpha} (phase on a_j^dag a_{j+1}) and
/// the Hermitian conjugate on the reverse bond; the wrap bond is included.
inline Eigen::MatrixXcd build_single_particle_hamiltonian(int N_s, double alpha_a,
                                                          double hopping = 1.0) {
  if (N_s < 3) throw ValidationError("N_s", "ring needs at least 3 sites");
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(N_s, N_s);
  const cplx bond = -hopping * std::polar(1.0, 2.0 * std::numbers::pi * alpha_a);
  for (int j = 0; j < N_s; ++j) {
    const int next = (j + 1) % N_s;
    h(j, next) = bond;
    h(next, j) = std::conj(bond);
  }
  return h;
}

inline Eigen::MatrixXcd build_single_particle_hamiltonian(const DriftRunConfig& cfg) {
  validate(cfg);
  return build_single_particle_hamiltonian(cfg.N_s, cfg.alpha_a, cfg.hopping_scale);
}

/// -2 J cos(2 pi k / N_s + 2 pi alpha), k = 0..N_s-1, sorted ascending.
inline std::vector<double> analytic_ring_spectrum(int N_s, double alpha_a, double hopping = 1.0) {
  std::vector<double> e(static_cast<std::size_t>(N_s));
  for (int k = 0; k < N_s; ++k)
    e[static_cast<std::size_t>(k)] =
        -2.0 * hopping * std::cos(2.0 * std::numbers::pi * (static_cast<double>(k) / N_s + alpha_a));
  std::sort(e.begin(), e.end());
  return e;
}

/// Normalised Gaussian packet exp(-(j - j0)^2 / 2 w^2), real and positive.
inline LatticeState initial_state(const DriftRunConfig& cfg) {
  validate(cfg);
  Eigen::VectorXcd psi(cfg.N_s);
  for (int j = 1; j <= cfg.N_s; ++j) {
    const double d = static_cast<double>(j - cfg.j0);
    psi(j - 1) = d == 0.0 ? 1.0 : std::exp(-d * d / (2.0 * cfg.w_ini * cfg.w_ini));
  }
  psi /= psi.norm();
  return {psi, 0.0};
}

inline double max_hermiticity_defect(const Eigen::MatrixXcd& h) {
  return (h - h.adjoint()).cwiseAbs().maxCoeff();
}

/// exp(-i H t) by full spectral decomposition; reusable across times.
class SpectralPropagator {
public:
  explicit SpectralPropagator(const Eigen::MatrixXcd& h) {
    if (h.rows() != h.cols()) throw ValidationError("H", "must be square");
    if (max_hermiticity_defect(h) > 1e-12) throw NumericalError("Hamiltonian is not Hermitian");
    solver_.compute(h);
  }

  Eigen::VectorXcd apply(const Eigen::VectorXcd& psi0, double t) const {
    const Eigen::MatrixXcd& v = solver_.eigenvectors();
    Eigen::VectorXcd coeff = v.adjoint() * psi0;
    for (Eigen::Index k = 0; k < coeff.size(); ++k)
      coeff(k) *= std::polar(1.0, -solver_.eigenvalues()(k) * t);
    return v * coeff;
  }

  const Eigen::VectorXd& eigenvalues() const { return solver_.eigenvalues(); }

private:
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver_;
};

inline std::vector<LatticeState> evolve(const Eigen::MatrixXcd& h, const LatticeState& psi0,
                                        const std::vector<double>& times) {
  const SpectralPropagator prop(h);
  std::vector<LatticeState> out;
  out.reserve(times.size());
  for (double t : times) {
    if (t == psi0.time_t_d) {
      out.push_back(psi0);
      continue;
    }
    out.push_back({prop.apply(psi0.amplitudes, t - psi0.time_t_d), t});
  }
  return out;
}

inline std::vector<double> site_densities(const LatticeState& s) {
  std::vector<double> rho(static_cast<std::size_t>(s.amplitudes.size()));
  for (Eigen::Index j = 0; j < s.amplitudes.size(); ++j)
    rho[static_cast<std::size_t>(j)] = std::norm(s.amplitudes(j));
  return rho;
}

/// sum_j j |psi_j|^2 with 1-based site labels; meaningful while the packet stays away
/// from the wrap bond.
inline double mean_position(const LatticeState& s) {
  double m = 0.0;
  for (Eigen::Index j = 0; j < s.amplitudes.size(); ++j)
    m += static_cast<double>(j + 1) * std::norm(s.amplitudes(j));
  return m;
}

/// Mean site measured from j0 along the shorter arc of the ring; the antipodal site of an
/// even ring is split evenly between both directions. Agrees with mean_position while the
/// packet is away from the seam, and stays exactly at j0 for a packet symmetric about j0.
inline double centred_mean_position(const LatticeState& s, int j0) {
  const auto n = static_cast<long>(s.amplitudes.size());
  if (j0 < 1 || j0 > n) throw ValidationError("j0", "must lie in [1, N_s]");
  double shift = 0.0;
  for (long j = 0; j < n; ++j) {
    long d = ((j + 1 - j0) % n + n) % n;
    if (2 * d == n) continue;
    if (2 * d > n) d -= n;
    shift += static_cast<double>(d) * std::norm(s.amplitudes(j));
  }
  return static_cast<double>(j0) + shift;
}

/// Circular mean site (1-based, in [1, N_s + 1)) for long runs where the packet wraps.
inline double circular_mean_position(const LatticeState& s) {
  const auto n = static_cast<double>(s.amplitudes.size());
  cplx z = 0.0;
  for (Eigen::Index j = 0; j < s.amplitudes.size(); ++j)
    z += std::norm(s.amplitudes(j)) * std::polar(1.0, 2.0 * std::numbers::pi * j / n);
  double angle = std::arg(z);
  if (angle < 0.0) angle += 2.0 * std::numbers::pi;
  return 1.0 + angle * n / (2.0 * std::numbers::pi);
}

struct DensityCarpet {
  std::vector<double> times;
  std::vector<std::vector<double>> densities;  // [time][site]
};

inline DensityCarpet density_carpet(DriftRunConfig cfg, double t_max, int samples = 201) {
  if (samples < 2) throw ValidationError("carpet_samples", "need at least 2 samples");
  if (!(t_max > 0.0)) throw ValidationError("t_max", "must be positive");
  cfg.times.resize(static_cast<std::size_t>(samples));
  for (int k = 0; k < samples; ++k)
    cfg.times[static_cast<std::size_t>(k)] = t_max * static_cast<double>(k) / (samples - 1);
  const auto states = evolve(build_single_particle_hamiltonian(cfg), initial_state(cfg), cfg.times);
  DensityCarpet c;
  c.times = cfg.times;
  for (const auto& s : states) c.densities.push_back(site_densities(s));
  return c;
}

/// Mean position at each requested time for one twist value.
inline std::vector<double> drift_mean_positions(const DriftRunConfig& cfg) {
  const auto states = evolve(build_single_particle_hamiltonian(cfg), initial_state(cfg), cfg.times);
  std::vector<double> out;
  out.reserve(states.size());
  for (const auto& s : states) out.push_back(centred_mean_position(s, cfg.j0));
  return out;
}

}  // namespace bectwist
