#pragma once

// Two-species Bose-Hubbard ring: condensate mode c (N_c bosons, Peierls twist alpha_c) and a
// single impurity a coupled by an on-site density-density term U_I. Energies in units of J_a,
// time in hbar / J_a.

#include <bectwist/errors.hpp>
#include <bectwist/fock_basis.hpp>
#include <bectwist/krylov.hpp>
#include <bectwist/lanczos.hpp>
#include <bectwist/lattice_dynamics.hpp>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

namespace bectwist {

struct EdModelParams {
  int N_s = 21;
  int N_c = 3;
  double J_a = 1.0;
  double J_c = 1.0;
  double U_c = 1.0;
  double U_I = 2.0;
  double alpha_c = 0.0;
  long long max_nonzeros = 5'000'000;
};

inline void validate(const EdModelParams& p) {
  if (p.N_s < 3) throw ValidationError("N_s", "ring needs at least 3 sites");
  if (p.N_c < 1) throw ValidationError("N_c", "need at least one boson in mode c");
  for (auto [v, name] : {std::pair{p.J_a, "J_a"}, std::pair{p.J_c, "J_c"}, std::pair{p.U_c, "U_c"},
                         std::pair{p.U_I, "U_I"}, std::pair{p.alpha_c, "alpha_c"}})
    if (!std::isfinite(v)) throw ValidationError(name, "must be finite");
  if (p.max_nonzeros <= 0) throw ValidationError("max_nonzeros", "must be positive");
}

using SparseMatrixC = Eigen::SparseMatrix<cplx, Eigen::RowMajor, long long>;

struct SparseHamiltonian {
  SparseMatrixC matrix;
  bool hermitian = false;
  double hermiticity_defect = 0.0;
  long long dimension() const { return matrix.rows(); }
  long long nonzeros() const { return matrix.nonZeros(); }
};

namespace detail {

inline double hermiticity_defect(const SparseMatrixC& h) {
  const SparseMatrixC d = h - SparseMatrixC(h.adjoint());
  double worst = 0.0;
  for (long long r = 0; r < d.outerSize(); ++r)
    for (SparseMatrixC::InnerIterator it(d, r); it; ++it) worst = std::max(worst, std::abs(it.value()));
  return worst;
}

inline SparseHamiltonian finish(SparseMatrixC h) {
  SparseHamiltonian out;
  out.hermiticity_defect = hermiticity_defect(h);
  out.hermitian = out.hermiticity_defect <= 1e-12;
  if (!out.hermitian) throw NumericalError("assembled Hamiltonian is not Hermitian");
  out.matrix = std::move(h);
  return out;
}

/// Calls f(new_index, amplitude) for every off-diagonal c-hopping image of state k:
/// -J_c (e^{2 pi i alpha} c_j^dag c_{j+1} + h.c.).
template <class F>
void for_each_c_hop(const BosonSectorBasis& basis, const EdModelParams& p, long long k,
                    std::vector<BosonSectorBasis::Occupation>& scratch, F&& f) {
  const int ns = basis.sites();
  const cplx phase = std::polar(1.0, 2.0 * std::numbers::pi * p.alpha_c);
  const auto occ = basis.state(k);
  scratch.assign(occ.begin(), occ.end());
  for (int j = 0; j < ns; ++j) {
    const int jp = (j + 1) % ns;
    // c_j^dag c_{j+1}: boson moves j+1 -> j
    if (scratch[jp] > 0) {
      const double amp = std::sqrt(static_cast<double>(scratch[jp]) * (scratch[j] + 1.0));
      --scratch[jp];
      ++scratch[j];
      f(basis.index_of(scratch), -p.J_c * phase * amp);
      ++scratch[jp];
      --scratch[j];
    }
    // c_{j+1}^dag c_j: boson moves j -> j+1
    if (scratch[j] > 0) {
      const double amp = std::sqrt(static_cast<double>(scratch[j]) * (scratch[jp] + 1.0));
      --scratch[j];
      ++scratch[jp];
      f(basis.index_of(scratch), -p.J_c * std::conj(phase) * amp);
      ++scratch[j];
      --scratch[jp];
    }
  }
}

inline double c_interaction(std::span<const BosonSectorBasis::Occupation> occ, double U_c) {
  double e = 0.0;
  for (auto n : occ) e += 0.5 * U_c * n * (n - 1.0);
  return e;
}

inline void require_same_sector(const BosonSectorBasis& basis, long long idx) {
  if (idx < 0 || idx >= basis.dimension())
    throw std::logic_error("hop left the fixed-particle-number sector");
}

}  // namespace detail

/// Mode-c block alone (hopping with twist plus U_c); the impurity is absent.
inline SparseHamiltonian assemble_c_sector_hamiltonian(const EdModelParams& p,
                                                       const BosonSectorBasis& basis) {
  validate(p);
  const long long dim = basis.dimension();
  std::vector<Eigen::Triplet<cplx, long long>> trip;
  trip.reserve(static_cast<std::size_t>(dim) * static_cast<std::size_t>(1 + 2 * basis.sites()));
  std::vector<BosonSectorBasis::Occupation> scratch;
  for (long long k = 0; k < dim; ++k) {
    trip.emplace_back(k, k, detail::c_interaction(basis.state(k), p.U_c));
    detail::for_each_c_hop(basis, p, k, scratch, [&](long long to, cplx v) {
      detail::require_same_sector(basis, to);
      trip.emplace_back(to, k, v);
    });
  }
  SparseMatrixC h(dim, dim);
  h.setFromTriplets(trip.begin(), trip.end());
  return detail::finish(std::move(h));
}

/// Full Hamiltonian on the (c occupations, impurity site) basis. The impurity hops carry no
/// phase; both species wrap periodically.
inline SparseHamiltonian assemble_hamiltonian(const EdModelParams& p, const FockBasis& basis) {
  validate(p);
  const BosonSectorBasis& cb = basis.c_sector();
  const int ns = basis.sites();
  const long long dim = basis.dimension();
  std::vector<Eigen::Triplet<cplx, long long>> trip;
  trip.reserve(static_cast<std::size_t>(estimated_nonzeros(ns, p.N_c)));
  std::vector<BosonSectorBasis::Occupation> scratch;
  for (long long c = 0; c < cb.dimension(); ++c) {
    const auto occ = cb.state(c);
    const double e_c = detail::c_interaction(occ, p.U_c);
    std::vector<std::pair<long long, cplx>> hops;
    detail::for_each_c_hop(cb, p, c, scratch, [&](long long to, cplx v) {
      detail::require_same_sector(cb, to);
      hops.emplace_back(to, v);
    });
    for (int s = 0; s < ns; ++s) {
      const long long col = c * ns + s;
      trip.emplace_back(col, col, e_c + p.U_I * occ[static_cast<std::size_t>(s)]);
      for (const auto& [to, v] : hops) trip.emplace_back(to * ns + s, col, v);
      trip.emplace_back(c * ns + (s + 1) % ns, col, -p.J_a);
      trip.emplace_back(c * ns + (s + ns - 1) % ns, col, -p.J_a);
    }
  }
  SparseMatrixC h(dim, dim);
  h.setFromTriplets(trip.begin(), trip.end());
  return detail::finish(std::move(h));
}

/// Matrix-free form H = H_c (x) 1 + 1 (x) H_a + U_I sum_j n_j^c n_j^a. Stores only the
/// c block, so memory scales with the c sector rather than the full space.
class StructuredHamiltonian {
public:
  StructuredHamiltonian(const EdModelParams& p, const FockBasis& basis)
      : ns_(basis.sites()), csec_(basis.c_sector().dimension()),
        hc_t_(assemble_c_sector_hamiltonian(p, basis.c_sector()).matrix.transpose()),
        impurity_(build_single_particle_hamiltonian(ns_, 0.0, p.J_a)),
        onsite_(ns_, csec_) {
    for (long long c = 0; c < csec_; ++c) {
      const auto occ = basis.c_sector().state(c);
      for (int s = 0; s < ns_; ++s) onsite_(s, c) = p.U_I * occ[static_cast<std::size_t>(s)];
    }
  }

  long long dimension() const { return csec_ * ns_; }

  void operator()(const Eigen::VectorXcd& x, Eigen::VectorXcd& y) const {
    y.resize(x.size());
    // column c of X is the impurity amplitude vector for c-configuration c
    Eigen::Map<const Eigen::MatrixXcd> X(x.data(), ns_, csec_);
    Eigen::Map<Eigen::MatrixXcd> Y(y.data(), ns_, csec_);
    Y.noalias() = impurity_ * X;
    Y.array() += onsite_.array() * X.array();
    Y.noalias() += X * hc_t_;
  }

private:
  int ns_;
  long long csec_;
  SparseMatrixC hc_t_;  // transpose of the c block
  Eigen::MatrixXcd impurity_;
  Eigen::MatrixXd onsite_;
};

struct CSectorGroundState {
  double energy = 0.0;
  Eigen::VectorXcd state;
  cplx translation_eigenvalue = 1.0;
  double quasi_momentum = 0.0;  // K in (-pi, pi], from <g|T|g> = e^{-iK}
  int momentum_index = 0;       // K N_s / 2 pi rounded, in (-N_s/2, N_s/2]
  bool degenerate = false;      // translation expectation not unimodular to 1e-8
  int iterations = 0;
  double residual = 0.0;
};

/// <psi|T|psi> with T moving every boson one site forward (n_j -> n_{j+1}).
inline cplx translation_expectation(const BosonSectorBasis& basis, const Eigen::VectorXcd& psi) {
  const int ns = basis.sites();
  std::vector<BosonSectorBasis::Occupation> shifted(static_cast<std::size_t>(ns));
  cplx acc = 0.0;
  for (long long k = 0; k < basis.dimension(); ++k) {
    const auto occ = basis.state(k);
    for (int j = 0; j < ns; ++j) shifted[static_cast<std::size_t>((j + 1) % ns)] = occ[static_cast<std::size_t>(j)];
    acc += std::conj(psi(basis.index_of(shifted))) * psi(k);
  }
  return acc;
}

/// Lowest eigenpair of the c block (impurity decoupled) and its total quasi-momentum.
inline CSectorGroundState ground_state_c_sector(const EdModelParams& p,
                                                const LanczosOptions& opts = {}) {
  validate(p);
  const BosonSectorBasis basis(p.N_s, p.N_c);
  const SparseHamiltonian h = assemble_c_sector_hamiltonian(p, basis);
  const auto res = lanczos_ground_state(
      [&](const Eigen::VectorXcd& x, Eigen::VectorXcd& y) { y.noalias() = h.matrix * x; },
      basis.dimension(), opts);

  CSectorGroundState g;
  g.energy = res.eigenvalue;
  g.state = res.eigenvector;
  g.iterations = res.iterations;
  g.residual = res.residual;
  g.translation_eigenvalue = translation_expectation(basis, g.state);
  g.degenerate = std::abs(std::abs(g.translation_eigenvalue) - 1.0) > 1e-8;
  g.quasi_momentum = -std::arg(g.translation_eigenvalue);
  int m = static_cast<int>(std::lround(g.quasi_momentum * p.N_s / (2.0 * std::numbers::pi)));
  m = ((m % p.N_s) + p.N_s) % p.N_s;
  if (2 * m > p.N_s) m -= p.N_s;
  g.momentum_index = m;
  return g;
}

struct QuenchConfig {
  int j0 = 11;  // 1-based
  double w_ini = std::numbers::sqrt2;
  std::vector<double> times{4.0};
  bool matrix_free = false;
  KrylovOptions krylov{};
  LanczosOptions lanczos{};
};

struct QuenchSnapshot {
  double time_t_d = 0.0;
  std::vector<double> impurity_density;
  double mean_position = 0.0;
  double norm_error = 0.0;
  double energy = 0.0;
};

struct QuenchResult {
  long long dimension = 0;
  long long nonzeros = 0;  // 0 for the matrix-free operator
  CSectorGroundState c_ground;
  double initial_energy = 0.0;
  std::vector<QuenchSnapshot> snapshots;
  PropagationStats propagation{};
  Eigen::VectorXcd final_state;
};

/// (c ground state) (x) (impurity Gaussian) as a full-space vector.
inline Eigen::VectorXcd product_initial_state(const Eigen::VectorXcd& c_ground, int N_s, int j0,
                                              double w_ini) {
  DriftRunConfig d;
  d.N_s = N_s;
  d.j0 = j0;
  d.w_ini = w_ini;
  const Eigen::VectorXcd imp = initial_state(d).amplitudes;
  Eigen::VectorXcd psi(c_ground.size() * N_s);
  for (Eigen::Index c = 0; c < c_ground.size(); ++c) psi.segment(c * N_s, N_s) = c_ground(c) * imp;
  return psi;
}

inline std::vector<double> impurity_density(const Eigen::VectorXcd& psi, int N_s) {
  std::vector<double> rho(static_cast<std::size_t>(N_s), 0.0);
  for (Eigen::Index k = 0; k < psi.size(); ++k) rho[static_cast<std::size_t>(k % N_s)] += std::norm(psi(k));
  return rho;
}

/// Quench: U_I switched on at t = 0 with the impurity released from a Gaussian packet.
inline QuenchResult quench_evolve(const EdModelParams& p, const QuenchConfig& q) {
  validate(p);
  if (q.j0 < 1 || q.j0 > p.N_s) throw ValidationError("j0", "must lie in [1, N_s]");
  if (!(q.w_ini > 0.0)) throw ValidationError("w_ini", "must be positive");
  for (std::size_t k = 0; k < q.times.size(); ++k)
    if (!std::isfinite(q.times[k]) || (k > 0 && !(q.times[k] > q.times[k - 1])))
      throw ValidationError("times", "must be finite and strictly increasing");

  const FockBasis basis(p.N_s, p.N_c, p.max_nonzeros);
  QuenchResult out;
  out.dimension = basis.dimension();
  out.c_ground = ground_state_c_sector(p, q.lanczos);

  auto run = [&](const auto& op) {
    Eigen::VectorXcd psi = product_initial_state(out.c_ground.state, p.N_s, q.j0, q.w_ini);
    Eigen::VectorXcd hpsi(psi.size());
    op(psi, hpsi);
    out.initial_energy = std::real(psi.dot(hpsi));
    double t_now = 0.0;
    for (double t : q.times) {
      PropagationStats st;
      psi = krylov_propagate(op, std::move(psi), t - t_now, q.krylov, &st);
      t_now = t;
      out.propagation.steps += st.steps;
      out.propagation.rejected += st.rejected;
      out.propagation.matvecs += st.matvecs;
      out.propagation.max_error_estimate = std::max(out.propagation.max_error_estimate, st.max_error_estimate);
      QuenchSnapshot s;
      s.time_t_d = t;
      s.impurity_density = impurity_density(psi, p.N_s);
      for (int j = 0; j < p.N_s; ++j) s.mean_position += (j + 1) * s.impurity_density[static_cast<std::size_t>(j)];
      s.norm_error = std::abs(psi.norm() - 1.0);
      op(psi, hpsi);
      s.energy = std::real(psi.dot(hpsi));
      out.propagation.norm_error = std::max(out.propagation.norm_error, s.norm_error);
      out.snapshots.push_back(std::move(s));
    }
    out.final_state = std::move(psi);
  };

  if (q.matrix_free) {
    run(StructuredHamiltonian(p, basis));
  } else {
    const SparseHamiltonian h = assemble_hamiltonian(p, basis);
    out.nonzeros = h.nonzeros();
    run([&](const Eigen::VectorXcd& x, Eigen::VectorXcd& y) { y.noalias() = h.matrix * x; });
  }
  return out;
}

}  // namespace bectwist
