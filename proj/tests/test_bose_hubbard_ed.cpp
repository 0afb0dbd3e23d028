#include <bectwist/bose_hubbard_ed.hpp>

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <algorithm>

using namespace bectwist;

namespace {

EdModelParams model(int ns, int nc, double alpha, double U_I = 2.0) {
  EdModelParams p;
  p.N_s = ns;
  p.N_c = nc;
  p.alpha_c = alpha;
  p.U_I = U_I;
  return p;
}

Eigen::VectorXd dense_spectrum(const Eigen::MatrixXcd& h) {
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(h, Eigen::EigenvaluesOnly).eigenvalues();
}

/// Library index of every oracle state.
std::vector<long long> library_order(const FockBasis& basis, const oracle::DenseSector& o) {
  std::vector<long long> idx;
  std::vector<BosonSectorBasis::Occupation> occ;
  for (const auto& [cs, site] : o.states) {
    occ.assign(cs.begin(), cs.end());
    idx.push_back(basis.index_of(occ, site));
  }
  return idx;
}

Eigen::MatrixXcd in_oracle_order(const SparseMatrixC& h, const std::vector<long long>& idx) {
  const Eigen::MatrixXcd d(h);
  const auto n = static_cast<Eigen::Index>(idx.size());
  Eigen::MatrixXcd out(n, n);
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < n; ++c) out(r, c) = d(idx[r], idx[c]);
  return out;
}

}  // namespace

TEST(Assembly, SpectrumMatchesTensorProduct) {
  for (auto [ns, nc, alpha] : {std::tuple{3, 2, 0.0}, {3, 2, 0.13}, {4, 1, 0.4}, {3, 3, 0.27}}) {
    EdModelParams p = model(ns, nc, alpha);
    p.J_a = 0.8;
    p.J_c = 1.3;
    p.U_c = 0.7;
    p.U_I = 1.9;
    const FockBasis basis(p.N_s, p.N_c);
    const auto h = assemble_hamiltonian(p, basis);
    const auto o = oracle::tensor_product_hamiltonian(ns, nc, p.J_a, p.J_c, p.U_c, p.U_I, alpha);
    ASSERT_EQ(o.h.rows(), h.dimension());
    EXPECT_LT((dense_spectrum(Eigen::MatrixXcd(h.matrix)) - dense_spectrum(o.h)).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LT((in_oracle_order(h.matrix, library_order(basis, o)) - o.h).cwiseAbs().maxCoeff(), 1e-13);
  }
}

TEST(Assembly, MatrixElementsMatchStateByStateConstruction) {
  EdModelParams p = model(6, 3, 0.21, 1.4);
  p.U_c = 0.6;
  const FockBasis basis(p.N_s, p.N_c);
  const auto h = assemble_hamiltonian(p, basis);
  EXPECT_TRUE(h.hermitian);
  EXPECT_EQ(h.hermiticity_defect, 0.0);
  const auto o = oracle::map_assembled_hamiltonian(6, 3, p.J_a, p.J_c, p.U_c, p.U_I, p.alpha_c);
  EXPECT_LT((in_oracle_order(h.matrix, library_order(basis, o)) - o.h).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Assembly, NoInteractionMeansSeparableSpectrum) {
  const EdModelParams p = model(5, 2, 0.07, 0.0);
  const FockBasis basis(p.N_s, p.N_c);
  const auto full = dense_spectrum(Eigen::MatrixXcd(assemble_hamiltonian(p, basis).matrix));
  const auto ec = dense_spectrum(Eigen::MatrixXcd(assemble_c_sector_hamiltonian(p, basis.c_sector()).matrix));
  const auto ea = analytic_ring_spectrum(p.N_s, 0.0, p.J_a);
  std::vector<double> sums;
  for (Eigen::Index i = 0; i < ec.size(); ++i)
    for (double a : ea) sums.push_back(ec(i) + a);
  std::sort(sums.begin(), sums.end());
  for (std::size_t k = 0; k < sums.size(); ++k) EXPECT_NEAR(full(static_cast<Eigen::Index>(k)), sums[k], 1e-10);
}

TEST(Assembly, TwistIsPeriodic) {
  const FockBasis basis(5, 2);
  const auto h0 = assemble_hamiltonian(model(5, 2, 0.3), basis);
  const auto h1 = assemble_hamiltonian(model(5, 2, 1.3), basis);
  EXPECT_LT(Eigen::MatrixXcd(h0.matrix - h1.matrix).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Assembly, SingleBosonBlockIsTheTwistedRing) {
  const auto p = model(7, 1, 0.17);
  const BosonSectorBasis b(7, 1);
  const auto e = dense_spectrum(Eigen::MatrixXcd(assemble_c_sector_hamiltonian(p, b).matrix));
  const auto want = analytic_ring_spectrum(7, 0.17, p.J_c);
  for (int k = 0; k < 7; ++k) EXPECT_NEAR(e(k), want[static_cast<std::size_t>(k)], 1e-12);
}

TEST(Assembly, ValidationAndSizeCap) {
  EXPECT_THROW(validate(model(2, 2, 0.0)), ValidationError);
  EXPECT_THROW(validate(model(5, 0, 0.0)), ValidationError);
  auto p = model(21, 3, 0.0);
  p.max_nonzeros = 1000;
  EXPECT_THROW(quench_evolve(p, {}), SizeError);
}

TEST(Structured, MatvecMatchesSparseMatrix) {
  const auto p = model(7, 3, 0.11);
  const FockBasis basis(p.N_s, p.N_c);
  const auto h = assemble_hamiltonian(p, basis);
  const StructuredHamiltonian s(p, basis);
  const Eigen::VectorXcd x = deterministic_start_vector(h.dimension(), 4);
  Eigen::VectorXcd y;
  s(x, y);
  EXPECT_LT((y - h.matrix * x).norm(), 1e-13);
}

TEST(GroundState, LanczosMatchesDenseDiagonalisation) {
  for (auto [ns, nc, alpha] : {std::tuple{5, 2, 0.0}, {5, 2, 0.31}, {7, 2, 0.05}, {7, 3, 0.09}}) {
    const auto p = model(ns, nc, alpha);
    const auto g = ground_state_c_sector(p);
    const BosonSectorBasis b(ns, nc);
    const Eigen::MatrixXcd h(assemble_c_sector_hamiltonian(p, b).matrix);
    EXPECT_NEAR(g.energy, dense_spectrum(h)(0), 1e-10) << ns << " " << alpha;
    EXPECT_LT((h * g.state - g.energy * g.state).norm(), 1e-9);
  }
}

TEST(GroundState, UntwistedRingHasZeroMomentum) {
  const auto g = ground_state_c_sector(model(7, 2, 0.0));
  EXPECT_FALSE(g.degenerate);
  EXPECT_EQ(g.momentum_index, 0);
  EXPECT_NEAR(std::abs(g.translation_eigenvalue - 1.0), 0.0, 1e-10);
}

TEST(GroundState, MomentumJumpsAtHalfOddMultiplesOfInverseRing) {
  const int ns = 7;
  for (int j = 0; j < 3; ++j) {
    const double at = (2.0 * j + 1.0) / (2.0 * ns);
    const auto below = ground_state_c_sector(model(ns, 2, at - 5e-5));
    const auto above = ground_state_c_sector(model(ns, 2, at + 5e-5));
    EXPECT_FALSE(below.degenerate);
    EXPECT_FALSE(above.degenerate);
    EXPECT_NE(below.momentum_index, above.momentum_index) << j;
  }
  // no jump between the critical values
  const auto a = ground_state_c_sector(model(ns, 2, 0.5 / ns + 1e-3));
  const auto b = ground_state_c_sector(model(ns, 2, 1.5 / ns - 1e-3));
  EXPECT_EQ(a.momentum_index, b.momentum_index);
}

TEST(GroundState, DenseTranslationEigenvalueAgrees) {
  const auto p = model(7, 2, 0.09);
  const BosonSectorBasis b(7, 2);
  const Eigen::MatrixXcd h(assemble_c_sector_hamiltonian(p, b).matrix);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  const Eigen::VectorXcd g = es.eigenvectors().col(0);
  const auto lib = ground_state_c_sector(p);
  EXPECT_NEAR(std::abs(translation_expectation(b, g) - lib.translation_eigenvalue), 0.0, 1e-10);
}

TEST(Quench, WithoutInteractionImpurityIsAFreeWalker) {
  const auto p = model(9, 2, 0.08, 0.0);
  QuenchConfig q;
  q.j0 = 5;
  q.times = {1.0, 4.0};
  const auto r = quench_evolve(p, q);
  DriftRunConfig d;
  d.N_s = 9;
  d.j0 = 5;
  d.times = q.times;
  const auto free = evolve(build_single_particle_hamiltonian(9, 0.0, p.J_a), initial_state(d), d.times);
  for (std::size_t k = 0; k < 2; ++k) {
    const auto rho = site_densities(free[k]);
    for (int j = 0; j < 9; ++j) EXPECT_NEAR(r.snapshots[k].impurity_density[static_cast<std::size_t>(j)], rho[static_cast<std::size_t>(j)], 1e-8);
  }
}

TEST(Quench, KrylovMatchesDenseExponential) {
  const auto p = model(7, 2, 0.06);
  QuenchConfig q;
  q.j0 = 4;
  q.times = {4.0};
  const auto r = quench_evolve(p, q);

  const FockBasis basis(p.N_s, p.N_c);
  const auto o = oracle::map_assembled_hamiltonian(7, 2, p.J_a, p.J_c, p.U_c, p.U_I, p.alpha_c);
  const auto idx = library_order(basis, o);
  const Eigen::VectorXcd psi0_lib = product_initial_state(r.c_ground.state, 7, 4, q.w_ini);
  Eigen::VectorXcd psi0(o.h.rows());
  for (Eigen::Index k = 0; k < psi0.size(); ++k) psi0(k) = psi0_lib(idx[static_cast<std::size_t>(k)]);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(o.h);
  Eigen::VectorXcd c = es.eigenvectors().adjoint() * psi0;
  for (Eigen::Index k = 0; k < c.size(); ++k) c(k) *= std::polar(1.0, -es.eigenvalues()(k) * 4.0);
  const Eigen::VectorXcd want = es.eigenvectors() * c;
  Eigen::VectorXcd got(want.size());
  for (Eigen::Index k = 0; k < got.size(); ++k) got(k) = r.final_state(idx[static_cast<std::size_t>(k)]);

  EXPECT_GT(1.0 - std::norm(want.dot(got)), -1e-12);
  EXPECT_LT(1.0 - std::norm(want.dot(got)), 1e-8);
  EXPECT_LT(r.snapshots[0].norm_error, 1e-8);
  EXPECT_NEAR(r.snapshots[0].energy, r.initial_energy, 1e-8);
}

TEST(Quench, MatrixFreeMatchesAssembled) {
  const auto p = model(8, 2, 0.04);
  QuenchConfig q;
  q.j0 = 4;
  q.times = {2.0};
  const auto a = quench_evolve(p, q);
  q.matrix_free = true;
  const auto b = quench_evolve(p, q);
  EXPECT_EQ(b.nonzeros, 0);
  EXPECT_LT((a.final_state - b.final_state).norm(), 1e-8);
}

TEST(Quench, TimeReversedEvolutionReturns) {
  const auto p = model(6, 2, 0.1);
  const FockBasis basis(p.N_s, p.N_c);
  const auto h = assemble_hamiltonian(p, basis);
  auto op = [&](const Eigen::VectorXcd& x, Eigen::VectorXcd& y) { y.noalias() = h.matrix * x; };
  const Eigen::VectorXcd psi = deterministic_start_vector(h.dimension(), 8);
  const auto back = krylov_propagate(op, krylov_propagate(op, psi, 2.5), -2.5);
  EXPECT_LT((back - psi).norm(), 1e-8);
}

TEST(Quench, RejectsBadImpurityStart) {
  QuenchConfig q;
  q.j0 = 0;
  EXPECT_THROW(quench_evolve(model(5, 2, 0.0), q), ValidationError);
  q.j0 = 3;
  q.times = {2.0, 1.0};
  EXPECT_THROW(quench_evolve(model(5, 2, 0.0), q), ValidationError);
}
