#include <bectwist/bogoliubov_ring.hpp>

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace bectwist;

namespace {

RingBecParams fig1(double g = 1e-37, double omega_over_crit = 0.5) {
  RingBecParams p;
  p.circumference_L = 12e-6;
  p.density_n0 = 5e6;
  p.boson_mass_m_b = lookup_species("Rb87")->mass;
  p.impurity_mass_m_a = lookup_species("Na23")->mass;
  p.lattice_sites_N_s = 30;
  p.lattice_constant_a = 400e-9;
  p.wannier_width_sigma = 100e-9;
  p.coupling_g = g;
  const double er = recoil_energy(p.impurity_mass_m_a, p.lattice_constant_a);
  p.impurity_coupling_kappa = 0.035 * 2.0 * p.lattice_constant_a * er;
  p.hopping_J_a = 0.01 * er;
  const double r = p.circumference_L / (2.0 * std::numbers::pi);
  p.rotation_Omega = omega_over_crit * PhysicalConstants::hbar / (2.0 * p.boson_mass_m_b * r * r);
  return p;
}

RingModel model(const RingBecParams& p) { return to_dimensionless(p).model; }

oracle::Ring as_oracle(const RingModel& m) {
  return {m.L, m.n0, m.omega, m.mass_b, m.g, m.kappa, m.sigma, m.a};
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST(GroundState, NonRotating) {
  const RingModel m = model(fig1(1e-37, 0.0));
  const auto gs = select_ground_state(m);
  EXPECT_EQ(gs.winding_j, 0);
  EXPECT_EQ(gs.q0, 0.0);
  EXPECT_EQ(gs.delta_q, 0.0);
  EXPECT_NEAR(gs.mu, m.g * m.n0, 1e-15);
  EXPECT_FALSE(gs.degenerate);
}

TEST(GroundState, WindingJumpsAtOddMultiplesOfCriticalRotation) {
  for (auto [x, j] : {std::pair{0.999, 0L}, {1.001, 1L}, {2.999, 1L}, {3.001, 2L}, {-1.001, -1L}, {4.999, 2L}, {5.001, 3L}}) {
    const auto gs = select_ground_state(model(fig1(1e-37, x)));
    EXPECT_EQ(gs.winding_j, j) << x;
    EXPECT_LE(std::abs(gs.delta_q), std::numbers::pi / 30.0 + 1e-15);
  }
}

TEST(GroundState, CriticalPointIsFlaggedAndTieBreaksToLowerWinding) {
  RingModel m = model(fig1(1e-37, 0.0));
  m.omega = 3.0 * m.critical_rotation();
  const auto gs = select_ground_state(m);
  EXPECT_TRUE(gs.degenerate);
  EXPECT_EQ(gs.winding_j, 1);
  EXPECT_THROW(phase_twist_alpha_a(m), CriticalRotationError);
}

TEST(GroundState, ChemicalPotentialFormula) {
  const RingModel m = model(fig1(1e-37, 2.2));
  const auto gs = select_ground_state(m);
  EXPECT_NEAR(gs.q0, 2.0 * std::numbers::pi * gs.winding_j / m.L, 1e-15);
  EXPECT_NEAR(gs.delta_q, m.mass_b * m.velocity() - gs.q0, 1e-12);
  EXPECT_NEAR(gs.mu, gs.q0 * gs.q0 / (2 * m.mass_b) + m.g * m.n0 - m.velocity() * gs.q0, 1e-12);
}

TEST(Dispersion, PhononBranchAtLowestMomentum) {
  // large ring in healing lengths: linear branch within 1 %
  const RingModel m = model(fig1(1e-34, 0.0));
  const auto gs = select_ground_state(m);
  const double q = 2.0 * std::numbers::pi / m.L;
  ASSERT_GT(m.L / m.healing_length(), 10.0);
  const auto mode = dispersion(m, gs, q);
  EXPECT_LT(rel(mode.energy_hw, m.sound_velocity() * q), 0.01);
}

TEST(Dispersion, FreeParticleLimit) {
  RingModel m = model(fig1(1e-37, 0.0));
  m.g = 0.0;
  const auto mode = dispersion(m, select_ground_state(m), 0.7);
  EXPECT_DOUBLE_EQ(mode.energy_EB, mode.eps0);
  EXPECT_DOUBLE_EQ(mode.A, 1.0);
  EXPECT_DOUBLE_EQ(mode.B, 0.0);
}

TEST(Dispersion, BogoliubovNormalisationAndStructureFactor) {
  const RingModel m = model(fig1(1e-36, 0.4));
  const auto gs = select_ground_state(m);
  double previous = 0.0;
  for (int j = 1; j < 200; ++j) {
    const double q = 2.0 * std::numbers::pi * j / m.L;
    const auto mode = dispersion(m, gs, q);
    EXPECT_NEAR(mode.A * mode.A - mode.B * mode.B, 1.0, 1e-10);
    EXPECT_GT(mode.energy_EB, 0.0);
    EXPECT_GT(mode.structure_factor, previous);
    EXPECT_LE(mode.structure_factor, 1.0);
    previous = mode.structure_factor;
  }
  EXPECT_GT(previous, 0.98);
}

TEST(Dispersion, StructureFactorSmallMomentumSlope) {
  RingModel m = model(fig1(1e-34, 0.0));
  m.L = 1e5;  // long ring so that q xi_h < 0.1 is reachable on the lattice of momenta
  const auto gs = select_ground_state(m);
  const double q = 2.0 * std::numbers::pi * 3 / m.L;
  ASSERT_LT(q * m.healing_length(), 0.1);
  const auto mode = dispersion(m, gs, q);
  EXPECT_LT(rel(mode.structure_factor, q / (2.0 * m.mass_b * m.sound_velocity())), 0.01);
}

TEST(Dispersion, ZeroMomentumRejectedAndLandauInstabilityReported) {
  RingModel m = model(fig1(1e-37, 0.9));
  const auto gs = select_ground_state(m);
  EXPECT_THROW(dispersion(m, gs, 0.0), ValidationError);
  // a condensate on the wrong winding: mismatch beyond pi/L
  m.g = 1e-12 * m.g;
  auto gs2 = gs;
  gs2.delta_q = 2.5 * std::numbers::pi / m.L;
  try {
    dispersion(m, gs2, 2.0 * std::numbers::pi / m.L);
    FAIL();
  } catch (const CriticalRotationError& e) {
    EXPECT_NEAR(e.q(), 2.0 * std::numbers::pi / m.L, 1e-15);
    EXPECT_NE(std::string(e.what()).find("Bogoliubov approximation invalid"), std::string::npos);
  }
}

TEST(Coupling, ClosedFormMatchesQuadrature) {
  const RingModel m = model(fig1());
  const auto gs = select_ground_state(m);
  const auto o = as_oracle(m);
  for (int j : {1, -1, 2, 7, -13, 40}) {
    const double q = 2.0 * std::numbers::pi * j / m.L;
    const auto mode = dispersion(m, gs, q);
    const auto exact = oracle::ring_coupling(o, q, 3.0);
    EXPECT_LT(rel(mode.M_abs_sq, std::norm(exact)), 1e-8) << j;
    const auto closed = coupling_element(m, mode, 3.0);
    EXPECT_LT(std::abs(closed - exact) / std::abs(exact), 1e-8) << j;
  }
}

TEST(Twist, VanishesWithoutRotation) {
  EXPECT_LT(std::abs(phase_twist_alpha_a(model(fig1(1e-37, 0.0)))), 1e-14);
  EXPECT_LT(std::abs(phase_twist_alpha_a(model(fig1(1e-35, 0.0)))), 1e-14);
}

TEST(Twist, MatchesDefinitionOnEveryBond) {
  const RingModel m = model(fig1(1e-37, 0.6));
  const double alpha = phase_twist_alpha_a(m);
  const auto o = as_oracle(m);
  double first = 0.0;
  for (int i : {0, 1, 17, 29}) {
    // library reports the bond j -> j+1, i.e. alpha_{i+1,i} of the definition
    const double def = oracle::ring_alpha_definition(o, (i + 1) * m.a, i * m.a);
    EXPECT_LT(rel(alpha, def), 1e-8) << i;
    if (i == 0) first = def;
    else EXPECT_NEAR(def, first, 1e-12 * std::abs(first) + 1e-15);
  }
}

TEST(Twist, AntisymmetricInRotation) {
  for (double x : {0.3, 0.8, 1.7, 2.6}) {
    const double plus = phase_twist_alpha_a(model(fig1(1e-37, x)));
    const double minus = phase_twist_alpha_a(model(fig1(1e-37, -x)));
    EXPECT_NEAR(plus, -minus, 1e-14 * std::abs(plus)) << x;
  }
}

TEST(Twist, SawtoothBetweenCriticalPoints) {
  // increasing on (-1, 1) and on (1, 3) in units of Omega_crit; sign flip at the jumps
  std::vector<double> xs;
  for (int k = 1; k < 200; ++k) xs.push_back(-1.0 + 4.0 * k / 200.0);
  double prev = -std::numeric_limits<double>::infinity();
  for (double x : xs) {
    if (std::abs(x - 1.0) < 1e-9) continue;
    const double a = phase_twist_alpha_a(model(fig1(1e-37, x)));
    if (x > 1.0 && prev > 0.0 && a < prev) {
      EXPECT_LT(a, 0.0) << "jump at " << x;
      prev = a;
      continue;
    }
    EXPECT_GT(a, prev) << x;
    prev = a;
  }
  EXPECT_GT(phase_twist_alpha_a(model(fig1(1e-37, 0.99))), 0.0);
  EXPECT_LT(phase_twist_alpha_a(model(fig1(1e-37, 1.01))), 0.0);
  EXPECT_GT(phase_twist_alpha_a(model(fig1(1e-37, 2.99))), 0.0);
  EXPECT_LT(phase_twist_alpha_a(model(fig1(1e-37, 3.01))), 0.0);
}

TEST(Twist, CutoffDoublingConverged) {
  const RingModel m = model(fig1(1e-37, 0.7));
  const double base = phase_twist_alpha_a(m);
  const double doubled = phase_twist_alpha_a(m, {2.0});
  EXPECT_LT(rel(doubled, base), 1e-10);
}

TEST(Hopping, NoCouplingMeansNoReduction) {
  RingModel m = model(fig1(1e-37, 0.5));
  m.kappa = 0.0;
  EXPECT_EQ(hopping_reduction(m, 0.0), 1.0);
  const auto pq = polaron_quantities(m);
  EXPECT_EQ(pq.alpha_a, 0.0);
  EXPECT_EQ(pq.polaron_shift_E_j, 0.0);
  EXPECT_EQ(pq.mediated_V_nn, 0.0);
  EXPECT_EQ(pq.mean_field_shift_Ebar, 0.0);
}

TEST(Hopping, ThermalOccupationSuppressesFurther) {
  const RingModel m = model(fig1(1e-37, 0.5));
  double prev = hopping_reduction(m, 0.0);
  EXPECT_GT(prev, 0.5);
  EXPECT_LE(prev, 1.0);
  for (double kT : {0.01, 0.1, 1.0, 10.0}) {
    const double f = hopping_reduction(m, kT);
    EXPECT_LT(f, prev) << kT;
    prev = f;
  }
  EXPECT_THROW(hopping_reduction(m, -1.0), ValidationError);
}

TEST(Polaron, ShiftsAgainstQuadrature) {
  const RingModel m = model(fig1(1e-37, 0.5));
  const auto pq = polaron_quantities(m);
  const auto o = as_oracle(m);
  double e_j = 0.0, v_nn = 0.0;
  for (double q : oracle::ring_momenta(o)) {
    const double hw = oracle::ring_mode(o, q).hw;
    const auto mi = oracle::ring_coupling(o, q, 0.0);
    const auto mj = oracle::ring_coupling(o, q, m.a);
    e_j += hw * std::norm(mi);
    v_nn += hw * 2.0 * std::real(mi * std::conj(mj));
  }
  EXPECT_LT(rel(pq.polaron_shift_E_j, e_j), 1e-8);
  EXPECT_LT(rel(pq.mediated_V_nn, v_nn), 1e-8);
  EXPECT_NEAR(pq.mean_field_shift_Ebar, m.kappa * m.n0, 1e-15);
  EXPECT_NEAR(pq.alpha_a, phase_twist_alpha_a(m), 1e-15);
}

TEST(Polaron, ShiftBoundsMediatedInteraction) {
  std::mt19937 gen(7);
  std::uniform_real_distribution<double> logg(-37.0, -34.0), rot(-0.95, 0.95);
  for (int k = 0; k < 20; ++k) {
    const RingModel m = model(fig1(std::pow(10.0, logg(gen)), rot(gen)));
    const auto pq = polaron_quantities(m);
    EXPECT_GE(pq.polaron_shift_E_j, 0.0);
    EXPECT_GE(pq.polaron_shift_E_j, std::abs(pq.mediated_V_nn) / 2.0);
    EXPECT_LE(pq.hopping_reduction_factor, 1.0);
  }
}
