#pragma once

// Physical constants, species data and the SI <-> internal unit conversion shared by
// the ring modules. Internal units for the ring: hbar = 1, lattice constant a = 1,
// energies in units of g*n0.

#include <bectwist/errors.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace bectwist {

/// CODATA 2018 values.
struct PhysicalConstants {
  static constexpr double hbar = 1.054571817e-34;   // J s
  static constexpr double k_B = 1.380649e-23;       // J / K
  static constexpr double amu = 1.66053906660e-27;  // kg
};

struct Species {
  std::string name;
  double mass = 0.0;  // kg
};

/// Built-in species table. Unknown names return nullopt; callers then need an explicit mass.
inline std::optional<Species> lookup_species(std::string_view name) {
  if (name == "Rb87" || name == "87Rb") return Species{"Rb87", 86.909180527 * PhysicalConstants::amu};
  if (name == "Na23" || name == "23Na") return Species{"Na23", 22.98976928 * PhysicalConstants::amu};
  return std::nullopt;
}

/// Recoil energy of the impurity lattice with period a (lattice light wavelength 2a):
/// E_R = (2 pi hbar)^2 / (2 m_a (2a)^2).
inline double recoil_energy(double impurity_mass, double lattice_constant) {
  const double h = 2.0 * std::numbers::pi * PhysicalConstants::hbar;
  const double lambda = 2.0 * lattice_constant;
  return h * h / (2.0 * impurity_mass * lambda * lambda);
}

struct EnergyScale {
  double recoil_energy = 0.0;            // J
  double hopping_J_a = 0.0;              // J
  double boson_coupling_g = 0.0;         // J m^D
  double impurity_coupling_kappa = 0.0;  // J m^D
};

/// Ring condensate, rotation and impurity lattice, all in SI.
struct RingBecParams {
  double circumference_L = 0.0;          // m
  double density_n0 = 0.0;               // 1/m
  double rotation_Omega = 0.0;           // rad/s
  double boson_mass_m_b = 0.0;           // kg
  double coupling_g = 0.0;               // J m
  double impurity_coupling_kappa = 0.0;  // J m
  double wannier_width_sigma = 0.0;      // m
  int lattice_sites_N_s = 0;
  double lattice_constant_a = 0.0;       // m
  double temperature_T = 0.0;            // K
  double impurity_mass_m_a = 0.0;        // kg
  double hopping_J_a = 0.0;              // J

  EnergyScale energy_scale() const {
    return {recoil_energy(impurity_mass_m_a, lattice_constant_a), hopping_J_a, coupling_g,
            impurity_coupling_kappa};
  }
};

/// Ring parameters in a unit system with hbar = 1. Produced by to_dimensionless
/// (a = 1, g*n0 = 1), but any consistent hbar = 1 system works for the ring solvers.
struct RingModel {
  double L = 0.0;
  double n0 = 0.0;
  double omega = 0.0;  // rotation rate
  double mass_b = 0.0;
  double g = 0.0;
  double kappa = 0.0;
  double sigma = 0.0;
  double a = 1.0;
  int sites = 0;
  double kT = 0.0;
  double mass_a = 0.0;
  double J_a = 0.0;

  double radius() const { return L / (2.0 * std::numbers::pi); }
  double velocity() const { return radius() * omega; }
  double gn0() const { return g * n0; }
  double healing_length() const { return 1.0 / std::sqrt(mass_b * g * n0); }
  double sound_velocity() const { return std::sqrt(g * n0 / mass_b); }
  /// Omega_crit = hbar / (2 m_b R^2).
  double critical_rotation() const { return 1.0 / (2.0 * mass_b * radius() * radius()); }
};

/// SI value of one internal unit of each dimension.
struct UnitScales {
  double length = 1.0;       // m
  double energy = 1.0;       // J
  double mass = 1.0;         // kg
  double time = 1.0;         // s
  double temperature = 1.0;  // K
};

struct ScaledRing {
  RingModel model;
  UnitScales scales;
};

namespace detail {
inline void require_positive(double value, const char* field) {
  if (!(value > 0.0) || !std::isfinite(value))
    throw ValidationError(field, "must be positive and finite");
}
}  // namespace detail

inline ScaledRing to_dimensionless(const RingBecParams& p) {
  using detail::require_positive;
  require_positive(p.circumference_L, "circumference_L");
  require_positive(p.density_n0, "density_n0");
  require_positive(p.boson_mass_m_b, "boson_mass_m_b");
  require_positive(p.coupling_g, "coupling_g");
  require_positive(p.wannier_width_sigma, "wannier_width_sigma");
  require_positive(p.lattice_constant_a, "lattice_constant_a");
  require_positive(p.impurity_mass_m_a, "impurity_mass_m_a");
  if (p.lattice_sites_N_s < 1) throw ValidationError("lattice_sites_N_s", "must be >= 1");
  if (!(p.temperature_T >= 0.0)) throw ValidationError("temperature_T", "must be >= 0");
  if (!(p.hopping_J_a >= 0.0)) throw ValidationError("hopping_J_a", "must be >= 0");
  if (!std::isfinite(p.rotation_Omega)) throw ValidationError("rotation_Omega", "must be finite");
  if (!std::isfinite(p.impurity_coupling_kappa))
    throw ValidationError("impurity_coupling_kappa", "must be finite");
  const double closure = p.lattice_sites_N_s * p.lattice_constant_a;
  if (std::abs(closure - p.circumference_L) > 1e-9 * p.circumference_L)
    throw ValidationError("lattice_constant_a", "N_s * a must equal the circumference L");

  const double hbar = PhysicalConstants::hbar;
  UnitScales s;
  s.length = p.lattice_constant_a;
  s.energy = p.coupling_g * p.density_n0;
  s.mass = hbar * hbar / (s.energy * s.length * s.length);
  s.time = hbar / s.energy;
  s.temperature = s.energy / PhysicalConstants::k_B;

  RingModel m;
  m.L = p.circumference_L / s.length;
  m.n0 = p.density_n0 * s.length;
  m.omega = p.rotation_Omega * s.time;
  m.mass_b = p.boson_mass_m_b / s.mass;
  m.g = p.coupling_g / (s.energy * s.length);
  m.kappa = p.impurity_coupling_kappa / (s.energy * s.length);
  m.sigma = p.wannier_width_sigma / s.length;
  m.a = 1.0;
  m.sites = p.lattice_sites_N_s;
  m.kT = p.temperature_T / s.temperature;
  m.mass_a = p.impurity_mass_m_a / s.mass;
  m.J_a = p.hopping_J_a / s.energy;
  return {m, s};
}

inline RingBecParams to_physical(const ScaledRing& r) {
  const RingModel& m = r.model;
  const UnitScales& s = r.scales;
  RingBecParams p;
  p.circumference_L = m.L * s.length;
  p.density_n0 = m.n0 / s.length;
  p.rotation_Omega = m.omega / s.time;
  p.boson_mass_m_b = m.mass_b * s.mass;
  p.coupling_g = m.g * s.energy * s.length;
  p.impurity_coupling_kappa = m.kappa * s.energy * s.length;
  p.wannier_width_sigma = m.sigma * s.length;
  p.lattice_sites_N_s = m.sites;
  p.lattice_constant_a = m.a * s.length;
  p.temperature_T = m.kT * s.temperature;
  p.impurity_mass_m_a = m.mass_a * s.mass;
  p.hopping_J_a = m.J_a * s.energy;
  return p;
}

struct ValidityThresholds {
  double weak_coupling_max = 0.1;    // |kappa| / (g n0 xi_h) << 1
  double phonon_velocity_min = 10.0; // c hbar / (a J_a) >> 1
};

struct ValidityReport {
  double weak_coupling_ratio = 0.0;
  double phonon_velocity_ratio = 0.0;
  bool weak_coupling_ok = false;
  bool phonon_velocity_ok = false;
  bool tight_binding_ok = false;  // sigma < a
  std::vector<std::string> warnings;

  bool all_ok() const { return weak_coupling_ok && phonon_velocity_ok && tight_binding_ok; }
};

/// Advisory check of the weak-coupling and fast-phonon conditions. Never throws.
inline ValidityReport validity_check(const RingModel& m, const ValidityThresholds& th = {}) {
  ValidityReport r;
  const double gn0 = m.g * m.n0;
  if (m.kappa == 0.0) {
    r.weak_coupling_ratio = 0.0;
  } else {
    const double xi = 1.0 / std::sqrt(m.mass_b * gn0);
    r.weak_coupling_ratio = std::abs(m.kappa) / (gn0 * xi);
  }
  const double c = std::sqrt(std::max(gn0, 0.0) / m.mass_b);
  r.phonon_velocity_ratio = m.J_a > 0.0 ? c / (m.a * m.J_a) : std::numeric_limits<double>::infinity();

  r.weak_coupling_ok = r.weak_coupling_ratio < th.weak_coupling_max;
  r.phonon_velocity_ok = r.phonon_velocity_ratio > th.phonon_velocity_min;
  r.tight_binding_ok = m.sigma < m.a;

  if (!r.weak_coupling_ok)
    r.warnings.push_back("impurity-boson coupling not weak: |kappa|/(g n0 xi_h) = " +
                         std::to_string(r.weak_coupling_ratio));
  if (!r.phonon_velocity_ok)
    r.warnings.push_back("phonon velocity not large compared to a J_a/hbar: ratio = " +
                         std::to_string(r.phonon_velocity_ratio));
  if (!r.tight_binding_ok) r.warnings.push_back("Wannier width sigma >= lattice constant a");
  return r;
}

}  // namespace bectwist
